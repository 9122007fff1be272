"""The published 64-state classification table, encoded as data.

Each published row names a spin readout, a spatial and polarization Bell
state, a time-bin type (phi or psi, sign left open) and, for the four photon-A
arms ``a11 a12 a21 a22``, the photon-B arm that clicks with it.  Photon A's
R and L clicks pair with photon B clicks of the "same or opposite"
polarization, the published ``R/L`` shorthand.

The shorthand is resolved by one rule.  The final block outputs equal
polarizations exactly when the polarization Bell sign reaching it (after
steps 1-3) equals the time-bin Bell sign.  Every row of the published
final-block transitions obeys this rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from hbsa.analyzer.oracle import stage_entries
from hbsa.hilbert import (
    Bell,
    DetectorOutcome,
    HyperBellLabel,
    Polarization,
    SpatialMode,
    Spins,
    parse_spins,
    spins_str,
)

# spins | spatial polarization time-type | photon-B arm for a11 a12 a21 a22
TABLE_ROWS = """
+++ | phi+ phi+ phi | 11 12 21 22
+++ | phi+ psi- psi | 21 22 11 12
+++ | phi+ phi+ psi | 12 11 22 21
+++ | phi+ psi- phi | 22 21 12 11
++- | phi+ phi- psi | 11 12 21 22
++- | phi+ psi+ phi | 21 22 11 12
++- | phi+ phi- phi | 12 11 22 21
++- | phi+ psi+ psi | 22 21 12 11
+-+ | psi+ psi+ phi | 11 12 21 22
+-+ | psi+ phi- psi | 21 22 11 12
+-+ | psi+ psi+ psi | 12 11 22 21
+-+ | psi+ phi- phi | 22 21 12 11
+-- | psi+ psi- psi | 11 12 21 22
+-- | psi+ phi+ phi | 21 22 11 12
+-- | psi+ psi- phi | 12 11 22 21
+-- | psi+ phi+ psi | 22 21 12 11
-++ | phi- phi- phi | 11 12 21 22
-++ | phi- psi+ psi | 21 22 11 12
-++ | phi- phi- psi | 12 11 22 21
-++ | phi- psi+ phi | 22 21 12 11
-+- | phi- phi+ psi | 11 12 21 22
-+- | phi- psi- phi | 21 22 11 12
-+- | phi- psi- psi | 22 21 12 11
-+- | phi- phi+ phi | 12 11 22 21
--+ | psi- psi- phi | 11 12 21 22
--+ | psi- phi+ psi | 21 22 11 12
--+ | psi- psi- psi | 12 11 22 21
--+ | psi- phi+ phi | 22 21 12 11
--- | psi- psi+ psi | 11 12 21 22
--- | psi- phi- phi | 21 22 11 12
--- | psi- psi+ phi | 12 11 22 21
--- | psi- phi- psi | 22 21 12 11
"""

A_ARMS = (SpatialMode.D11, SpatialMode.D12, SpatialMode.D21, SpatialMode.D22)


@dataclass(frozen=True)
class TableRow:
    spins: Spins
    spatial: Bell
    polarization: Bell
    time_is_phi: bool
    partner: dict  # photon-A detector arm -> photon-B detector arm

    def labels(self) -> tuple[HyperBellLabel, HyperBellLabel]:
        return tuple(
            HyperBellLabel(self.spatial, self.polarization, Bell.of(self.time_is_phi, sign)) for sign in (1, -1)
        )


@dataclass(frozen=True)
class ClassificationRecord:
    spins: Spins
    signature: DetectorOutcome
    label: HyperBellLabel


@lru_cache(maxsize=None)
def table_rows() -> tuple[TableRow, ...]:
    rows = []
    for line in TABLE_ROWS.strip().splitlines():
        spins, states, arms = (part.strip() for part in line.split("|"))
        s, p, t = states.split()
        partner = {a: SpatialMode(b) for a, b in zip(A_ARMS, arms.split())}
        rows.append(TableRow(parse_spins(spins), Bell(s), Bell(p), t == "phi", partner))
    return tuple(rows)


def polarization_before_final_block(label: HyperBellLabel) -> Bell:
    entry_label, _ = stage_entries(label, 4)
    return entry_label.polarization


def sort_signatures(signatures) -> list[DetectorOutcome]:
    """Table order: photon-A polarization R before L, then photon-A arm."""
    return sorted(signatures, key=lambda o: (o.port_a[1] is Polarization.L, o.port_a[0].value))


@lru_cache(maxsize=None)
def expected_entries() -> tuple[tuple[HyperBellLabel, Spins, tuple[DetectorOutcome, ...]], ...]:
    """All 64 labels in table order, with spins and the 8 expected signatures."""
    out = []
    for row in table_rows():
        for label in row.labels():
            same = polarization_before_final_block(label).sign == label.timebin.sign
            sigs = []
            for pol_a in (Polarization.R, Polarization.L):
                pol_b = pol_a if same else pol_a.flipped()
                for arm_a in A_ARMS:
                    sigs.append(DetectorOutcome((arm_a, pol_a), (row.partner[arm_a], pol_b)))
            out.append((label, row.spins, tuple(sort_signatures(sigs))))
    return tuple(out)


@lru_cache(maxsize=None)
def classification_records() -> tuple[ClassificationRecord, ...]:
    return tuple(
        ClassificationRecord(spins, sig, label) for label, spins, sigs in expected_entries() for sig in sigs
    )


@lru_cache(maxsize=None)
def classification_index() -> dict:
    index: dict = {}
    for rec in classification_records():
        key = (rec.spins, rec.signature)
        if key in index:
            raise AssertionError(f"classification table is ambiguous at {spins_str(rec.spins)} {rec.signature}")
        index[key] = rec.label
    return index


def format_row(label: HyperBellLabel, spins: Spins, signatures) -> str:
    return f"{label} | {spins_str(spins)} | {' '.join(str(s) for s in signatures)}"


def render_expected() -> str:
    """The 64-row table (label | spins | signatures) straight from the encoding."""
    return "\n".join(format_row(*entry) for entry in expected_entries()) + "\n"
