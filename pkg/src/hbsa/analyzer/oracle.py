"""Reference transition maps, transcribed as tables over Bell-product labels.

These maps bypass the optical elements entirely.  Steps 1-3 send each
``(hyper-Bell label, spins)`` entry to a single entry times ``d**2``.  The final
block sends an entry to an eight-term superposition of detector clicks.

The final-block table is kept exactly as published (``LITERAL_BLOCK4``).  The
published list is not unitary, so two documented corrections are applied on
top of it:

* the arm-2 half of each output mirrors the arm-1 half (published arm-2
  halves contain index typos);
* ``SIGN_PATCHES`` flips two arm-1 terms (and thereby their mirrors).

:func:`errata` lists every difference between the two versions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from hbsa.emitter import CavityParams, success_amplitude
from hbsa.hilbert import (
    INITIAL_SPINS,
    Bell,
    DetectorOutcome,
    HyperBellLabel,
    JointBasis,
    PhotonLabel,
    SpatialMode,
    Spins,
    SpinVal,
    Stage,
    StateVector,
    TimeBin,
    bell_product,
    spins_str,
)

PLUS, MINUS = SpinVal.PLUS, SpinVal.MINUS
PHI_P, PHI_M, PSI_P, PSI_M = Bell.PHI_PLUS, Bell.PHI_MINUS, Bell.PSI_PLUS, Bell.PSI_MINUS

LabelState = dict  # {(HyperBellLabel, spins): complex}


class OracleDomainError(ValueError):
    """The entry is not covered by any transcribed transition."""


# --- step 1: spatial parity onto spin 1 ------------------------------------
# spatial label -> spin 1 afterwards; input spins are all '+'.
STEP1 = {PHI_P: PLUS, PSI_P: PLUS, PHI_M: MINUS, PSI_M: MINUS}

# --- step 2 -------------------------------------------------------------------
# (spatial, polarization) -> (spatial, polarization, spin 2).  Spin 1 must
# carry the spatial sign; spin 3 is '+'.
STEP2 = {
    (PHI_P, PHI_P): (PHI_P, PHI_P, PLUS),
    (PHI_P, PHI_M): (PHI_P, PHI_M, PLUS),
    (PSI_P, PHI_P): (PSI_P, PHI_P, MINUS),
    (PSI_P, PHI_M): (PSI_P, PHI_M, MINUS),
    (PHI_P, PSI_P): (PSI_P, PSI_P, PLUS),
    (PHI_P, PSI_M): (PSI_P, PSI_M, PLUS),
    (PSI_P, PSI_P): (PHI_P, PSI_P, MINUS),
    (PSI_P, PSI_M): (PHI_P, PSI_M, MINUS),
    (PHI_M, PHI_P): (PHI_M, PHI_M, PLUS),
    (PHI_M, PHI_M): (PHI_M, PHI_P, PLUS),
    (PSI_M, PHI_P): (PSI_M, PHI_M, MINUS),
    (PSI_M, PHI_M): (PSI_M, PHI_P, MINUS),
    (PHI_M, PSI_P): (PSI_M, PSI_M, PLUS),
    (PHI_M, PSI_M): (PSI_M, PSI_P, PLUS),
    (PSI_M, PSI_P): (PHI_M, PSI_M, MINUS),
    (PSI_M, PSI_M): (PHI_M, PSI_P, MINUS),
}

# --- step 3 -------------------------------------------------------------------
# (spatial, polarization, spin 2) -> (polarization, spin 3).  Spatial label and
# spins 1-2 are untouched.
STEP3 = {
    (PHI_P, PHI_P, PLUS): (PHI_P, PLUS),
    (PHI_P, PHI_M, PLUS): (PSI_P, MINUS),
    (PSI_P, PSI_P, PLUS): (PHI_M, MINUS),
    (PSI_P, PSI_M, PLUS): (PSI_M, PLUS),
    (PHI_P, PSI_P, MINUS): (PHI_M, PLUS),
    (PHI_P, PSI_M, MINUS): (PSI_M, MINUS),
    (PSI_P, PHI_P, MINUS): (PHI_P, MINUS),
    (PSI_P, PHI_M, MINUS): (PSI_P, PLUS),
    (PHI_M, PHI_P, PLUS): (PHI_P, PLUS),
    (PHI_M, PHI_M, PLUS): (PSI_P, MINUS),
    (PSI_M, PSI_P, PLUS): (PHI_M, MINUS),
    (PSI_M, PSI_M, PLUS): (PSI_M, PLUS),
    (PHI_M, PSI_P, MINUS): (PHI_M, PLUS),
    (PHI_M, PSI_M, MINUS): (PSI_M, MINUS),
    (PSI_M, PHI_P, MINUS): (PHI_P, MINUS),
    (PSI_M, PHI_M, MINUS): (PSI_P, PLUS),
}

# --- final block ----------------------------------------------------------------
# Columns: spatial type, polarization, time-bin, spin 2, spin 3 | arm-1 half |
# arm-2 half.  Spin 1 equals the spatial sign; the arm-2 half enters with that
# sign.  Every term carries 1/(2*sqrt(2)).
LITERAL_BLOCK4 = """
phi phi+ phi+ + +      | +a11R b11R +a12R b12R +a11L b11L +a12L b12L | +a21R b21R +a22R b22R +a22L b22L +a22L b21L
phi phi+ phi- + +      | +a11R b11L +a12R b12L +a11L b11R +a12L b12R | +a21R b21L +a21L b21R +a22R b22L +a22L b21R
phi phi+ psi+ + +      | +a11R b12R +a12R b11R -a11L b12L -a12L b11L | +a21R b22R +a22R b21R -a22L b21L -a22L b22L
phi phi+ psi- + +      | +a11R b12L +a12R b11L -a11L b12R -a12L b11R | +a21R b22L +a22R b21L -a22L b21R -a22L b22R
psi psi- phi+ + +      | +a11R b22L -a12R b21L -a12L b21R +a11L b22R | +a21R b12L -a22R b11L -a22L b11R +a21L b12R
psi psi- phi- + +      | +a11R b22R -a12R b21R -a12L b21L +a11L b22L | +a21R b12R -a22R b11R -a22L b11L +a21L b12L
psi psi- psi+ + +      | +a11R b21L -a12R b22L -a12L b22R +a11L b21R | +a21R b11L -a22R b12L -a22L b12R +a21L b11R
psi psi- psi- + +      | +a11R b21R -a12R b22R -a12L b22L +a11L b21L | +a21R b11R -a22R b12R -a22L b12L +a21L b11L
phi psi+ phi+ + -      | +a11R b12R +a12R b11R -a11L b12L -a12L b11L | +a21R b22R +a22R b21R -a22L b21L -a22L b22L
phi psi+ phi- + -      | +a11R b12L +a12R b11L -a11L b12R -a12L b11R | +a21R b22L +a22R b21L -a22L b21R -a22L b22R
phi psi+ psi+ + -      | +a11R b11R +a12R b12R +a11L b11L +a12L b12L | +a21R b21R +a22R b22R +a22L b22L +a22L b21L
phi psi+ psi- + -      | +a11R b11L +a12R b12L +a11L b11R +a12L b12R | +a21R b21L +a21L b21R +a22R b22L +a22L b21R
psi phi- phi+ + -      | +a11R b21L +a12R b22L +a12L b22R +a11L b21R | +a21R b11L +a22R b12L +a22L b12R +a21L b11R
psi phi- phi- + -      | +a11R b21R +a12R b22R +a12L b22L +a11L b21L | +a21R b11R +a22R b12R +a22L b12L +a21L b11L
psi phi- psi+ + -      | +a11R b22L -a12R b21L -a12L b21R +a11L b22R | +a21R b12L -a22R b11L -a22L b11R +a21L b12R
psi phi- psi- + -      | +a11R b22R -a12R b21R -a12L b21L +a11L b22L | +a21R b12R -a22R b11R -a22L b11L +a21L b12L
psi psi+ phi+ - +      | +a11R b22R -a12R b21R -a12L b21L +a11L b22L | +a21R b12R -a22R b11R -a22L b11L +a21L b12L
psi psi+ phi- - +      | +a11R b22L -a12R b21L -a12L b21R +a11L b22R | +a21R b12L -a22R b11L -a22L b11R +a21L b12R
psi psi+ psi+ - +      | +a11R b21R +a12R b22R +a12L b22L +a11L b21L | +a21R b11R +a22R b12R +a22L b12L +a21L b11L
psi psi+ psi- - +      | +a11R b21L +a12R b22L +a12L b22R +a11L b21R | +a21R b11L +a22R b12L +a22L b12R +a21L b11R
phi phi- phi+ - +      | +a11R b11L -a12R b12L +a11L b11R -a12L b12R | +a21R b21L +a21L b21R -a22R b22L -a22L b21R
phi phi- phi- - +      | +a11R b11R +a12R b12R +a11L b11L +a12L b12L | +a21R b21R -a22R b22R -a22L b22L +a21L b21L
phi phi- psi+ - +      | +a11R b12L -a12R b11L -a11L b12R +a12L b11R | +a21R b22L -a22R b21L +a22L b21R -a22L b22R
phi phi- psi- - +      | +a11R b12R -a12R b11R -a11L b12L +a12L b11L | +a21R b22R -a22R b21R +a22L b21L -a22L b22L
psi phi+ phi+ - -      | +a11R b21R +a12R b22R +a12L b22L +a11L b21L | +a21R b11R +a22R b12R +a22L b12L +a21L b11L
psi phi+ phi- - -      | +a11R b21L +a12R b22L +a12L b22R +a11L b21R | +a21R b11L +a22R b12L +a22L b12R +a21L b11R
psi phi+ psi+ - -      | +a11R b22R +a12R b21R -a12L b21L -a11L b22L | +a21R b12R +a22R b11R -a22L b11L -a21L b12L
psi phi+ psi- - -      | +a11R b22L +a12R b21L -a12L b21R -a11L b22R | +a21R b12L +a22R b11L -a22L b11R -a21L b12R
phi psi- phi+ - -      | +a11R b12L +a12R b11L -a11L b12R -a12L b11R | +a21R b22L +a22R b21L -a22L b21R -a22L b22R
phi psi- phi- - -      | +a11R b12R +a12R b11R -a11L b12L -a12L b11L | +a21R b22R +a22R b21R -a22L b21L -a22L b22L
phi psi- psi+ - -      | +a11R b11L -a12R b12L -a11L b11R +a12L b12R | +a21R b21L -a22R b22L -a21L b21R +a22L b22R
phi psi- psi- - -      | +a11R b11R -a12R b12R -a11L b11L +a12L b12L | +a21R b21R -a22R b22R -a21L b21L +a22L b22L
"""

# Arm-1 terms whose published sign is wrong, keyed like the table rows.
SIGN_PATCHES = {
    ("psi", "psi-", "psi+"): ("a11R:b21L", "a12R:b22L"),
    ("psi", "psi-", "psi-"): ("a11R:b21R", "a12R:b22R"),
    ("phi", "psi+", "phi+"): ("a11L:b12L", "a12L:b11L"),
    ("phi", "psi+", "phi-"): ("a11L:b12R", "a12L:b11R"),
    ("phi", "psi+", "psi+"): ("a11L:b11L", "a12L:b12L"),
    ("phi", "psi+", "psi-"): ("a11L:b11R", "a12L:b12R"),
    ("psi", "phi-", "phi+"): ("a12R:b22L", "a12L:b22R"),
    ("psi", "phi-", "phi-"): ("a12R:b22R", "a12L:b22L"),
    ("psi", "phi-", "psi+"): ("a11R:b22L", "a12R:b21L"),
    ("psi", "phi-", "psi-"): ("a11R:b22R", "a12R:b21R"),
    ("psi", "psi+", "phi+"): ("a12R:b21R", "a12L:b21L"),
    ("psi", "psi+", "phi-"): ("a12R:b21L", "a12L:b21R"),
    ("psi", "psi+", "psi+"): ("a11L:b21L", "a12L:b22L"),
    ("psi", "psi+", "psi-"): ("a11L:b21R", "a12L:b22R"),
    ("phi", "phi-", "phi-"): ("a12R:b12R", "a12L:b12L"),
    ("phi", "psi-", "phi+"): ("a11L:b12R", "a12R:b11L"),
    ("phi", "psi-", "phi-"): ("a11L:b12L", "a12R:b11R"),
}

Terms = dict  # {DetectorOutcome: +1 | -1}


@dataclass(frozen=True)
class Block4Row:
    spatial_phi: bool
    polarization: Bell
    timebin: Bell
    spin2: SpinVal
    spin3: SpinVal
    arm1: tuple  # ((DetectorOutcome, sign), ...) in published order
    arm2: tuple

    @property
    def key(self) -> tuple:
        return ("phi" if self.spatial_phi else "psi", self.polarization.value, self.timebin.value)


def _parse_terms(text: str) -> tuple:
    tokens = text.split()
    if len(tokens) % 2:
        raise ValueError(f"odd token count in {text!r}")
    out = []
    for a, b in zip(tokens[::2], tokens[1::2]):
        sign = {"+": 1, "-": -1}[a[0]]
        out.append((DetectorOutcome.parse(f"{a[1:]}:{b}"), sign))
    return tuple(out)


@lru_cache(maxsize=None)
def literal_rows() -> tuple:
    rows = []
    for line in LITERAL_BLOCK4.strip().splitlines():
        head, arm1, arm2 = line.split("|")
        s_type, pol, time, s2, s3 = head.split()
        rows.append(
            Block4Row(
                spatial_phi=s_type == "phi",
                polarization=Bell(pol),
                timebin=Bell(time),
                spin2=SpinVal(s2),
                spin3=SpinVal(s3),
                arm1=_parse_terms(arm1),
                arm2=_parse_terms(arm2),
            )
        )
    return tuple(rows)


def _mirror(outcome: DetectorOutcome) -> DetectorOutcome:
    """Arm-1 term -> arm-2 term: photon A moves to arm 2, photon B to the other arm."""
    (ma, pa), (mb, pb) = outcome
    new_a = SpatialMode("2" + ma.value[1])
    new_b = SpatialMode(("2" if mb.value[0] == "1" else "1") + mb.value[1])
    return DetectorOutcome((new_a, pa), (new_b, pb))


@lru_cache(maxsize=None)
def corrected_rows() -> tuple:
    rows = []
    for row in literal_rows():
        flips = {DetectorOutcome.parse(t) for t in SIGN_PATCHES.get(row.key, ())}
        arm1 = tuple((o, -s if o in flips else s) for o, s in row.arm1)
        arm2 = tuple((_mirror(o), s) for o, s in arm1)
        rows.append(Block4Row(row.spatial_phi, row.polarization, row.timebin, row.spin2, row.spin3, arm1, arm2))
    return tuple(rows)


def _row_index(rows: tuple) -> dict:
    return {(r.spatial_phi, r.polarization, r.timebin): r for r in rows}


def block4_row_output(row: Block4Row, spatial_sign: int, spins: Spins) -> StateVector:
    c = 1.0 / (2.0 * math.sqrt(2.0))
    amps: dict = {}
    for group, weight in ((row.arm1, 1), (row.arm2, spatial_sign)):
        for outcome, sign in group:
            (ma, pa), (mb, pb) = outcome
            key = JointBasis(
                PhotonLabel(ma, pa, TimeBin.ERASED), PhotonLabel(mb, pb, TimeBin.ERASED), tuple(spins)
            )
            amps[key] = amps.get(key, 0.0) + c * sign * weight
    return StateVector(amps, Stage.DETECTOR)


# --- public oracle ----------------------------------------------------------------


def _expect_spins(spins: Spins, wanted: Spins, where: str) -> None:
    if tuple(spins) != tuple(wanted):
        raise OracleDomainError(f"{where}: spins {spins_str(spins)} not covered (expected {spins_str(wanted)})")


def _oracle_step1(label: HyperBellLabel, spins: Spins):
    _expect_spins(spins, INITIAL_SPINS, "step 1")
    return label, (STEP1[label.spatial], PLUS, PLUS)


def _oracle_step2(label: HyperBellLabel, spins: Spins):
    _expect_spins(spins, (STEP1[label.spatial], PLUS, PLUS), "step 2")
    s, p, spin2 = STEP2[(label.spatial, label.polarization)]
    return HyperBellLabel(s, p, label.timebin), (spins[0], spin2, PLUS)


def _oracle_step3(label: HyperBellLabel, spins: Spins):
    entry = STEP3.get((label.spatial, label.polarization, spins[1]))
    if entry is None:
        raise OracleDomainError(f"step 3: {label} with spins {spins_str(spins)} not covered")
    _expect_spins(spins, (STEP1[label.spatial], spins[1], PLUS), "step 3")
    p, spin3 = entry
    return HyperBellLabel(label.spatial, p, label.timebin), (spins[0], spins[1], spin3)


_LABEL_STEPS = {1: _oracle_step1, 2: _oracle_step2, 3: _oracle_step3}


def oracle_step(
    n: int,
    entries: Mapping[tuple[HyperBellLabel, Spins], complex],
    params: CavityParams | None = None,
    corrected: bool = True,
):
    """Apply transcribed step ``n`` to a label-indexed superposition.

    Steps 1-3 return a label-indexed dict and multiply by ``d**2``.  Step 4
    returns a detector-stage :class:`StateVector`.  ``corrected=False`` uses
    the final-block table exactly as published.
    """
    if n in _LABEL_STEPS:
        d = success_amplitude(params or CavityParams.ideal())
        out: LabelState = {}
        for (label, spins), amp in entries.items():
            key = _LABEL_STEPS[n](label, tuple(spins))
            out[key] = out.get(key, 0j) + amp * d * d
        return out
    if n == 4:
        index = _row_index(corrected_rows() if corrected else literal_rows())
        total = StateVector.zero(Stage.DETECTOR)
        for (label, spins), amp in entries.items():
            row = index[(label.spatial.is_phi, label.polarization, label.timebin)]
            _expect_spins(spins, (STEP1[label.spatial], row.spin2, row.spin3), "final block")
            total = total + block4_row_output(row, label.spatial.sign, spins).scaled(amp)
        return total
    raise ValueError(f"step must be 1, 2, 3 or 4, got {n}")


def stage_entries(label: HyperBellLabel, before_step: int) -> tuple[HyperBellLabel, Spins]:
    """The unit basis entry that ``label`` becomes just before step ``before_step``."""
    entry = (label, INITIAL_SPINS)
    for n in range(1, before_step):
        (entry,) = oracle_step(n, {entry: 1.0}).keys()
    return entry


def entries_to_state(entries: Mapping[tuple[HyperBellLabel, Spins], complex]) -> StateVector:
    total = StateVector.zero(Stage.INPUT)
    for (label, spins), amp in entries.items():
        total = total + bell_product(label, spins, amp)
    return total


# --- errata -------------------------------------------------------------------------


@dataclass(frozen=True)
class Erratum:
    row_key: tuple
    spins: str
    published: tuple  # signed term strings present only in the published row
    corrected: tuple  # signed term strings present only in the corrected row
    reason: str

    def describe_input(self) -> str:
        s_type, pol, time = self.row_key
        return f"{s_type}S±, {pol[:3]}P{pol[3]}, {time[:3]}T{time[3]}"


def _signed(terms) -> set:
    return {f"{'+' if s > 0 else '-'}{o}" for o, s in terms}


def errata() -> list[Erratum]:
    """Every published final-block row that differs from the corrected table."""
    out = []
    for lit, cor in zip(literal_rows(), corrected_rows()):
        reasons = []
        if lit.key in SIGN_PATCHES:
            reasons.append("two arm-1 signs flipped")
        if _signed(lit.arm2) != _signed(tuple((_mirror(o), s) for o, s in lit.arm1)):
            reasons.append("arm-2 half re-mirrored from arm-1 half")
        before = _signed(lit.arm1) | _signed(lit.arm2)
        after = _signed(cor.arm1) | _signed(cor.arm2)
        if before == after:
            continue
        out.append(
            Erratum(
                row_key=lit.key,
                spins=f"±{lit.spin2.value}{lit.spin3.value}",
                published=tuple(sorted(before - after)),
                corrected=tuple(sorted(after - before)),
                reason="; ".join(reasons),
            )
        )
    return out


def render_errata() -> str:
    lines = [
        "# Final-block transition table: corrections",
        "",
        "The published final-block transitions are not unitary as printed:",
        "some pairs of orthogonal inputs map to the same output. The corrected",
        "table used as the reference oracle differs from the printed one in the",
        "rows below. Each row is named by its input state; spin 1 carries the",
        "spatial sign. Terms are written `a<arm><pol>:b<arm><pol>`, and the",
        "common 1/(2*sqrt(2)) factor is omitted. Arm-2 terms enter with the",
        "spatial sign.",
        "",
        "Two rules generate every correction:",
        "",
        "1. The arm-2 half of each output is the arm-1 half with photon A moved",
        "   to arm 2. Photon B also moves to arm 2 for phi-type spatial inputs,",
        "   and to arm 1 for psi-type ones.",
        "2. In 17 rows, two arm-1 terms carry the wrong sign, and so do their",
        "   arm-2 mirrors.",
        "",
        "This file is generated by `hbsa.analyzer.oracle.render_errata()`. The",
        "test suite checks that it is current.",
        "",
        "| input | spins | printed (removed) | corrected (added) | fix |",
        "|---|---|---|---|---|",
    ]
    for e in errata():
        lines.append(
            f"| {e.describe_input()} | {e.spins} | {' '.join(e.published)} | {' '.join(e.corrected)} | {e.reason} |"
        )
    lines.append("")
    return "\n".join(lines)


__all__ = [
    "STEP1",
    "STEP2",
    "STEP3",
    "LITERAL_BLOCK4",
    "SIGN_PATCHES",
    "Block4Row",
    "Erratum",
    "OracleDomainError",
    "corrected_rows",
    "entries_to_state",
    "errata",
    "literal_rows",
    "oracle_step",
    "render_errata",
    "stage_entries",
]
