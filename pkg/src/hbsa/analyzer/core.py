"""End-to-end analysis of single labels and verification of the full table."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

from hbsa.analyzer.classtable import classification_index, expected_entries, format_row, sort_signatures
from hbsa.analyzer.oracle import entries_to_state, oracle_step, stage_entries
from hbsa.analyzer.pipeline import StepLedger, block4, step1, step2, step3
from hbsa.emitter import CavityParams, block_gain, success_amplitude
from hbsa.errors import NonPhysicalParametersWarning, ProtocolViolationError, UnclassifiableError
from hbsa.hilbert import (
    COMPARE_TOL,
    DetectorOutcome,
    HyperBellLabel,
    Spins,
    StateVector,
    equal_up_to_global_phase,
    make_hyper_bell,
    outcome_distribution,
    spins_str,
    state_fidelity,
)

# Conditional probabilities below this count as unreachable.
REACH_TOL = 1e-10


@dataclass(frozen=True)
class HeraldLedger:
    """Click probabilities of the three step detectors plus unmonitored loss."""

    p_D1: float = 0.0
    p_D2: float = 0.0
    p_D3: float = 0.0
    p_loss: float = 0.0

    @classmethod
    def from_steps(cls, s1: StepLedger, s2: StepLedger, s3: StepLedger) -> "HeraldLedger":
        return cls(s1.herald, s2.herald, s3.herald, s1.loss + s2.loss + s3.loss)

    def total(self) -> float:
        return math.fsum((self.p_D1, self.p_D2, self.p_D3, self.p_loss))

    def closure_error(self, p_success: float) -> float:
        return abs(self.total() + p_success - 1.0)


@dataclass
class AnalysisReport:
    input: HyperBellLabel
    params: CavityParams
    ledger: HeraldLedger
    success_probability: float
    conditional_outcomes: dict  # (DetectorOutcome, spins) -> probability
    classified: HyperBellLabel | None
    conditional_fidelity: float | None
    final_state: StateVector = field(repr=False)

    @property
    def spins(self) -> Spins | None:
        readouts = {spins for _, spins in self.conditional_outcomes}
        return readouts.pop() if len(readouts) == 1 else None

    @property
    def signatures(self) -> list[DetectorOutcome]:
        return sort_signatures(sig for sig, _ in self.conditional_outcomes)


def classify(spins: Spins, signature: DetectorOutcome) -> HyperBellLabel:
    """Look up the label that produces ``signature`` under spin readout ``spins``."""
    try:
        return classification_index()[(tuple(spins), signature)]
    except KeyError:
        raise UnclassifiableError(f"no label yields {signature} with spins {spins_str(spins)}") from None


def run_pipeline(label: HyperBellLabel, params: CavityParams) -> tuple[StateVector, HeraldLedger]:
    state = make_hyper_bell(label)
    state, l1 = step1(state, params)
    state, l2 = step2(state, params)
    state, l3 = step3(state, params)
    return block4(state), HeraldLedger.from_steps(l1, l2, l3)


@lru_cache(maxsize=None)
def ideal_output(label: HyperBellLabel) -> StateVector:
    return run_pipeline(label, CavityParams.ideal())[0]


def analyze(label: HyperBellLabel, params: CavityParams, check: bool = True) -> AnalysisReport:
    """Run one hyper-Bell state through the analyzer.

    With ``check`` set, every reachable outcome must classify back to
    ``label``; otherwise :class:`ProtocolViolationError` is raised.
    """
    if block_gain(params) > 1 + 1e-12:
        warnings.warn(
            f"|d|^2+|f|^2 = {block_gain(params):.6g} > 1 at {params}; ledger loss may be negative",
            NonPhysicalParametersWarning,
            stacklevel=2,
        )
    final, ledger = run_pipeline(label, params)
    p_success = final.norm_sq()
    conditional: dict = {}
    classified = None
    fidelity = None
    if p_success > 0.0:
        conditional = {
            k: v / p_success for k, v in outcome_distribution(final).items() if v / p_success > REACH_TOL
        }
        fidelity = state_fidelity(final, ideal_output(label))
        found = set()
        for sig, spins in conditional:
            try:
                found.add(classify(spins, sig))
            except UnclassifiableError as exc:
                if check:
                    raise ProtocolViolationError(f"{label}: {exc}") from None
                found.add(None)
        if len(found) == 1:
            classified = found.pop()
        if check and classified != label:
            raise ProtocolViolationError(
                f"{label}: outcomes classify to {classified or sorted(map(str, found))}"
            )
    return AnalysisReport(label, params, ledger, p_success, conditional, classified, fidelity, final)


# --- oracle equivalence ---------------------------------------------------------------

_STEPS = {1: step1, 2: step2, 3: step3}


@dataclass(frozen=True)
class OracleMismatch:
    step: int
    label: HyperBellLabel
    message: str


def check_oracle_equivalence(params: CavityParams, tol: float = COMPARE_TOL, labels=None) -> list[OracleMismatch]:
    """Compare element-level steps with the transcribed maps on unit inputs.

    For each label, the input of step ``n`` is the single Bell-product entry
    the label becomes after steps ``1..n-1``.
    """
    failures = []
    for label in labels or [entry[0] for entry in expected_entries()]:
        for n in (1, 2, 3, 4):
            entry = stage_entries(label, n)
            state = entries_to_state({entry: 1.0})
            if n == 4:
                got, want = block4(state), oracle_step(4, {entry: 1.0})
            else:
                got = _STEPS[n](state, params)[0]
                want = entries_to_state(oracle_step(n, {entry: 1.0}, params))
            if not want and not got:
                continue
            if (
                not want
                or not got
                or abs(got.norm() - want.norm()) > tol
                or not equal_up_to_global_phase(got, want, tol)
            ):
                label_in, spins = entry
                msg = f"step {n}: {label_in} |{spins_str(spins)}> (from {label}) differs from the reference map"
                failures.append(OracleMismatch(n, label, msg))
    return failures


# --- full-table verification --------------------------------------------------------------


@dataclass
class TableEntry:
    label: HyperBellLabel
    spins: Spins | None
    signatures: tuple
    verified: bool

    def render(self) -> str:
        if self.spins is None:
            return f"{self.label} | ??? | {' '.join(str(s) for s in self.signatures)}"
        return format_row(self.label, self.spins, self.signatures)


@dataclass
class VerificationReport:
    params: CavityParams
    status: str  # "verified" | "failed" | "skipped"
    verified: int
    total: int
    ambiguities: int
    success_probability: float
    entries: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status != "failed"

    def summary(self) -> str:
        if self.status == "skipped":
            return "skipped: degenerate parameters (d = 0, success probability 0); signature checks not run"
        return f"{self.verified}/{self.total} verified, {self.ambiguities} ambiguities"

    def render_table(self) -> str:
        return "".join(e.render() + "\n" for e in self.entries)


def verify_table(params: CavityParams, tol: float = COMPARE_TOL) -> VerificationReport:
    """Analyze all 64 labels and cross-check against the classification table."""
    expected = expected_entries()
    if success_amplitude(params) == 0:
        return VerificationReport(params, "skipped", 0, len(expected), 0, 0.0)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonPhysicalParametersWarning)
        reports = [analyze(label, params, check=False) for label, _, _ in expected]
    if any(r.success_probability == 0.0 for r in reports):
        return VerificationReport(params, "skipped", 0, len(expected), 0, 0.0)

    failures: list[str] = []
    bad: set = set()
    owners: dict = {}
    for r in reports:
        for key in r.conditional_outcomes:
            owners.setdefault(key, []).append(r.input)
    ambiguous = {k: v for k, v in owners.items() if len(v) > 1}
    for (sig, spins), labels in sorted(ambiguous.items()):
        failures.append(f"ambiguous outcome {sig} |{spins_str(spins)}>: {', '.join(map(str, labels))}")
        bad.update(labels)

    entries = []
    for r, (label, spins, sigs) in zip(reports, expected):
        got = set(r.conditional_outcomes)
        want = {(sig, spins) for sig in sigs}
        if got != want:
            bad.add(label)
            extra = sorted(f"{s}|{spins_str(sp)}" for s, sp in got - want)
            missing = sorted(f"{s}|{spins_str(sp)}" for s, sp in want - got)
            failures.append(f"{label}: unexpected {extra or '[]'}, missing {missing or '[]'}")
        for (sig, sp), prob in r.conditional_outcomes.items():
            if abs(prob - 1 / len(sigs)) > tol:
                bad.add(label)
                failures.append(f"{label}: {sig} has conditional probability {prob:.12g}, expected {1/len(sigs):.12g}")
        try:
            cls = {classify(sp, sig) for sig, sp in r.conditional_outcomes}
        except UnclassifiableError as exc:
            cls = {None}
            failures.append(f"{label}: {exc}")
        if cls != {label}:
            bad.add(label)
        entries.append(TableEntry(label, r.spins, tuple(r.signatures), label not in bad))

    for mismatch in check_oracle_equivalence(params, tol):
        failures.append(mismatch.message)
        bad.add(mismatch.label)

    # Spin-group unions follow from the per-label sets, but are checked directly too.
    by_group_got: dict = {}
    by_group_want: dict = {}
    for r, (label, spins, sigs) in zip(reports, expected):
        for key in r.conditional_outcomes:
            by_group_got.setdefault(key[1], set()).add(key[0])
        by_group_want.setdefault(spins, set()).update(sigs)
    for spins in sorted(set(by_group_got) | set(by_group_want)):
        if by_group_got.get(spins) != by_group_want.get(spins):
            failures.append(f"spin group {spins_str(spins)}: reachable signatures differ from the table")

    verified = sum(1 for e in entries if e.verified)
    status = "verified" if not failures and verified == len(expected) else "failed"
    return VerificationReport(
        params,
        status,
        verified,
        len(expected),
        len(ambiguous),
        reports[0].success_probability,
        entries,
        failures,
    )
