"""Fidelity, closed-form efficiency, parameter sweeps and Monte Carlo sampling."""
from __future__ import annotations

import dataclasses
import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from hbsa.analyzer import AnalysisReport, analyze
from hbsa.emitter import CavityParams, success_amplitude
from hbsa.errors import NonPhysicalParametersWarning, ProtocolViolationError
from hbsa.hilbert import ALL_LABELS, HyperBellLabel, StateVector, outcome_distribution, spins_str, state_fidelity

SWEEP_AXES = ("g", "kappa_s", "gamma", "p")
REPRESENTATIVE_LABEL = ALL_LABELS[0]  # phiS+, phiP+, phiT+
RNG_ALGORITHM = "numpy.PCG64/multinomial"
HERALD_OUTCOMES = ("D1", "D2", "D3", "loss")

# Artifact choices for sweeps when no range is given.
DEFAULT_RANGES = {
    "g": (0.0, 5.0, 0.25),
    "kappa_s": (0.0, 1.0, 0.05),
    "gamma": (0.0, 1.0, 0.05),
    "p": (0.0, 1.0, 0.05),
}


def fidelity(actual: StateVector, ideal: StateVector) -> float:
    """F = |<actual|ideal>|^2 over normalized states."""
    return state_fidelity(actual, ideal)


def efficiency_formula(params: CavityParams) -> float:
    """Closed-form success probability |d|^12 (six block passes, two photons)."""
    return abs(success_amplitude(params)) ** 12


# --- sweeps ------------------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    @classmethod
    def from_range(cls, name: str, start: float, stop: float, step: float) -> "Axis":
        if step <= 0:
            raise ValueError(f"axis {name}: step must be > 0, got {step}")
        if start > stop:
            raise ValueError(f"axis {name}: start {start} exceeds stop {stop}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return cls(name, tuple(round(start + i * step, 12) for i in range(count)))

    @classmethod
    def default(cls, name: str) -> "Axis":
        return cls.from_range(name, *DEFAULT_RANGES[name])


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple
    fixed: CavityParams = field(default_factory=CavityParams.ideal)
    strict: bool = False

    def __post_init__(self):
        names = [a.name for a in self.axes]
        unknown = [n for n in names if n not in SWEEP_AXES]
        if unknown:
            raise ValueError(f"unknown sweep axis {unknown[0]!r}; choose from {', '.join(SWEEP_AXES)}")
        if len(set(names)) != len(names):
            raise ValueError("sweep axes must name distinct parameters")
        for axis in self.axes:
            if not axis.values:
                raise ValueError(f"axis {axis.name} has no values")
            if list(axis.values) != sorted(axis.values):
                raise ValueError(f"axis {axis.name} values must be ascending")
        # Validate every grid corner up front rather than mid-sweep.
        for point in itertools.product(*[(a.values[0], a.values[-1]) for a in self.axes]):
            self._params(point)

    def _params(self, point) -> CavityParams:
        return dataclasses.replace(self.fixed, **{a.name: v for a, v in zip(self.axes, point)})

    def grid(self):
        for point in itertools.product(*[a.values for a in self.axes]):
            yield self._params(point)


@dataclass(frozen=True)
class SweepRow:
    g_over_kappa: float
    kappa_s_over_kappa: float
    gamma_over_kappa: float
    p: float
    eta_formula: float
    eta_sim: float
    p_D1: float
    p_D2: float
    p_D3: float
    p_loss: float

    COLUMNS = (
        "g_over_kappa",
        "kappa_s_over_kappa",
        "gamma_over_kappa",
        "p",
        "eta_formula",
        "eta_sim",
        "p_D1",
        "p_D2",
        "p_D3",
        "p_loss",
    )

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in self.COLUMNS)


def sweep_point(params: CavityParams, strict: bool = False) -> SweepRow:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonPhysicalParametersWarning)
        report = analyze(REPRESENTATIVE_LABEL, params, check=False)
        if strict:
            for label in ALL_LABELS[1:]:
                other = analyze(label, params, check=False).success_probability
                if abs(other - report.success_probability) > 1e-10:
                    raise ProtocolViolationError(
                        f"{label} succeeds with {other:.12g}, representative with {report.success_probability:.12g}"
                    )
    k = params.kappa
    led = report.ledger
    return SweepRow(
        params.g / k,
        params.kappa_s / k,
        params.gamma / k,
        params.p,
        efficiency_formula(params),
        report.success_probability,
        led.p_D1,
        led.p_D2,
        led.p_D3,
        led.p_loss,
    )


def sweep(spec: SweepSpec) -> list[SweepRow]:
    """One row per grid point, in lexicographic axis order."""
    return [sweep_point(params, spec.strict) for params in spec.grid()]


# --- sampling -------------------------------------------------------------------------


def outcome_key(signature, spins) -> str:
    return f"{signature}|{spins_str(spins)}"


def outcome_probabilities(report: AnalysisReport) -> dict[str, float]:
    """Exact distribution over success clicks, the three heralds and loss.

    Keys are ``"a11R:b22R|-++"`` (signature, then spin readout) or one of
    ``D1``, ``D2``, ``D3``, ``loss``; order is canonical.
    """
    probs = {outcome_key(sig, spins): p for (sig, spins), p in outcome_distribution(report.final_state).items()}
    led = report.ledger
    probs.update(zip(HERALD_OUTCOMES, (led.p_D1, led.p_D2, led.p_D3, led.p_loss)))
    return probs


def sample(report: AnalysisReport, shots: int, seed: int) -> dict[str, int]:
    """Draw ``shots`` i.i.d. outcomes of one analysis run; deterministic in ``seed``."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = outcome_probabilities(report)
    keys = list(probs)
    p = np.array([probs[k] for k in keys], dtype=float)
    if (p < -1e-12).any():
        bad = [k for k, v in probs.items() if v < -1e-12]
        raise ValueError(f"negative outcome probability for {bad}; parameters are outside the physical regime")
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = rng.multinomial(shots, p)
    return {k: int(c) for k, c in zip(keys, counts)}


def label_report(label: HyperBellLabel | str, params: CavityParams) -> AnalysisReport:
    if isinstance(label, str):
        label = HyperBellLabel.parse(label)
    return analyze(label, params)
