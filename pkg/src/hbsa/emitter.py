"""Quantum-dot cavity reflection physics and the heralded block operator.

All rates are in units of the cavity decay rate, so ``kappa`` defaults to 1.
Frequencies enter only through the detunings ``omega_c - omega`` and
``omega_x - omega``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass
from typing import Callable

from hbsa.errors import InvalidParametersError, StageMismatchError
from hbsa.hilbert import JointBasis, Photon, PhotonLabel, Stage, StateVector

Selector = Callable[[PhotonLabel], bool]


@dataclass(frozen=True)
class CavityParams:
    """Knobs of one QD-cavity block; every block in the analyzer shares them."""

    g: float = 1.0
    kappa: float = 1.0
    kappa_s: float = 0.0
    gamma: float = 0.0
    omega_c: float = 0.0
    omega_x: float = 0.0
    omega: float = 0.0
    p: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise InvalidParametersError(f"{name} must be finite, got {value}")
        if self.kappa <= 0:
            raise InvalidParametersError(f"kappa must be > 0, got {self.kappa}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParametersError(f"p must lie in [0, 1], got {self.p}")
        for name in ("g", "kappa_s", "gamma"):
            if getattr(self, name) < 0:
                raise InvalidParametersError(f"{name} must be >= 0, got {getattr(self, name)}")

    @classmethod
    def ideal(cls) -> "CavityParams":
        """Lossless resonant operating point where d = 1 and f = 0 exactly."""
        return cls()

    @property
    def detuning_c(self) -> float:
        return self.omega_c - self.omega

    @property
    def detuning_x(self) -> float:
        return self.omega_x - self.omega

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ReflectionPair:
    r_h: complex
    r_0: complex


def reflection_hot(params: CavityParams) -> complex:
    """Reflection coefficient of the cavity with the dot coupled."""
    if params.g == 0:
        # The exciton factor cancels; this also covers the 0/0 point at gamma = 0.
        return reflection_cold(params)
    k = params.kappa
    exciton = 1j * params.detuning_x + params.gamma / 2
    if exciton == 0:
        # Resonant lossless dot: the coupling term diverges and r_h -> 1 for any g > 0.
        return 1 + 0j
    cavity = 1j * params.detuning_c + k / 2 + params.kappa_s / 2
    # g * (g / exciton) avoids underflow of g^2 and of exciton * cavity.  The
    # denominator has real part >= kappa/2, so it never vanishes.
    coupling = params.g * (params.g / exciton)
    if not cmath.isfinite(coupling):
        return 1 + 0j
    return 1 - k / (cavity + coupling)


def reflection_cold(params: CavityParams) -> complex:
    """Reflection coefficient of the empty cavity (g = 0)."""
    k = params.kappa
    return (1j * params.detuning_c - k / 2 + params.kappa_s / 2) / (
        1j * params.detuning_c + k / 2 + params.kappa_s / 2
    )


def reflections(params: CavityParams) -> ReflectionPair:
    return ReflectionPair(reflection_hot(params), reflection_cold(params))


def success_amplitude(params: CavityParams) -> complex:
    """d = (p/2)(r_h - r_0): amplitude kept when the block flips the spin."""
    return params.p / 2 * (reflection_hot(params) - reflection_cold(params))


def herald_amplitude(params: CavityParams) -> complex:
    """f = (p/2)(r_h + r_0) + sqrt(1 - p^2); the block sends -f to its detector."""
    return params.p / 2 * (reflection_hot(params) + reflection_cold(params)) + math.sqrt(1 - params.p**2)


def block_gain(params: CavityParams) -> float:
    """|d|^2 + |f|^2.  Above 1 the block formulas create probability."""
    return abs(success_amplitude(params)) ** 2 + abs(herald_amplitude(params)) ** 2


def is_physical(params: CavityParams, tol: float = 1e-12) -> bool:
    return block_gain(params) <= 1 + tol


def block_apply(
    state: StateVector,
    qd_index: int,
    photon: Photon,
    selector: Selector,
    params: CavityParams,
) -> tuple[StateVector, float]:
    """Pass the selected components of one photon through block ``qd_index``.

    Selected components keep their photon label, flip spin ``qd_index`` and
    pick up ``d``.  The herald branch (amplitude ``-f``, polarization flipped,
    spin kept) is removed and its squared norm returned.  Unselected
    components pass unchanged.
    """
    if qd_index not in (1, 2, 3):
        raise ValueError(f"qd_index must be 1, 2 or 3, got {qd_index}")
    if state.stage is not Stage.INPUT:
        raise StageMismatchError("blocks act before the final detection block")
    d = success_amplitude(params)
    f = herald_amplitude(params)
    slot = qd_index - 1
    kept: dict[JointBasis, complex] = {}
    herald: dict[JointBasis, complex] = {}
    for key, amp in state.items():
        label = key.photon(photon)
        if not selector(label):
            kept[key] = kept.get(key, 0j) + amp
            continue
        spins = list(key.spins)
        spins[slot] = spins[slot].flipped()
        ok = JointBasis(key.a, key.b, tuple(spins))
        kept[ok] = kept.get(ok, 0j) + d * amp
        flipped = key.with_photon(photon, label._replace(pol=label.pol.flipped()))
        herald[flipped] = herald.get(flipped, 0j) - f * amp
    herald_state = StateVector._trusted(herald, Stage.INPUT, prune=0.0)
    return StateVector._trusted(kept, Stage.INPUT), herald_state.norm_sq()
