"""Element-level circuit: the three QD steps and the final detection block.

Each step returns the surviving (sub-normalized) state plus a
:class:`StepLedger` with what its detector heard and what leaked away.  The
wave-form corrector is a passive attenuator by ``d``; the weight it removes is
booked like the paired block (``|f|^2`` to the step detector, the rest lost).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from hbsa.emitter import CavityParams, block_apply, herald_amplitude, success_amplitude
from hbsa.errors import StageMismatchError
from hbsa.hilbert import (
    SQRT1_2,
    JointBasis,
    Photon,
    PhotonLabel,
    Polarization,
    SpatialMode,
    Stage,
    StateVector,
    TimeBin,
)
from hbsa.optics import HwpAngle, beam_splitter, hwp, pbs_route, wfc

R, L = Polarization.R, Polarization.L
ARM1, ARM2 = SpatialMode.ARM1, SpatialMode.ARM2

# L swaps arms, R keeps its arm.
ARM_EXCHANGE = {(ARM1, L): ARM2, (ARM2, L): ARM1}


@dataclass(frozen=True)
class StepLedger:
    herald: float = 0.0
    loss: float = 0.0

    def __add__(self, other: "StepLedger") -> "StepLedger":
        return StepLedger(self.herald + other.herald, self.loss + other.loss)


def _weight(state: StateVector, photon: Photon, selector: Callable[[PhotonLabel], bool]) -> float:
    return math.fsum(abs(a) ** 2 for k, a in state.items() if selector(k.photon(photon)))


def _interact(state, qd_index, photon, block_port, params) -> tuple[StateVector, StepLedger]:
    """Block on ``block_port`` components, wave-form corrector on the rest."""
    d = success_amplitude(params)
    f2 = abs(herald_amplitude(params)) ** 2
    leak = 1.0 - abs(d) ** 2 - f2

    def bypass(label):
        return not block_port(label)

    w_block = _weight(state, photon, block_port)
    state, herald = block_apply(state, qd_index, photon, block_port, params)
    w_bypass = _weight(state, photon, bypass)
    state = wfc(state, photon, bypass, d)
    return state, StepLedger(herald + w_bypass * f2, (w_block + w_bypass) * leak)


def _in_arm1(label: PhotonLabel) -> bool:
    return label.mode is ARM1


def _in_arm2(label: PhotonLabel) -> bool:
    return label.mode is ARM2


def _parity_port(label: PhotonLabel) -> bool:
    # After the 22.5 deg plate the split PBS feeds block 3 with L from arm 1
    # and R from arm 2; the merge PBS recombines both ports unchanged.
    return (label.pol is L) != (label.mode is ARM2)


def _require_input(state: StateVector) -> None:
    if state.stage is not Stage.INPUT:
        raise StageMismatchError("QD steps act before the final detection block")


def step1(state: StateVector, params: CavityParams) -> tuple[StateVector, StepLedger]:
    """Spatial parity onto QD 1: BS, block 1 on arm 1 (corrector on arm 2), BS."""
    _require_input(state)
    total = StepLedger()
    for photon in Photon:
        state = beam_splitter(state, photon)
        state, ledger = _interact(state, 1, photon, _in_arm1, params)
        state = beam_splitter(state, photon)
        total += ledger
    return state, total


def step2(state: StateVector, params: CavityParams) -> tuple[StateVector, StepLedger]:
    """Spatial type onto QD 2: block 2 on arm 2, then the arm-exchange PBS."""
    _require_input(state)
    total = StepLedger()
    for photon in Photon:
        state, ledger = _interact(state, 2, photon, _in_arm2, params)
        state = pbs_route(state, photon, ARM_EXCHANGE)
        total += ledger
    return state, total


def step3(state: StateVector, params: CavityParams) -> tuple[StateVector, StepLedger]:
    """Polarization parity onto QD 3 behind a 22.5 deg half-wave plate."""
    _require_input(state)
    total = StepLedger()
    for photon in Photon:
        state = hwp(state, photon, HwpAngle.DEG_22_5)
        state, ledger = _interact(state, 3, photon, _parity_port, params)
        total += ledger
    return state, total


# Single-photon map of the final block, identical on both input arms k:
# (pol, time) -> [(output port j, output pol, coefficient)].  Port j leads to
# detector arm "kj".  The port records the parity of polarization and time-bin,
# the output polarization their +/- basis correlation.
BLOCK4_MAP = {
    (R, TimeBin.LONG): ((1, R, SQRT1_2), (1, L, SQRT1_2)),
    (R, TimeBin.SHORT): ((2, R, SQRT1_2), (2, L, -SQRT1_2)),
    (L, TimeBin.LONG): ((2, R, SQRT1_2), (2, L, SQRT1_2)),
    (L, TimeBin.SHORT): ((1, R, SQRT1_2), (1, L, -SQRT1_2)),
}


def block4_photon_images(label: PhotonLabel) -> list[tuple[PhotonLabel, float]]:
    if label.mode.is_detector or label.time is TimeBin.ERASED:
        raise StageMismatchError(f"final block needs an input-arm label, got {label}")
    return [
        (PhotonLabel(SpatialMode.detector(label.mode, j), pol, TimeBin.ERASED), c)
        for j, pol, c in BLOCK4_MAP[(label.pol, label.time)]
    ]


def block4(state: StateVector) -> StateVector:
    """Erase the time-bin into detector port and polarization for both photons."""
    _require_input(state)
    cache: dict = {}

    def images(label):
        if label not in cache:
            cache[label] = block4_photon_images(label)
        return cache[label]

    def rule(key: JointBasis):
        for la, ca in images(key.a):
            for lb, cb in images(key.b):
                yield JointBasis(la, lb, key.spins), ca * cb

    return state.map_terms(rule, stage=Stage.DETECTOR)
