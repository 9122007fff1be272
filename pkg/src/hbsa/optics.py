"""Linear optical elements acting on a single photon's labels.

Each element is defined by its truth table on basis labels and extended by
linearity through :meth:`StateVector.map_photon`.
"""
from __future__ import annotations

from enum import Enum
from typing import Callable, Mapping

from hbsa.errors import ModeCollisionError, StageMismatchError
from hbsa.hilbert import (
    SQRT1_2,
    Photon,
    PhotonLabel,
    Polarization,
    SpatialMode,
    Stage,
    StateVector,
    TimeBin,
)

R, L = Polarization.R, Polarization.L


class HwpAngle(Enum):
    DEG_22_5 = 22.5
    DEG_67_5 = 67.5
    DEG_112_5 = 112.5


# Images of R and L as {pol: coefficient}.
_HWP_TABLES = {
    HwpAngle.DEG_22_5: {R: {R: SQRT1_2, L: SQRT1_2}, L: {R: SQRT1_2, L: -SQRT1_2}},
    HwpAngle.DEG_67_5: {R: {R: -SQRT1_2, L: SQRT1_2}, L: {R: SQRT1_2, L: SQRT1_2}},
    HwpAngle.DEG_112_5: {R: {R: -SQRT1_2, L: -SQRT1_2}, L: {R: -SQRT1_2, L: SQRT1_2}},
}


def _require_input_stage(state: StateVector, element: str) -> None:
    if state.stage is not Stage.INPUT:
        raise StageMismatchError(f"{element} acts on input-arm labels only")


def beam_splitter(state: StateVector, photon: Photon) -> StateVector:
    """50:50 beam splitter: a Hadamard on the two input arms."""
    _require_input_stage(state, "beam splitter")

    def rule(label: PhotonLabel):
        sign = 1.0 if label.mode is SpatialMode.ARM1 else -1.0
        yield label._replace(mode=SpatialMode.ARM1), SQRT1_2
        yield label._replace(mode=SpatialMode.ARM2), sign * SQRT1_2

    return state.map_photon(photon, rule)


def pbs_route(
    state: StateVector,
    photon: Photon,
    routing: Mapping[tuple[SpatialMode, Polarization], SpatialMode],
) -> StateVector:
    """Relabel spatial modes by ``(mode, pol) -> mode``; unlisted pairs stay put."""
    occupied = {(k.photon(photon).mode, k.photon(photon).pol) for k in state}
    targets: dict[tuple[SpatialMode, Polarization], tuple] = {}
    for mode, pol in occupied:
        target = (routing.get((mode, pol), mode), pol)
        if target in targets:
            raise ModeCollisionError(
                f"routing sends both {targets[target]} and {(mode, pol)} to {target}"
            )
        targets[target] = (mode, pol)

    def rule(label: PhotonLabel):
        yield label._replace(mode=routing.get((label.mode, label.pol), label.mode)), 1.0

    return state.map_photon(photon, rule)


def hwp(state: StateVector, photon: Photon, angle: HwpAngle) -> StateVector:
    """Half-wave plate at one of the three angles used by the scheme."""
    table = _HWP_TABLES[HwpAngle(angle)]

    def rule(label: PhotonLabel):
        for pol, coeff in table[label.pol].items():
            yield label._replace(pol=pol), coeff

    return state.map_photon(photon, rule)


def pockels(state: StateVector, photon: Photon, bin: TimeBin | str) -> StateVector:
    """Pockels cell gated on one time bin: swaps R and L in that bin only."""
    gate = TimeBin(bin)
    if gate is TimeBin.ERASED:
        raise ValueError("a Pockels cell is gated on 's' or 'l'")
    if any(k.photon(photon).time is TimeBin.ERASED for k in state):
        raise StageMismatchError("Pockels cell needs a photon with a live time-bin")

    def rule(label: PhotonLabel):
        if label.time is gate:
            yield label._replace(pol=label.pol.flipped()), 1.0
        else:
            yield label, 1.0

    return state.map_photon(photon, rule)


def wfc(
    state: StateVector,
    photon: Photon,
    selector: Callable[[PhotonLabel], bool],
    amplitude: complex,
) -> StateVector:
    """Wave-form corrector: scales selected components by ``amplitude``."""

    def rule(label: PhotonLabel):
        yield label, (amplitude if selector(label) else 1.0)

    return state.map_photon(photon, rule)
