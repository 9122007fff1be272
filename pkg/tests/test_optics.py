import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbsa.errors import ModeCollisionError, StageMismatchError
from hbsa.hilbert import (
    INITIAL_SPINS,
    JointBasis,
    Photon,
    PhotonLabel,
    Polarization,
    SpatialMode,
    StateVector,
    TimeBin,
    inner_product,
)
from hbsa.optics import HwpAngle, beam_splitter, hwp, pbs_route, pockels, wfc

R, L = Polarization.R, Polarization.L
A1, A2 = SpatialMode.ARM1, SpatialMode.ARM2
INPUT_LABELS = [
    PhotonLabel(m, p, t) for m, p, t in itertools.product((A1, A2), (R, L), (TimeBin.LONG, TimeBin.SHORT))
]
BASIS = [JointBasis(a, b, INITIAL_SPINS) for a, b in itertools.product(INPUT_LABELS, repeat=2)]

amplitude_st = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)
state_st = st.lists(amplitude_st, min_size=len(BASIS), max_size=len(BASIS)).map(
    lambda amps: StateVector(dict(zip(BASIS, amps)))
).filter(lambda s: s.norm_sq() > 1e-6)

ELEMENTS = {
    "bs": lambda s, ph: beam_splitter(s, ph),
    "hwp22": lambda s, ph: hwp(s, ph, HwpAngle.DEG_22_5),
    "hwp67": lambda s, ph: hwp(s, ph, HwpAngle.DEG_67_5),
    "hwp112": lambda s, ph: hwp(s, ph, HwpAngle.DEG_112_5),
    "pc_l": lambda s, ph: pockels(s, ph, "l"),
    "pc_s": lambda s, ph: pockels(s, ph, TimeBin.SHORT),
    "pbs_swap_L": lambda s, ph: pbs_route(s, ph, {(A1, L): A2, (A2, L): A1}),
}


def single(label_a, label_b=None, amp=1.0):
    label_b = label_b or PhotonLabel(A1, R, TimeBin.LONG)
    return StateVector({JointBasis(label_a, label_b, INITIAL_SPINS): amp})


@pytest.mark.parametrize("name", sorted(ELEMENTS))
@settings(max_examples=20, deadline=None)
@given(state_st, state_st, st.sampled_from(list(Photon)))
def test_elements_preserve_inner_products(name, s1, s2, photon):
    op = ELEMENTS[name]
    assert abs(inner_product(op(s1, photon), op(s2, photon)) - inner_product(s1, s2)) < 1e-10


def test_beam_splitter_is_hadamard():
    h = 1 / math.sqrt(2)
    out = beam_splitter(single(PhotonLabel(A2, R, TimeBin.LONG)), Photon.A)
    b = PhotonLabel(A1, R, TimeBin.LONG)
    assert out.amplitude(JointBasis(PhotonLabel(A1, R, TimeBin.LONG), b, INITIAL_SPINS)) == pytest.approx(h)
    assert out.amplitude(JointBasis(PhotonLabel(A2, R, TimeBin.LONG), b, INITIAL_SPINS)) == pytest.approx(-h)


@pytest.mark.parametrize(
    "angle,pol,want",
    [
        (HwpAngle.DEG_22_5, R, {R: 1, L: 1}),
        (HwpAngle.DEG_22_5, L, {R: 1, L: -1}),
        (HwpAngle.DEG_67_5, R, {R: -1, L: 1}),
        (HwpAngle.DEG_67_5, L, {R: 1, L: 1}),
        (HwpAngle.DEG_112_5, R, {R: -1, L: -1}),
        (HwpAngle.DEG_112_5, L, {R: -1, L: 1}),
    ],
)
def test_hwp_truth_tables(angle, pol, want):
    out = hwp(single(PhotonLabel(A1, pol, TimeBin.SHORT)), Photon.A, angle)
    b = PhotonLabel(A1, R, TimeBin.LONG)
    for p, sign in want.items():
        key = JointBasis(PhotonLabel(A1, p, TimeBin.SHORT), b, INITIAL_SPINS)
        assert out.amplitude(key) == pytest.approx(sign / math.sqrt(2))


def test_pockels_flips_only_gated_bin():
    long_r = PhotonLabel(A1, R, TimeBin.LONG)
    short_r = PhotonLabel(A1, R, TimeBin.SHORT)
    out = pockels(single(long_r) + single(short_r), Photon.A, "l")
    b = PhotonLabel(A1, R, TimeBin.LONG)
    assert set(out) == {
        JointBasis(long_r._replace(pol=L), b, INITIAL_SPINS),
        JointBasis(short_r, b, INITIAL_SPINS),
    }


def test_pockels_rejects_erased_gate():
    with pytest.raises(ValueError):
        pockels(single(PhotonLabel(A1, R, TimeBin.LONG)), Photon.A, TimeBin.ERASED)


def test_pbs_collision_rejected():
    state = single(PhotonLabel(A1, L, TimeBin.LONG)) + single(PhotonLabel(A2, L, TimeBin.LONG))
    with pytest.raises(ModeCollisionError):
        pbs_route(state, Photon.A, {(A1, L): A2})


def test_wfc_scales_selected_components():
    inside = PhotonLabel(A1, R, TimeBin.LONG)
    outside = PhotonLabel(A2, R, TimeBin.LONG)
    out = wfc(single(inside) + single(outside), Photon.A, lambda lab: lab.mode is A1, 0.5)
    b = PhotonLabel(A1, R, TimeBin.LONG)
    assert out.amplitude(JointBasis(inside, b, INITIAL_SPINS)) == pytest.approx(0.5)
    assert out.amplitude(JointBasis(outside, b, INITIAL_SPINS)) == pytest.approx(1.0)


def test_beam_splitter_rejects_detector_stage():
    det = PhotonLabel(SpatialMode.D11, R, TimeBin.ERASED)
    with pytest.raises(StageMismatchError):
        beam_splitter(single(det, det), Photon.A)
