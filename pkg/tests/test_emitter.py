import dataclasses
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbsa.emitter import (
    CavityParams,
    block_apply,
    block_gain,
    herald_amplitude,
    is_physical,
    reflection_cold,
    reflection_hot,
    success_amplitude,
)
from hbsa.errors import InvalidParametersError
from hbsa.hilbert import ALL_LABELS, Photon, SpinVal, make_hyper_bell

params_st = st.builds(
    CavityParams,
    g=st.floats(0, 5),
    kappa_s=st.floats(0, 1),
    gamma=st.floats(0, 1),
    omega_c=st.floats(-2, 2),
    omega_x=st.floats(-2, 2),
    p=st.floats(0, 1),
)


def test_ideal_amplitudes():
    ideal = CavityParams.ideal()
    assert reflection_hot(ideal) == pytest.approx(1)
    assert reflection_cold(ideal) == pytest.approx(-1)
    assert success_amplitude(ideal) == pytest.approx(1)
    assert herald_amplitude(ideal) == pytest.approx(0)


def test_amplitudes_match_exact_fractions():
    # At resonance with kappa_s = 0: r_h = 1 - (gamma/2) / (gamma/4 + g^2), r_0 = -1.
    for g, gamma in [(0.5, 0.1), (1.0, 0.1), (2.4, 0.1)]:
        gf, yf = Fraction(g).limit_denominator(100), Fraction(gamma).limit_denominator(100)
        r_h = 1 - (yf / 2) / (yf / 4 + gf**2)
        params = CavityParams(g=g, gamma=gamma)
        assert reflection_hot(params) == pytest.approx(float(r_h), abs=1e-14)
        assert success_amplitude(params) == pytest.approx(float((r_h + 1) / 2), abs=1e-14)
        assert herald_amplitude(params) == pytest.approx(float((r_h - 1) / 2), abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(params_st)
def test_reflections_are_passive(params):
    assert abs(reflection_hot(params)) <= 1 + 1e-12
    assert abs(reflection_cold(params)) <= 1 + 1e-12


@settings(max_examples=200, deadline=None)
@given(params_st)
def test_uncoupled_dot_is_cold_cavity(params):
    cold = dataclasses.replace(params, g=0.0)
    assert abs(reflection_hot(cold) - reflection_cold(cold)) < 1e-12
    assert abs(success_amplitude(cold)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(params_st.map(lambda q: dataclasses.replace(q, p=1.0)))
def test_block_conserves_or_loses_norm_at_full_mode_match(params):
    assert block_gain(params) <= 1 + 1e-12


def test_gain_above_one_flags_non_physical():
    params = CavityParams(g=1.0, kappa_s=0.3, gamma=0.0, p=0.5)
    assert block_gain(params) > 1
    assert not is_physical(params)


@pytest.mark.parametrize(
    "field,value",
    [("p", 1.5), ("p", -0.1), ("g", -1.0), ("kappa", 0.0), ("gamma", math.nan), ("kappa_s", math.inf)],
)
def test_invalid_parameters_rejected(field, value):
    with pytest.raises(InvalidParametersError):
        CavityParams(**{field: value})


def test_block_splits_success_and_herald():
    params = CavityParams(g=0.5, gamma=0.1)
    state = make_hyper_bell(ALL_LABELS[0])
    out, herald = block_apply(state, 1, Photon.A, lambda label: True, params)
    d, f = success_amplitude(params), herald_amplitude(params)
    assert out.norm_sq() == pytest.approx(abs(d) ** 2)
    assert herald == pytest.approx(abs(f) ** 2)
    assert all(k.spins[0] is SpinVal.MINUS for k in out)


def test_resonant_lossless_dot_reflects_fully_at_any_coupling():
    assert reflection_hot(CavityParams(g=1e-200)) == 1


@pytest.mark.parametrize("omega_c", [0.0, 1.0])
def test_tiny_coupling_with_subnormal_detuning(omega_c):
    # Underflow cases found by property testing: g^2 and exciton * cavity both vanish in floats.
    params = CavityParams(g=3.765692394137474e-281, omega_c=omega_c, omega_x=5e-324)
    assert block_gain(params) <= 1 + 1e-12
    assert abs(abs(reflection_hot(params)) - 1) < 1e-12


def test_overflowing_coupling_ratio_reflects_fully():
    assert reflection_hot(CavityParams(g=1.0, omega_x=5e-324)) == 1
