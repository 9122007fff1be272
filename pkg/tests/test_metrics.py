from fractions import Fraction

import numpy as np
import pytest

from hbsa.analyzer import analyze
from hbsa.emitter import CavityParams
from hbsa.errors import NonPhysicalParametersWarning
from hbsa.hilbert import ALL_LABELS
from hbsa.metrics import (
    HERALD_OUTCOMES,
    Axis,
    SweepRow,
    SweepSpec,
    efficiency_formula,
    outcome_probabilities,
    sample,
    sweep,
    sweep_point,
)

# |d|^12 at resonance, kappa_s = 0, gamma = 0.1, p = 1: d = 1 - (1/40) / (1/40 + g^2).
SPOT = {
    0.5: float(Fraction(10, 11) ** 12),
    1.0: float(Fraction(40, 41) ** 12),
    2.4: float((1 - Fraction(1, 40) / (Fraction(1, 40) + Fraction(12, 5) ** 2)) ** 12),
}


@pytest.mark.parametrize("g", sorted(SPOT))
def test_efficiency_spot_values(g):
    assert efficiency_formula(CavityParams(g=g, gamma=0.1)) == pytest.approx(SPOT[g], abs=1e-12)


def test_spot_values_to_six_digits():
    assert round(SPOT[0.5], 6) == 0.318631
    assert round(SPOT[1.0], 6) == 0.743556
    assert round(SPOT[2.4], 6) == 0.949357


def test_ideal_efficiency_is_one():
    assert efficiency_formula(CavityParams.ideal()) == 1.0


def test_axis_from_range():
    assert Axis.from_range("g", 0, 1, 0.25).values == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert Axis.from_range("p", 0.1, 0.3, 0.1).values == (0.1, 0.2, 0.3)
    with pytest.raises(ValueError):
        Axis.from_range("g", 0, 1, 0)
    with pytest.raises(ValueError):
        Axis.from_range("g", 1, 0, 0.1)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec((Axis("omega", (0.0,)),))
    with pytest.raises(ValueError):
        SweepSpec((Axis("g", (1.0,)), Axis("g", (2.0,))))
    with pytest.raises(ValueError):
        SweepSpec((Axis("p", (0.5, 1.5)),))


def test_sweep_rows_in_grid_order():
    spec = SweepSpec((Axis("g", (0.5, 1.0)), Axis("p", (0.5, 1.0))), CavityParams(gamma=0.1))
    rows = sweep(spec)
    assert [(r.g_over_kappa, r.p) for r in rows] == [(0.5, 0.5), (0.5, 1.0), (1.0, 0.5), (1.0, 1.0)]
    assert all(abs(r.eta_sim - r.eta_formula) < 1e-10 for r in rows)


def test_sweep_row_columns():
    row = sweep_point(CavityParams(g=0.5, gamma=0.1))
    assert len(row.values()) == len(SweepRow.COLUMNS) == 10
    assert row.p_D1 > row.p_D2 > row.p_D3 > 0


def test_strict_sweep_checks_all_labels():
    row = sweep_point(CavityParams(g=0.7, kappa_s=0.2, gamma=0.1, p=0.8), strict=True)
    assert row.eta_sim == pytest.approx(row.eta_formula, abs=1e-10)


def test_outcome_probabilities_sum_to_one():
    report = analyze(ALL_LABELS[20], CavityParams(g=0.6, gamma=0.2, kappa_s=0.3))
    probs = outcome_probabilities(report)
    assert list(probs)[-4:] == list(HERALD_OUTCOMES)
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)


def test_sampling_is_deterministic_in_seed():
    report = analyze(ALL_LABELS[3], CavityParams(g=0.6, gamma=0.2))
    assert sample(report, 5000, 11) == sample(report, 5000, 11)
    assert sample(report, 5000, 11) != sample(report, 5000, 12)
    assert sum(sample(report, 5000, 11).values()) == 5000


def test_sampling_frequencies_converge():
    report = analyze(ALL_LABELS[3], CavityParams(g=0.6, gamma=0.2))
    probs = outcome_probabilities(report)
    counts = sample(report, 200_000, 5)
    freq = np.array([counts[k] for k in probs]) / 200_000
    assert np.max(np.abs(freq - np.array(list(probs.values())))) < 0.01


def test_sampling_rejects_bad_shots_and_non_physical_points():
    report = analyze(ALL_LABELS[0], CavityParams.ideal())
    with pytest.raises(ValueError):
        sample(report, 0, 1)
    with pytest.warns(NonPhysicalParametersWarning):
        bad = analyze(ALL_LABELS[0], CavityParams(g=2.0, kappa_s=0.1, gamma=0.1, p=0.5), check=False)
    assert outcome_probabilities(bad)["loss"] < 0
    with pytest.raises(ValueError):
        sample(bad, 10, 1)
