import numpy as np
import pytest

from imbdiff.data import ToyMixtureSpec
from imbdiff.errors import ConfigError
from imbdiff.losses import PclVariant
from imbdiff.toylab import (argmin_cell_distance, default_toy_mixture, grid_values,
                            hinge_preservation_tau, landscape, landscape_from_csv,
                            landscape_to_csv, naive_instability_tau,
                            naive_is_unbounded, toy_fit_loss, toy_objective)

MIX = default_toy_mixture()


def test_fit_loss_by_hand():
    # 0.95 * (1-0)^2 / 2 + 0.05 * (2-2)^2 / 2
    assert toy_fit_loss(1.0, 2.0, MIX) == pytest.approx(0.475, rel=1e-15)
    assert toy_fit_loss(0.0, 2.0, MIX) == 0.0
    assert toy_fit_loss(0.0, 0.0, MIX) == pytest.approx(0.1, rel=1e-15)


def test_grid_hits_endpoints_exactly():
    vals = grid_values(-1.0, 3.0, 0.05)
    assert len(vals) == 81
    assert vals[0] == -1.0 and vals[-1] == 3.0
    assert 0.0 in vals and 2.0 in vals


def test_fit_argmin_is_exact_truth():
    g = landscape(MIX, "fit")
    assert (g.argmin_m1, g.argmin_m2) == (0.0, 2.0)
    assert g.argmin_value == 0.0
    assert g.loss.shape == (81, 81)


def test_naive_objective_value_at_corner():
    # 0.95*1/2 + 0.05*1/2 - 0.5*16/2 = 0.5 - 4.0
    assert toy_objective(-1.0, 3.0, MIX, "naive", tau=0.5) == pytest.approx(-3.5, rel=1e-12)


def test_naive_argmin_escapes_at_tau_half():
    g = landscape(MIX, "naive", tau=0.5)
    assert argmin_cell_distance(g, 0.0, 2.0) > 1
    # indefinite quadratic pushes the minimum to the grid boundary
    assert g.argmin_m1 in (-1.0, 3.0) and g.argmin_m2 in (-1.0, 3.0)


def test_naive_instability_threshold():
    # pi1 * pi2 with pi1 + pi2 = 1; sigma drops out
    assert naive_instability_tau(MIX) == pytest.approx(0.0475, rel=1e-15)
    assert not naive_is_unbounded(MIX, 0.04)
    assert naive_is_unbounded(MIX, 0.05)
    wider = ToyMixtureSpec(weights=[0.5, 0.5], means=[[0.0], [2.0]], sigmas=[3.0, 3.0])
    assert naive_instability_tau(wider) == pytest.approx(0.25, rel=1e-15)


def test_hinge_margin_preserves_argmin_at_any_tau():
    v = PclVariant("hinge_margin", margin=2.0)
    for tau in (0.5, 4.0, 32.0):
        g = landscape(MIX, "hinge", tau=tau, variant=v)
        assert (g.argmin_m1, g.argmin_m2) == (0.0, 2.0)
    assert hinge_preservation_tau(MIX, v) == np.inf


def test_smooth_hinges_preserve_below_threshold():
    for kind, tau in (("exponential", 0.03), ("reciprocal", 0.012)):
        g = landscape(MIX, "hinge", tau=tau, variant=PclVariant(kind))
        assert argmin_cell_distance(g, 0.0, 2.0) <= 1


def test_smooth_hinges_drift_past_threshold():
    # the weak tail curvature (pi2 / (2 sigma^2) = 0.025) loses to the
    # separation pull at tau = 0.5 for both smooth penalties
    for kind in ("exponential", "reciprocal"):
        g = landscape(MIX, "hinge", tau=0.5, variant=PclVariant(kind))
        assert argmin_cell_distance(g, 0.0, 2.0) > 1


def test_preservation_thresholds_bracket_pinned_taus():
    th_exp = hinge_preservation_tau(MIX, PclVariant("exponential"))
    th_rec = hinge_preservation_tau(MIX, PclVariant("reciprocal"))
    assert 0.03 < th_exp < 0.5
    assert 0.012 < th_rec < 0.5
    assert th_rec < th_exp  # reciprocal decays slower, pulls harder at d = 4


def test_hinge_value_at_truth_is_fit_plus_penalty():
    v = PclVariant("exponential")
    got = toy_objective(0.0, 2.0, MIX, "hinge", tau=0.5, variant=v)
    assert got == pytest.approx(0.5 * np.exp(-4.0), rel=1e-12)


def test_objective_validation():
    with pytest.raises(ConfigError):
        toy_objective(0, 2, MIX, "blend")
    with pytest.raises(ConfigError):
        toy_objective(0, 2, MIX, "naive", tau=-0.1)
    with pytest.raises(ConfigError):
        toy_objective(0, 2, MIX, "hinge", tau=0.1, variant=None)
    three = ToyMixtureSpec(weights=[0.5, 0.3, 0.2], means=[[0.0], [1.0], [2.0]],
                           sigmas=[1.0, 1.0, 1.0])
    with pytest.raises(ConfigError):
        toy_fit_loss(0, 2, three)
    uneven = ToyMixtureSpec(weights=[0.5, 0.5], means=[[0.0], [1.0]], sigmas=[1.0, 2.0])
    with pytest.raises(ConfigError):
        toy_fit_loss(0, 2, uneven)


def test_landscape_csv_round_trip(tmp_path):
    g = landscape(MIX, "fit", lo=-0.2, hi=0.2, step=0.1)
    path = tmp_path / "fit.csv"
    landscape_to_csv(g, path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    assert lines[0] == "m1,m2,loss"
    assert lines[-1].startswith("# argmin,")
    rows, argmin = landscape_from_csv(path)
    assert rows.shape == (25, 3)
    assert argmin == (g.argmin_m1, g.argmin_m2, g.argmin_value)
    # row-major: first block is m1 = -0.2 with m2 ascending
    assert np.allclose(rows[:5, 0], -0.2)
    assert np.allclose(rows[:5, 1], [-0.2, -0.1, 0.0, 0.1, 0.2])


def test_bad_grid_rejected():
    with pytest.raises(ConfigError):
        grid_values(1.0, -1.0, 0.05)
    with pytest.raises(ConfigError):
        grid_values(-1.0, 1.0, 0.0)
