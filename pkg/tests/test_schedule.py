import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from imbdiff.errors import ConfigError
from imbdiff.schedule import (DiffusionSchedule, TauSchedule, default_tau_schedule,
                              make_linear_schedule, tau_at)

# Reference values recomputed with 60-digit arithmetic (mpmath) from the
# closed forms; tolerated at 1e-12 relative.
BETA_500 = 0.01004004004004004
ABAR_500 = 0.07858724288177824
ABAR_1000 = 4.0358297653756833e-05
SIGMA_TILDE_500 = 0.10015665437011007


def default_schedule(mode="beta"):
    return make_linear_schedule(1e-4, 0.02, 1000, mode)


def test_endpoints_are_exact():
    s = default_schedule()
    assert s.beta(1) == 1e-4
    assert s.beta(1000) == 0.02
    assert s.alpha(1) == 1 - 1e-4
    assert s.alpha_bar(1) == 1 - 1e-4


def test_midpoint_against_mpmath_oracle():
    s = default_schedule()
    assert s.beta(500) == pytest.approx(BETA_500, rel=1e-12)
    assert s.alpha_bar(500) == pytest.approx(ABAR_500, rel=1e-12)
    assert s.alpha_bar(1000) == pytest.approx(ABAR_1000, rel=1e-12)


def test_sigma_modes():
    s = default_schedule("beta")
    assert np.array_equal(s.sigmas, np.sqrt(s.betas))
    st_ = default_schedule("tilde-beta")
    assert st_.sigma(1) == 0.0
    assert st_.sigma(500) == pytest.approx(SIGMA_TILDE_500, rel=1e-12)
    # posterior variance never exceeds beta_t
    assert np.all(st_.sigmas <= s.sigmas + 1e-15)


def test_single_step_schedule():
    s = make_linear_schedule(0.01, 0.01, 1)
    assert s.T == 1
    assert s.betas.tolist() == [0.01]
    assert s.alpha_bar(1) == 0.99


def test_accessors_take_arrays():
    s = default_schedule()
    t = np.array([1, 500, 1000])
    assert s.beta(t).shape == (3,)
    assert s.beta(t)[0] == 1e-4


def test_arrays_are_frozen():
    s = default_schedule()
    with pytest.raises(ValueError):
        s.betas[0] = 0.5


@pytest.mark.parametrize("bad_t", [0, 1001, -3])
def test_out_of_range_timestep_rejected(bad_t):
    with pytest.raises(ConfigError):
        default_schedule().beta(bad_t)


def test_float_timestep_rejected():
    with pytest.raises(ConfigError):
        default_schedule().beta(1.5)


@pytest.mark.parametrize("beta1,betaT,T", [
    (0.0, 0.02, 10), (-1e-4, 0.02, 10), (0.02, 0.01, 10),
    (1e-4, 1.0, 10), (1e-4, 0.02, 0),
])
def test_bad_schedule_args_rejected(beta1, betaT, T):
    with pytest.raises(ConfigError):
        make_linear_schedule(beta1, betaT, T)


def test_unknown_sigma_mode_rejected():
    with pytest.raises(ConfigError):
        make_linear_schedule(1e-4, 0.02, 10, "posterior")


@settings(max_examples=50, deadline=None)
@given(beta1=st.floats(1e-6, 0.01), spread=st.floats(0.0, 0.5),
       T=st.integers(2, 400))
def test_schedule_invariants(beta1, spread, T):
    betaT = min(beta1 + spread, 0.999)
    s = make_linear_schedule(beta1, betaT, T)
    assert np.all(s.betas > 0) and np.all(s.betas < 1)
    assert np.all(np.diff(s.betas) >= -1e-18)
    assert np.all(s.alpha_bars > 0) and np.all(s.alpha_bars < 1)
    assert np.all(np.diff(s.alpha_bars) < 0)
    assert np.allclose(s.alphas, 1.0 - s.betas)


def test_mismatched_array_shapes_rejected():
    with pytest.raises(ConfigError):
        DiffusionSchedule(T=3, betas=np.zeros(2), alphas=np.zeros(3),
                          alpha_bars=np.zeros(3), sigmas=np.zeros(3))


# --- tau schedules ---------------------------------------------------------


def test_constant_tau():
    ts = TauSchedule(kind="constant", tau0=0.25)
    assert tau_at(ts, 1) == 0.25
    assert np.all(tau_at(ts, np.arange(1, 50)) == 0.25)


def test_exp_decay_tau_frozen_value():
    # tau0 * exp(-t / temperature) at t = temperature is tau0 / e
    ts = TauSchedule(kind="exp-decay", tau0=0.1, temperature=250.0)
    assert tau_at(ts, 250) == pytest.approx(0.03678794411714423, rel=1e-12)


def test_default_tau_schedule_temperature():
    ts = default_tau_schedule(1000)
    assert ts.temperature == 250.0
    assert ts.kind == "exp-decay"


@settings(max_examples=30, deadline=None)
@given(tau0=st.floats(0.0, 2.0), temp=st.floats(1.0, 500.0))
def test_exp_decay_tau_monotone(tau0, temp):
    ts = TauSchedule(kind="exp-decay", tau0=tau0, temperature=temp)
    vals = tau_at(ts, np.arange(1, 200))
    assert np.all(np.diff(vals) <= 1e-18)
    assert np.all(vals >= 0)
    assert np.all(vals <= tau0)


def test_bad_tau_args_rejected():
    with pytest.raises(ConfigError):
        TauSchedule(kind="linear", tau0=0.1)
    with pytest.raises(ConfigError):
        TauSchedule(kind="constant", tau0=-0.1)
    with pytest.raises(ConfigError):
        TauSchedule(kind="exp-decay", tau0=0.1, temperature=0.0)
    with pytest.raises(ConfigError):
        tau_at(TauSchedule(kind="constant", tau0=0.1), -1)
