import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shepp.exact import F1
from shepp.montecarlo import (
    McConfig,
    McDegenerateError,
    McEstimate,
    ProcessSpec,
    empirical_correlation,
    estimate_F,
    estimate_Lambda,
    rho,
    simulate_max_indicator,
    simulate_paths,
)


def rho_from_terms(spec, t):
    # X(t) = sum c_k W(t + o_k) with sum c_k = 0: Cov(X(0), X(t)) = -1/2 sum c_i c_j |t + o_j - o_i|
    terms = spec.terms()
    return -0.5 * sum(ci * cj * abs(t + oj - oi) for oi, ci in terms for oj, cj in terms)


@settings(max_examples=60)
@given(st.floats(0.05, 20), st.floats(0, 2.5))
def test_broken_a_correlation_matches_wiener_representation(a, t):
    spec = ProcessSpec.broken_a(a)
    assert rho(spec, t) == pytest.approx(rho_from_terms(spec, t), abs=1e-12)


@settings(max_examples=60)
@given(st.floats(1, 20), st.floats(0, 1.5))
def test_broken_c_correlation_matches_wiener_representation(c, t):
    spec = ProcessSpec.broken_c(c)
    assert rho(spec, t) == pytest.approx(rho_from_terms(spec, t), abs=1e-12)


@given(st.floats(0, 3))
def test_slepian_correlation_matches_wiener_representation(t):
    spec = ProcessSpec.slepian()
    assert rho(spec, t) == pytest.approx(rho_from_terms(spec, t), abs=1e-14)


@pytest.mark.parametrize(
    "spec",
    [ProcessSpec.slepian(), ProcessSpec.ornstein_uhlenbeck(), ProcessSpec.broken_a(2.0), ProcessSpec.broken_c(3.0)],
)
def test_correlation_unit_at_zero_and_even(spec):
    assert rho(spec, 0.0) == 1.0
    t = np.linspace(0, 3, 31)
    np.testing.assert_array_equal(rho(spec, t), rho(spec, -t))


def test_pointwise_correlation_ordering():
    t = np.linspace(0, 2, 2001)
    r_ou = rho(ProcessSpec.ornstein_uhlenbeck(), t)
    r_a = rho(ProcessSpec.broken_a(1.0), t)
    r_s = rho(ProcessSpec.slepian(), t)
    r_c = rho(ProcessSpec.broken_c(1.0), t)
    assert np.all(r_ou >= r_a - 1e-15)
    assert np.all(r_a >= r_s - 1e-15)
    assert np.all(r_s >= r_c - 1e-15)


@pytest.mark.parametrize("kw", [dict(kind="brownian"), dict(kind="broken_a", a=0.0), dict(kind="broken_c", c=0.5)])
def test_invalid_specs_rejected(kw):
    with pytest.raises(ValueError):
        ProcessSpec(**kw)


@pytest.mark.parametrize(
    "kw", [dict(step=0.0), dict(reps=0), dict(T=0.005), dict(seed=-1), dict(T=1.0, step=0.03)]
)
def test_invalid_mc_config_rejected(kw):
    base = dict(T=1.0, h=0.0, step=0.01)
    base.update(kw)
    with pytest.raises(ValueError):
        McConfig(**base)


@pytest.mark.parametrize(
    "spec", [ProcessSpec.slepian(), ProcessSpec.ornstein_uhlenbeck(), ProcessSpec.broken_a(1.0), ProcessSpec.broken_c(1.0)]
)
def test_paths_have_unit_variance(spec):
    rng = np.random.default_rng(3)
    X = simulate_paths(spec, 1.0, 0.05, 20000, rng)
    assert X.shape == (20000, 21)
    var = X.var(axis=0)
    assert np.all(np.abs(var - 1) < 5 * math.sqrt(2 / 20000))


def test_empirical_correlation_within_three_sigma():
    spec = ProcessSpec.broken_a(1.0)
    lags = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    r, se = empirical_correlation(spec, lags, n_paths=20000, step=0.1, seed=2)
    assert np.all(np.abs(r - rho(spec, lags)) <= 3 * se)


def test_estimate_F_is_deterministic_and_worker_independent():
    spec = ProcessSpec.slepian()
    a = estimate_F(spec, McConfig(T=1, h=0.5, step=0.02, reps=5000, seed=7))
    b = estimate_F(spec, McConfig(T=1, h=0.5, step=0.02, reps=5000, seed=7, workers=2))
    c = estimate_F(spec, McConfig(T=1, h=0.5, step=0.02, reps=5000, seed=8))
    assert a == b
    assert a != c


def test_bridge_correction_only_removes_survivors():
    spec = ProcessSpec.slepian()
    cfg = McConfig(T=2, h=0.3, step=0.02, reps=6000, seed=1)
    with_bridge = estimate_F(spec, cfg)
    without = estimate_F(spec, McConfig(**{**cfg.__dict__, "bridge": False}))
    assert with_bridge.p_hat <= without.p_hat


def test_discrete_monitoring_bias_direction():
    # without the correction, coarser grids miss more crossings
    spec = ProcessSpec.slepian()
    coarse = estimate_F(spec, McConfig(T=1, h=1.0, step=0.1, reps=20000, seed=4, bridge=False))
    assert coarse.p_hat > F1(1.0) + 3 * coarse.stderr


def test_estimate_F_agrees_with_closed_form_small_run():
    spec = ProcessSpec.slepian()
    est = estimate_F(spec, McConfig(T=1, h=1.0, step=0.01, reps=20000, seed=11))
    assert abs(est.p_hat - F1(1.0)) <= 4 * est.stderr + 0.003


def test_estimate_from_count():
    e = McEstimate.from_count(25, 100)
    assert e.p_hat == 0.25 and e.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 100))


def test_estimate_Lambda_argument_checks():
    cfg = McConfig(T=1, h=0, step=0.05, reps=200)
    with pytest.raises(ValueError):
        estimate_Lambda(ProcessSpec.slepian(), 0.0, 1, cfg)
    with pytest.raises(McDegenerateError):
        estimate_Lambda(ProcessSpec.slepian(), -4.0, 3, cfg)


def test_estimate_Lambda_ou_near_zero_level():
    est = estimate_Lambda(
        ProcessSpec.ornstein_uhlenbeck(), 0.1, 3, McConfig(T=1, h=0.1, step=0.01, reps=20000, seed=5)
    )
    assert est.Lambda > 0.8
    assert est.survivors <= est.survivors_prev
    assert est.lam == pytest.approx(math.exp(-est.Lambda))


def test_single_replication_indicator():
    rng = np.random.default_rng(0)
    out = simulate_max_indicator(ProcessSpec.slepian(), McConfig(T=1, h=10.0, step=0.1), rng)
    assert out is True


def test_finer_grid_does_not_raise_survival():
    spec = ProcessSpec.slepian()
    coarse = estimate_F(spec, McConfig(T=1, h=0.5, step=0.01, reps=10000, seed=12, bridge=False))
    fine = estimate_F(spec, McConfig(T=1, h=0.5, step=0.001, reps=10000, seed=12, bridge=False))
    assert coarse.p_hat >= fine.p_hat - 3 * math.hypot(coarse.stderr, fine.stderr)
