import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collapse_sim.physmap import DomainError
from collapse_sim.selfsimilar import (
    ExponentialLimitSolution,
    Regime,
    SelfSimilarSolution,
    classify,
    eval_collapse,
    eval_decay,
    eval_exponential,
    h_max,
    half_width,
    limit_consistency_check,
    mu_of_c,
    profile_d2F,
    profile_dF,
    profile_F,
)


@pytest.mark.parametrize(
    "c, regime",
    [
        (0.0, Regime.WEAK_ABSORPTION),
        (0.6, Regime.WEAK_ABSORPTION),
        (1.0, Regime.DEGENERATE_UNIT),
        (1.25, Regime.POWER_LAW_DECAY),
        (1.5, Regime.EXPONENTIAL_BOUNDARY),
        (1.75, Regime.FINITE_TIME_COLLAPSE),
        (50.0, Regime.FINITE_TIME_COLLAPSE),
    ],
)
def test_classify(c, regime):
    assert classify(c).regime is regime


@pytest.mark.parametrize("c", [-0.1, float("nan"), float("inf")])
def test_classify_rejects(c):
    with pytest.raises(DomainError):
        classify(c)


def test_mu_values():
    assert mu_of_c(1.75) == 1.5
    assert mu_of_c(2.0) == 1.0
    assert mu_of_c(10.0) == pytest.approx(9 / 17, rel=1e-15)
    for c in (1.5, 1.2):
        with pytest.raises(DomainError):
            mu_of_c(c)


@given(a=st.floats(1.5001, 1e6), b=st.floats(1.5001, 1e6))
def test_mu_decreasing_above_half(a, b):
    lo, hi = sorted((a, b))
    if hi > lo:
        assert mu_of_c(hi) < mu_of_c(lo)
    assert mu_of_c(hi) > 0.5


def test_profile_values():
    assert profile_F(0.0, 1.75) == pytest.approx(2 / 3, rel=1e-15)
    assert profile_F(1.0, 3.0) == 0.0
    assert profile_F(0.5, 2.0) == 0.375
    with pytest.raises(DomainError):
        profile_F(1.2, 1.75)
    assert profile_F(1.2, 1.75, extended=True) == 0.0


def test_profile_boundary_conditions():
    for c in (1.6, 1.75, 2.0, 5.0, 50.0):
        assert profile_dF(0.0, c) == 0.0
        assert profile_F(1.0, c) == 0.0
        assert profile_dF(1.0, c) == pytest.approx(-1.0 / (c - 1.0), rel=1e-15)


def test_profile_ode_residual_exact_arithmetic():
    # F = (1 - x^2)/(2(c-1)) with mu = (c-1)/(2c-3): residual vanishes identically
    for c in (Fraction(7, 4), Fraction(2), Fraction(13, 5), Fraction(10)):
        mu = (c - 1) / (2 * c - 3)
        k = (2 * mu - 1) / mu
        for x in (Fraction(j, 17) for j in range(18)):
            F = (1 - x * x) / (2 * (c - 1))
            dF = -x / (c - 1)
            d2F = -1 / (c - 1)
            assert F * d2F - (c - 1) * dF * dF - x * dF + k * F == 0


@pytest.mark.parametrize("c", [1.6, 1.75, 3.0, 10.0])
def test_profile_ode_residual_floating(c):
    xi = np.linspace(-1.0, 1.0, 1000)
    mu = mu_of_c(c)
    F, dF, d2F = profile_F(xi, c), profile_dF(xi, c), profile_d2F(xi, c)
    res = F * d2F - (c - 1) * dF**2 - xi * dF + (2 * mu - 1) / mu * F
    assert np.max(np.abs(res)) < 1e-12


def test_eval_collapse_examples():
    sol = SelfSimilarSolution.create(1.75, B=1.0, t0=1.0, x0=0.3)
    assert eval_collapse(sol, 0.3, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert eval_collapse(sol, 0.3, 0.5) == pytest.approx(0.25, rel=1e-15)
    for t in (0.0, 0.4, 0.9):
        xf = half_width(sol, t)
        assert eval_collapse(sol, 0.3 + xf, t) == pytest.approx(0.0, abs=1e-15)
        assert eval_collapse(sol, 0.3 - xf, t) == pytest.approx(0.0, abs=1e-15)
    assert eval_collapse(sol, 5.0, 0.5) == 0.0
    with pytest.raises(DomainError):
        eval_collapse(sol, 5.0, 0.5, strict=True)
    with pytest.raises(DomainError):
        eval_collapse(sol, 0.0, 1.0)


def test_prefactor_identity():
    # B^2 mu F(0) equals B^2 / (2(2c - 3)) when mu = (c-1)/(2c-3)
    for c in (1.6, 1.75, 2.5, 7.0):
        sol = SelfSimilarSolution.create(c, B=1.3, t0=2.0)
        assert sol.amplitude() * profile_F(0.0, c) == pytest.approx(1.3**2 / (2 * (2 * c - 3)), rel=1e-14)
        assert eval_collapse(sol, 0.0, 0.7) == pytest.approx(h_max(sol, 0.7), rel=1e-14)


@given(
    c=st.floats(1.55, 20.0),
    B=st.floats(0.1, 5.0),
    t0=st.floats(0.1, 5.0),
    frac=st.floats(0.0, 0.95),
    xi=st.floats(-0.999, 0.999),
)
def test_ansatz_factorization(c, B, t0, frac, xi):
    sol = SelfSimilarSolution.create(c, B, t0)
    t = frac * t0
    mu = sol.mu
    xf = half_width(sol, t)
    expected = B * B * mu * (t0 - t) ** (2 * mu - 1) * profile_F(xi, c)
    assert eval_collapse(sol, xi * xf, t) == pytest.approx(expected, rel=1e-9, abs=1e-300)


def test_continuity_at_interface():
    sol = SelfSimilarSolution.create(2.5, B=1.0, t0=1.0)
    xf = half_width(sol, 0.3)
    vals = [eval_collapse(sol, xf * (1 - 10.0**-k), 0.3) for k in range(1, 12)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-10


def test_half_width_collapse():
    sol = SelfSimilarSolution.create(1.75, B=1.0, t0=1.0)
    assert half_width(sol, 0.0) == 1.0
    ts = np.linspace(0, 1 - 1e-12, 200)
    w = half_width(sol, ts)
    assert np.all(np.diff(w) < 0)
    assert half_width(sol, 1 - 1e-12) == pytest.approx(1e-18, rel=1e-3)
    with pytest.raises(DomainError):
        half_width(sol, 1.0)


def test_log_guard_near_collapse():
    # t0 - t below the guard threshold still gives finite powers
    sol = SelfSimilarSolution.create(10.0, B=1.0, t0=1e-305)
    mu = 9 / 17
    assert half_width(sol, 0.0) == pytest.approx(math.exp(mu * math.log(1e-305)), rel=1e-12)
    assert h_max(sol, 0.0) == pytest.approx(math.exp((2 * mu - 1) * math.log(1e-305)) / 34, rel=1e-12)


def test_decay_examples():
    sol = SelfSimilarSolution.create(1.25, B=1.0, t0=1.0)
    assert sol.mu == pytest.approx(-0.5)
    assert half_width(sol, 0.0) == 1.0
    assert half_width(sol, 3.0) == pytest.approx(0.5, rel=1e-15)
    assert eval_decay(sol, 0.0, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert eval_decay(sol, 0.0, 1.0) == pytest.approx(0.25, rel=1e-15)
    assert eval_decay(sol, 1.5, 1.0) == 0.0
    with pytest.raises(DomainError):
        eval_decay(SelfSimilarSolution.create(1.75, 1.0, 1.0), 0.0, 0.0)
    with pytest.raises(DomainError):
        eval_collapse(sol, 0.0, 0.0)


def test_no_dome_for_boundary_regimes():
    for c in (0.5, 1.0, 1.5):
        with pytest.raises(DomainError):
            SelfSimilarSolution.create(c, 1.0, 1.0)


def test_exponential_examples():
    sol = ExponentialLimitSolution(C=1.0, Theta=1.0, x0=0.0)
    assert eval_exponential(sol, 0.0, 0.0) == 1.0
    assert eval_exponential(sol, 1.0, 0.0) == 0.0
    assert eval_exponential(sol, -1.0, 0.0) == 0.0
    assert eval_exponential(sol, 0.0, 1.0) == pytest.approx(math.exp(-2.0), rel=1e-15)
    ts = np.linspace(0, 50, 100)
    w = sol.half_width(ts)
    assert np.all(w > 0) and np.all(np.diff(w) < 0)
    for C, Theta in ((0.0, 1.0), (1.0, -1.0)):
        with pytest.raises(DomainError):
            ExponentialLimitSolution(C=C, Theta=Theta)


@pytest.mark.parametrize("side", [+1, -1])
def test_limit_consistency_decreases(side):
    gaps = [limit_consistency_check(eps, side=side) for eps in (1e-2, 5e-3, 1e-3, 5e-4, 1e-4)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert limit_consistency_check(1e-3, side=side) < 1e-2


def test_limit_consistency_domain():
    with pytest.raises(DomainError):
        limit_consistency_check(0.2)
    with pytest.raises(DomainError):
        limit_consistency_check(1e-3, side=0)
