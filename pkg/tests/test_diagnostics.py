import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collapse_sim.diagnostics import (
    FitError,
    WindowNotFound,
    asymmetry,
    fit_mu_B,
    fit_series,
    fit_t0,
    loglog_data,
    peak,
    profile_collapse_error,
    select_fit_window,
    t0_line_data,
)
from collapse_sim.pde_solver import Grid, initial_state, make_nonsymmetric, make_smoothed_block
from collapse_sim.selfsimilar import SelfSimilarSolution, h_max, half_width
from collapse_sim.series import TimeSeries


def exact_series(c, B, t0, n=400, end=0.99, x0=0.0):
    sol = SelfSimilarSolution.create(c, B, t0)
    t = np.linspace(0.0, end * t0, n)
    return TimeSeries.from_arrays(t, half_width(sol, t), h_max(sol, t), x_0=x0)


def test_t0_line_is_exact_for_c_175():
    s = exact_series(1.75, 1.0, 1.0)
    t, y = t0_line_data(s)
    # x_f^2/h_max = (t0 - t)/(mu F(0)) and mu F(0) = 1
    assert np.allclose(y, 1.0 - t, rtol=0, atol=1e-12)
    t0, r2 = fit_t0(s, 1.75)
    assert t0 == pytest.approx(1.0, abs=1e-12) and r2 == pytest.approx(1.0)


def test_mu_B_on_exact_series():
    s = exact_series(1.75, 1.0, 1.0)
    mu, B, r2 = fit_mu_B(s, 1.0)
    assert mu == pytest.approx(1.5, rel=1e-12)
    assert B == pytest.approx(1.0, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(c=st.floats(1.6, 3.0), B=st.floats(0.2, 5.0), t0=st.floats(0.1, 5.0))
def test_round_trip(c, B, t0):
    res = fit_series(exact_series(c, B, t0), c)
    assert res.t0 == pytest.approx(t0, rel=1e-6)
    assert res.mu == pytest.approx((c - 1) / (2 * c - 3), rel=1e-6)
    assert res.B == pytest.approx(B, rel=1e-6)


@given(k=st.floats(0.01, 100.0))
def test_scaling_x_f_changes_only_B(k):
    s = exact_series(2.5, 1.3, 2.0)
    scaled = TimeSeries.from_arrays(s.t, k * s.x_f, s.h_max)
    mu1, B1, _ = fit_mu_B(s, 2.0)
    mu2, B2, _ = fit_mu_B(scaled, 2.0)
    assert mu2 == pytest.approx(mu1, rel=1e-9)
    assert B2 == pytest.approx(k * B1, rel=1e-9)


@given(a=st.floats(0.1, 10.0), b=st.floats(-5.0, -0.01))
def test_t0_exact_on_affine_data(a, b):
    t = np.linspace(0.0, 1.0, 30)
    y = a + b * t
    # choose h_max = 1 so that x_f^2 / h_max = y
    t = t[y > 0]
    y = y[y > 0]
    if t.size < 10:
        return
    s = TimeSeries.from_arrays(t, np.sqrt(y), np.ones_like(t))
    t0, _ = fit_t0(s, 1.75)
    assert t0 == pytest.approx(-a / b, rel=1e-9)


def test_fit_errors():
    t = np.linspace(0, 1, 50)
    growing = TimeSeries.from_arrays(t, 1 + t, np.ones_like(t))
    with pytest.raises(FitError, match="not decreasing"):
        fit_t0(growing, 1.75)
    noisy = TimeSeries.from_arrays(t, np.sqrt(1.5 + np.cos(40 * t) - 0.01 * t), np.ones_like(t))
    with pytest.raises(FitError, match="linear"):
        fit_t0(noisy, 1.75)
    with pytest.raises(FitError, match=">= 10"):
        fit_t0(exact_series(1.75, 1, 1, n=5), 1.75)
    with pytest.raises(FitError, match="does not exceed"):
        fit_mu_B(exact_series(1.75, 1, 1), 0.5)


def test_cutoff_excludes_collapse_tail():
    s = exact_series(1.75, 1.0, 1.0, n=1000, end=0.99999)
    window = select_fit_window(s)
    assert s.x_f[s.t <= window[1]].min() >= 5e-3 * s.x_f[0]


def test_window_on_exact_series_covers_nearly_everything():
    s = exact_series(1.75, 1.0, 1.0)
    lo, hi = select_fit_window(s)
    assert lo == 0.0 and hi > 0.9


def test_window_not_found():
    with pytest.raises(WindowNotFound):
        select_fit_window(exact_series(1.75, 1.0, 1.0, n=30))
    # a run cut off while the block is still spreading out its plateau
    t = np.linspace(0.0, 0.05, 200)
    early = TimeSeries.from_arrays(t, 1.0 - 0.2 * t, 1.0 - t**2)
    with pytest.raises(WindowNotFound):
        select_fit_window(early)


def test_window_excludes_transient(block_explicit):
    lo, hi = select_fit_window(block_explicit)
    # the plateau is gone well before this point
    assert lo > 0.15 and hi < 0.345


def test_peak_interpolation():
    xi = np.linspace(-1, 1, 21)
    h = 1.0 - (xi - 0.033) ** 2
    xm, hm = peak(xi, h)
    assert xm == pytest.approx(0.033, abs=1e-12)
    assert hm == pytest.approx(1.0, abs=1e-12)


def test_collapse_error_values():
    grid = Grid(202)
    assert profile_collapse_error((grid.xi, 1.0 - grid.xi**2)) < 1e-12
    block = initial_state(make_smoothed_block(1.0, -1.0, 1.0, 0.4), grid)
    err = profile_collapse_error((grid.xi, block.h))
    assert err >= 0.2
    assert err == pytest.approx(np.max(np.abs(block.h - (1 - grid.xi**2))), abs=1e-12)


@given(lam=st.floats(1e-6, 1e6))
def test_collapse_error_scale_invariant(lam):
    grid = Grid(50)
    h = np.maximum(0, 1 - grid.xi**2) * (1 + 0.1 * grid.xi**3)
    a = profile_collapse_error((grid.xi, h))
    b = profile_collapse_error((grid.xi, lam * h))
    assert b == pytest.approx(a, rel=1e-9)


def test_asymmetry_values():
    grid = Grid(202)
    assert asymmetry((grid.xi, 1.0 - grid.xi**2)) < 1e-12
    ns = initial_state(make_nonsymmetric(), grid)
    a0 = asymmetry((grid.xi, ns.h))
    assert 0.3 < a0 < 1.0


def test_loglog_data_skips_after_t0():
    s = exact_series(1.75, 1.0, 1.0)
    u, _ = loglog_data(s, 0.5)
    assert u.size == np.count_nonzero(s.t < 0.5)
    u, v = loglog_data(s, 1.0)
    assert np.allclose(v, 1.5 * u, rtol=0, atol=1e-12)
