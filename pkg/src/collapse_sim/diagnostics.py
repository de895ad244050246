"""Fitting ``(t0, B, mu)`` to run series and measuring approach to the dome profile.

Near collapse ``x_f^2 / h_max = (t0 - t) / (mu F(0))`` is a straight line in
``t`` whose root is ``t0``; with ``t0`` known, ``ln x_f`` against
``ln(t0 - t)`` is a line of slope ``mu`` and intercept ``ln B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import TimeSeries

# records with x_f below this fraction of the initial half-width are never fitted
COLLAPSE_CUTOFF = 5e-3


class FitError(RuntimeError):
    pass


class WindowNotFound(FitError):
    pass


@dataclass(frozen=True)
class FitResult:
    t0: float
    B: float
    mu: float
    r2_linear: float
    r2_loglog: float
    window: tuple

    def as_dict(self) -> dict:
        return {
            "t0": self.t0,
            "B": self.B,
            "mu": self.mu,
            "r2_linear": self.r2_linear,
            "r2_loglog": self.r2_loglog,
            "window_start": self.window[0],
            "window_end": self.window[1],
        }


def _linear_fit(x, y):
    """Ordinary least squares ``y = a + b x``; returns ``(a, b, r2)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise FitError("degenerate regression: all abscissae equal")
    b = np.sum((x - xm) * (y - ym)) / sxx
    a = ym - b * xm
    ss_tot = np.sum((y - ym) ** 2)
    ss_res = np.sum((y - a - b * x) ** 2)
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return a, b, r2


def _window_mask(series: TimeSeries, window):
    mask = series.x_f >= COLLAPSE_CUTOFF * series.x_f[0]
    if window is not None:
        lo, hi = window
        mask &= (series.t >= lo) & (series.t <= hi)
    return mask


def fit_t0(series: TimeSeries, c: float, window=None):
    """Root of the least-squares line through ``(t, x_f^2 / h_max)``.

    Returns ``(t0, r2_linear)``. ``c`` is accepted for symmetry with the
    other fits; the root does not depend on it.
    """
    mask = _window_mask(series, window)
    if mask.sum() < 10:
        raise FitError(f"need >= 10 records in the window, have {int(mask.sum())}")
    t = series.t[mask]
    xf = series.x_f[mask]
    hm = series.h_max[mask]
    if np.any(hm <= 0) or np.any(xf <= 0):
        raise FitError("x_f and h_max must be positive")
    a, b, r2 = _linear_fit(t, xf * xf / hm)
    if not b < 0:
        raise FitError(f"x_f^2/h_max is not decreasing (slope {b:.3g})")
    if r2 < 0.9:
        raise FitError(f"x_f^2/h_max is not linear enough (r2 = {r2:.3f})")
    return float(-a / b), float(r2)


def fit_mu_B(series: TimeSeries, t0: float, window=None):
    """Log-log fit of ``x_f`` against ``t0 - t``; returns ``(mu, B, r2_loglog)``."""
    mask = _window_mask(series, window)
    if mask.sum() < 3:
        raise FitError(f"need >= 3 records in the window, have {int(mask.sum())}")
    t = series.t[mask]
    if not t0 > t.max():
        raise FitError(f"t0 = {t0:.6g} does not exceed the last fitted time {t.max():.6g}")
    a, b, r2 = _linear_fit(np.log(t0 - t), np.log(series.x_f[mask]))
    return float(b), float(math.exp(a)), float(r2)


def select_fit_window(series: TimeSeries, n_blocks: int = 24, spread: float = 0.02):
    """Latest time window where both fitted lines have steady local slopes.

    A provisional ``t0`` comes from the line fit on the last third of the
    usable records. The usable records are cut into ``n_blocks`` pieces of
    equal length in ``ln x_f``; in each piece the slope of ``ln x_f`` against
    ``ln(t0 - t)`` and the slope of ``x_f^2 / h_max`` against ``t`` are fitted.
    Working back from the end, the first run of consecutive pieces in which
    both slopes stay within ``spread`` (relative) of each other, with at least
    10 records and ``x_f`` shrinking by at least a factor 2 across it, is
    returned as ``(t_lo, t_hi)``.
    """
    if len(series) < 50:
        raise WindowNotFound(f"need >= 50 records, have {len(series)}")
    idx = np.flatnonzero(_window_mask(series, None))
    if idx.size < 50:
        raise WindowNotFound("fewer than 50 records before the collapse cutoff")
    tail = idx[2 * idx.size // 3 :]
    try:
        t0p, _ = fit_t0(series, 0.0, (series.t[tail[0]], series.t[tail[-1]]))
    except FitError as exc:
        raise WindowNotFound(f"no provisional collapse time: {exc}") from exc
    idx = idx[series.t[idx] < t0p]
    if idx.size < 10:
        raise WindowNotFound("provisional collapse time precedes the data")
    t = series.t[idx]
    u = np.log(t0p - t)
    v = np.log(series.x_f[idx])
    y = series.x_f[idx] ** 2 / series.h_max[idx]
    edges = np.linspace(v.max(), v.min(), n_blocks + 1)
    block = np.clip(np.searchsorted(-edges, -v, side="right") - 1, 0, n_blocks - 1)
    mu_local = np.full(n_blocks, np.nan)
    line_local = np.full(n_blocks, np.nan)
    for k in range(n_blocks):
        sel = block == k
        if sel.sum() >= 3 and np.ptp(u[sel]) > 0:
            mu_local[k] = _linear_fit(u[sel], v[sel])[1]
            line_local[k] = _linear_fit(t[sel], y[sel])[1]

    def steady(vals):
        return np.ptp(vals) <= spread * abs(np.mean(vals))

    for end in range(n_blocks - 1, -1, -1):
        best = None
        start = end
        while start >= 0 and not np.isnan(mu_local[start]):
            if not (steady(mu_local[start : end + 1]) and steady(line_local[start : end + 1])):
                break
            sel = (block >= start) & (block <= end)
            if sel.sum() >= 10 and np.ptp(v[sel]) >= math.log(2.0):
                best = sel
            start -= 1
        if best is not None:
            return float(t[best].min()), float(t[best].max())
    raise WindowNotFound("no window with steady local slopes over a factor-2 decay of x_f")


def fit_series(series: TimeSeries, c: float, window=None) -> FitResult:
    """Window selection (unless given), then the ``t0`` line and the log-log fit."""
    if window is None:
        window = select_fit_window(series)
    t0, r2_lin = fit_t0(series, c, window)
    mu, B, r2_log = fit_mu_B(series, t0, window)
    return FitResult(t0=t0, B=B, mu=mu, r2_linear=r2_lin, r2_loglog=r2_log, window=tuple(window))


# ---------------------------------------------------------------- profile metrics


def _profile(snapshot):
    if hasattr(snapshot, "xi"):
        return np.asarray(snapshot.xi, dtype=float), np.asarray(snapshot.h, dtype=float)
    xi, h = snapshot
    return np.asarray(xi, dtype=float), np.asarray(h, dtype=float)


def peak(xi, h):
    """Location and value of the maximum from a parabola through the top three nodes."""
    i = int(np.argmax(h))
    top = np.flatnonzero(h == h[i])
    if top.size > 1:
        # flat top: take the middle of the plateau
        return float(0.5 * (xi[top[0]] + xi[top[-1]])), float(h[i])
    if i == 0 or i == h.size - 1:
        return float(xi[i]), float(h[i])
    y0, y1, y2 = h[i - 1], h[i], h[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return float(xi[i]), float(y1)
    d = 0.5 * (y0 - y2) / denom
    step = xi[i + 1] - xi[i]
    return float(xi[i] + d * step), float(y1 - 0.25 * (y0 - y2) * d)


def profile_collapse_error(snapshot, c: float | None = None) -> float:
    """Sup distance between ``h / h_max`` and ``1 - xi_c^2``, ``xi_c`` measured from the peak.

    The normalized dome shape is the same for every ``c``; the argument is
    kept for call-site clarity.
    """
    xi, h = _profile(snapshot)
    xm, hm = peak(xi, h)
    if not hm > 0:
        raise FitError("profile has no positive maximum")
    return float(np.max(np.abs(h / hm - (1.0 - (xi - xm) ** 2))))


def asymmetry(snapshot) -> float:
    """Sup over the grid of ``|h(xm + u) - h(xm - u)| / h_max`` about the peak ``xm``."""
    xi, h = _profile(snapshot)
    xm, hm = peak(xi, h)
    if not hm > 0:
        raise FitError("profile has no positive maximum")
    mirrored = np.interp(2.0 * xm - xi, xi, h, left=0.0, right=0.0)
    return float(np.max(np.abs(h - mirrored)) / hm)


# ---------------------------------------------------------------- plot data


def t0_line_data(series: TimeSeries):
    """Columns ``(t, x_f^2 / h_max)``."""
    return series.t.copy(), series.x_f**2 / series.h_max


def loglog_data(series: TimeSeries, t0: float):
    """Columns ``(ln(t0 - t), ln x_f)`` for records before ``t0``."""
    mask = series.t < t0
    return np.log(t0 - series.t[mask]), np.log(series.x_f[mask])
