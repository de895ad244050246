"""Moving-interface finite differences for ``h_t = h h_xx - (c - 1) h_x^2``.

The support ``(x_L, x_R)`` is mapped onto ``xi in [-1, 1]`` with
``x = x_0 + xi x_f``. On the fixed grid the level obeys

    h_t = [ (c-1) h_xi ((xi+1) s_R - (xi-1) s_L) / 2 + h h_xixi - (c-1) h_xi^2 ] / x_f^2

where ``s_L, s_R`` are the boundary slopes ``h_xi(-1), h_xi(1)``, and the
interfaces move with the flux condition ``x_R' = (c-1) s_R / x_f``,
``x_L' = (c-1) s_L / x_f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .physmap import DomainError
from .selfsimilar import SelfSimilarSolution, Regime, eval_collapse, half_width
from .series import Snapshot, TimeSeries

NEGATIVE_TOL = 1e-12
STABILITY_LIMIT = 0.5


class InstabilityDetected(RuntimeError):
    pass


class StabilityLimitExceeded(InstabilityDetected):
    """Explicit step refused: ``h_max dt / (x_f^2 dxi^2)`` above the limit."""

    def __init__(self, number: float, t: float):
        super().__init__(f"explicit stability number {number:.4g} > {STABILITY_LIMIT} at t={t:.6g}")
        self.number = number
        self.t = t


class SolverSingular(RuntimeError):
    pass


class CollapseReached(RuntimeError):
    pass


class RunAborted(RuntimeError):
    """A stepper failed; carries the last valid state and the partial series."""

    def __init__(self, cause: Exception, state, series):
        super().__init__(f"run aborted at t={state.t:.6g}: {type(cause).__name__}: {cause}")
        self.cause = cause
        self.state = state
        self.series = series


@dataclass(frozen=True)
class Grid:
    N: int = 202

    def __post_init__(self):
        if self.N < 8 or self.N % 2:
            raise DomainError(f"N must be even and >= 8, got {self.N}")

    @property
    def dxi(self) -> float:
        return 2.0 / self.N

    @property
    def xi(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.N + 1)


@dataclass
class SimState:
    t: float
    h: np.ndarray
    x_L: float
    x_R: float

    @property
    def x_f(self) -> float:
        return 0.5 * (self.x_R - self.x_L)

    @property
    def x_0(self) -> float:
        return 0.5 * (self.x_R + self.x_L)

    def copy(self) -> "SimState":
        return SimState(self.t, self.h.copy(), self.x_L, self.x_R)


@dataclass(frozen=True)
class StopRule:
    """Stop when ``t >= max_time``, ``x_f < min_halfwidth * x_f(0)`` or
    ``h_max < min_height * h_max(0)``."""

    max_time: float = 10.0
    min_halfwidth: float = 1e-3
    min_height: float = 1e-6

    def __post_init__(self):
        if not self.max_time > 0:
            raise DomainError("max_time must be positive")
        if not (0 <= self.min_halfwidth < 1 and 0 <= self.min_height < 1):
            raise DomainError("min_halfwidth and min_height are fractions in [0, 1)")


SCHEMES = ("explicit", "implicit")
ON_STABILITY = ("stop", "raise", "adapt")


@dataclass(frozen=True)
class SchemeConfig:
    """Time-stepping setup.

    Snapshots are taken every ``snapshot_every`` steps and at the first step
    reaching each of ``snapshot_times``. ``on_stability`` decides what the explicit scheme does when the stability
    number would exceed the limit: ``stop`` ends the run cleanly, ``raise``
    aborts, ``adapt`` halves ``dt`` for the rest of the run.
    """

    scheme: str = "explicit"
    dt: float | None = None
    N: int = 202
    stop: StopRule = field(default_factory=StopRule)
    snapshot_every: int = 0
    snapshot_times: tuple = ()
    record_every: int = 1
    on_stability: str = "stop"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.dt is None:
            object.__setattr__(self, "dt", 1e-5 if self.scheme == "explicit" else 1e-4)
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if self.snapshot_every < 0 or self.record_every < 1:
            raise DomainError("snapshot_every must be >= 0 and record_every >= 1")
        object.__setattr__(self, "snapshot_times", tuple(sorted(float(t) for t in self.snapshot_times)))
        if self.on_stability not in ON_STABILITY:
            raise DomainError(f"on_stability must be one of {ON_STABILITY}")
        Grid(self.N)

    @property
    def grid(self) -> Grid:
        return Grid(self.N)


# ---------------------------------------------------------------- initial data


@dataclass(frozen=True)
class InitialCondition:
    """Level ``h0(x)`` positive on ``(x_L, x_R)`` and zero elsewhere."""

    kind: str
    x_L: float
    x_R: float
    params: dict
    func: object = field(repr=False, compare=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.x_L) & (x < self.x_R)
        out = np.zeros_like(x)
        out[inside] = self.func(x[inside])
        return out

    def descriptor(self) -> dict:
        return {"kind": self.kind, **self.params}


def _edge_shape(s, edge):
    if edge == "quadratic":
        return s * (2.0 - s)
    return s * s * (3.0 - 2.0 * s)


def make_smoothed_block(height: float, x_L0: float, x_R0: float, w: float, edge: str = "quadratic") -> InitialCondition:
    """Flat level ``height`` on ``[x_L0 + w, x_R0 - w]`` ramping to zero at the ends.

    ``edge="quadratic"`` ramps with ``2s - s^2`` (``s`` = distance to the end
    over ``w``): C1 at the plateau and a finite slope at the end, so the
    interfaces can move. ``edge="smoothstep"`` uses ``3s^2 - 2s^3``, whose
    zero end slope keeps the interfaces pinned under the flux law.
    """
    if not height > 0:
        raise DomainError("height must be positive")
    if not x_R0 > x_L0:
        raise DomainError("need x_R0 > x_L0")
    if not 0 < w < 0.5 * (x_R0 - x_L0):
        raise DomainError(f"smoothing width must lie in (0, {(x_R0 - x_L0) / 2}), got {w!r}")
    if edge not in ("quadratic", "smoothstep"):
        raise DomainError(f"edge must be 'quadratic' or 'smoothstep', got {edge!r}")

    def func(x):
        s = np.clip(np.minimum(x - x_L0, x_R0 - x) / w, 0.0, 1.0)
        return height * _edge_shape(s, edge)

    params = {"height": height, "x_L0": x_L0, "x_R0": x_R0, "w": w, "edge": edge}
    return InitialCondition("smoothed_block", float(x_L0), float(x_R0), params, func)


def make_nonsymmetric() -> InitialCondition:
    """Two parabolas joined at ``x = 1/2`` (value 1), support ``[0, 2]``."""

    def func(x):
        return np.where(x <= 0.5, -4.0 * x * x + 4.0 * x, -(4.0 / 9.0) * x * x + (4.0 / 9.0) * x + 8.0 / 9.0)

    return InitialCondition("nonsymmetric", 0.0, 2.0, {}, func)


def make_selfsimilar_ic(B: float, t0: float, c: float, t_start: float = 0.0, x0: float = 0.0) -> InitialCondition:
    """The collapsing dome sampled at ``t_start``."""
    sol = SelfSimilarSolution.create(c, B, t0, x0)
    if sol.regime is not Regime.FINITE_TIME_COLLAPSE:
        raise DomainError(f"self-similar initial data needs c > 3/2, got {c}")
    xf = half_width(sol, t_start)  # raises for t_start >= t0

    def func(x):
        return eval_collapse(sol, x, t_start)

    params = {"B": B, "t0": t0, "t_start": t_start, "c": c, "x0": x0}
    return InitialCondition("selfsimilar", x0 - xf, x0 + xf, params, func)


def make_custom(x, h) -> InitialCondition:
    """Piecewise-linear data through samples; the support is ``[x[0], x[-1]]``."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    if x.ndim != 1 or x.shape != h.shape or x.size < 3:
        raise DomainError("custom data needs matching 1-d x and h with at least 3 samples")
    if np.any(np.diff(x) <= 0):
        raise DomainError("custom x samples must be strictly increasing")
    if h[0] != 0 or h[-1] != 0 or np.any(h[1:-1] <= 0):
        raise DomainError("custom h must vanish at both ends and be positive inside")

    def func(xx):
        return np.interp(xx, x, h)

    params = {"x": x.tolist(), "h": h.tolist()}
    return InitialCondition("custom", float(x[0]), float(x[-1]), params, func)


def initial_state(ic: InitialCondition, grid: Grid, t: float = 0.0) -> SimState:
    xi = grid.xi
    xf = 0.5 * (ic.x_R - ic.x_L)
    x0 = 0.5 * (ic.x_R + ic.x_L)
    h = ic(x0 + xi * xf)
    h[0] = h[-1] = 0.0
    return SimState(t, h, ic.x_L, ic.x_R)


# ---------------------------------------------------------------- steppers


def boundary_slopes(state: SimState, grid: Grid):
    """Second-order one-sided ``h_xi`` at ``xi = -1`` and ``xi = +1``."""
    h = state.h
    dxi = grid.dxi
    s_L = (-3.0 * h[0] + 4.0 * h[1] - h[2]) / (2.0 * dxi)
    s_R = (3.0 * h[-1] - 4.0 * h[-2] + h[-3]) / (2.0 * dxi)
    return s_L, s_R


def _explicit_terms(state, c, grid):
    h = state.h
    dxi = grid.dxi
    s_L, s_R = boundary_slopes(state, grid)
    d1 = (h[2:] - h[:-2]) / (2.0 * dxi)
    d2 = (h[2:] - 2.0 * h[1:-1] + h[:-2]) / (dxi * dxi)
    xi = grid.xi[1:-1]
    adv = (c - 1.0) * d1 * ((xi + 1.0) * s_R - (xi - 1.0) * s_L) / 2.0
    return s_L, s_R, d1, d2, adv


def stability_number(state: SimState, dt: float, grid: Grid) -> float:
    return float(np.max(state.h)) * dt / (state.x_f**2 * grid.dxi**2)


def _finish(state, h_new, s_L, s_R, c, dt):
    h_new[0] = h_new[-1] = 0.0
    if not np.all(np.isfinite(h_new)):
        raise InstabilityDetected(f"non-finite level after step at t={state.t:.6g}")
    lowest = float(np.min(h_new))
    if lowest < -NEGATIVE_TOL:
        raise InstabilityDetected(f"negative level {lowest:.3g} after step at t={state.t:.6g}")
    np.maximum(h_new, 0.0, out=h_new)
    xf = state.x_f
    x_L = state.x_L + dt * (c - 1.0) * s_L / xf
    x_R = state.x_R + dt * (c - 1.0) * s_R / xf
    if not x_R > x_L:
        raise CollapseReached(f"interfaces met at t={state.t + dt:.6g}")
    return SimState(state.t + dt, h_new, x_L, x_R)


def step_explicit(state: SimState, c: float, cfg: SchemeConfig, grid: Grid, dt: float | None = None) -> SimState:
    """Forward Euler in time, centred differences in space."""
    dt = cfg.dt if dt is None else dt
    number = stability_number(state, dt, grid)
    if number > STABILITY_LIMIT:
        raise StabilityLimitExceeded(number, state.t)
    s_L, s_R, d1, d2, adv = _explicit_terms(state, c, grid)
    h = state.h
    h_new = np.empty_like(h)
    h_new[1:-1] = h[1:-1] + dt / state.x_f**2 * (adv + h[1:-1] * d2 - (c - 1.0) * d1 * d1)
    return _finish(state, h_new, s_L, s_R, c, dt)


def step_implicit(state: SimState, c: float, cfg: SchemeConfig, grid: Grid, dt: float | None = None) -> SimState:
    """Diffusion ``h h_xixi`` implicit with the coefficient ``h`` frozen;
    first-derivative terms explicit. One tridiagonal solve per step."""
    dt = cfg.dt if dt is None else dt
    s_L, s_R, d1, _, adv = _explicit_terms(state, c, grid)
    h = state.h
    scale = dt / state.x_f**2
    r = scale * h[1:-1] / grid.dxi**2
    n = r.size
    bands = np.zeros((3, n))
    bands[0, 1:] = -r[:-1]
    bands[1, :] = 1.0 + 2.0 * r
    bands[2, :-1] = -r[1:]
    rhs = h[1:-1] + scale * (adv - (c - 1.0) * d1 * d1)
    h_new = np.zeros_like(h)
    try:
        h_new[1:-1] = solve_banded((1, 1), bands, rhs, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverSingular(f"tridiagonal solve failed at t={state.t:.6g}: {exc}") from exc
    return _finish(state, h_new, s_L, s_R, c, dt)


# ---------------------------------------------------------------- driver


def run(ic: InitialCondition, c: float, cfg: SchemeConfig, t_start: float = 0.0) -> TimeSeries:
    """Integrate until a stop rule fires.

    ``stop_reason`` on the returned series is one of ``max_time``,
    ``min_halfwidth``, ``min_height`` or ``stability_limit``.
    """
    if not c > 1:
        raise DomainError(f"the interface law needs c > 1, got {c}")
    grid = cfg.grid
    stepper = step_explicit if cfg.scheme == "explicit" else step_implicit
    state = initial_state(ic, grid, t_start)
    xf0 = state.x_f
    hmax0 = float(np.max(state.h))
    if not hmax0 > 0:
        raise DomainError("initial data must be positive somewhere on its support")
    stop = cfg.stop
    dt = cfg.dt

    ts, xl, xr, hm = [state.t], [state.x_L], [state.x_R], [hmax0]
    snaps = []
    if cfg.snapshot_every:
        snaps.append(Snapshot(0, state.t, grid.xi, state.h.copy(), state.x_L, state.x_R))

    def series(reason):
        meta = {"c": c, "scheme": cfg.scheme, "N": cfg.N, "dt": cfg.dt, "ic": ic.descriptor()}
        last = Snapshot(step, state.t, grid.xi, state.h.copy(), state.x_L, state.x_R)
        return TimeSeries(ts, xl, xr, hm, snapshots=snaps, metadata=meta, stop_reason=reason, final=last)

    pending = [t for t in cfg.snapshot_times if t > state.t]
    step = 0
    t_base, steps_since = state.t, 0
    reason = ""
    while True:
        if state.t >= stop.max_time - 1e-9 * dt:
            reason = "max_time"
        elif state.x_f < stop.min_halfwidth * xf0:
            reason = "min_halfwidth"
        elif float(np.max(state.h)) < stop.min_height * hmax0:
            reason = "min_height"
        if reason:
            break
        try:
            new = stepper(state, c, cfg, grid, dt)
        except StabilityLimitExceeded as exc:
            if cfg.on_stability == "stop":
                reason = "stability_limit"
                break
            if cfg.on_stability == "adapt":
                t_base, steps_since = state.t, 0
                dt *= 0.5
                continue
            raise RunAborted(exc, state, series("aborted")) from exc
        except (InstabilityDetected, SolverSingular, CollapseReached) as exc:
            raise RunAborted(exc, state, series("aborted")) from exc
        steps_since += 1
        step += 1
        # time from a step count, so runs with commensurate dt share record times
        new.t = t_base + steps_since * dt
        state = new
        if step % cfg.record_every == 0:
            ts.append(state.t)
            xl.append(state.x_L)
            xr.append(state.x_R)
            hm.append(float(np.max(state.h)))
        periodic = cfg.snapshot_every and step % cfg.snapshot_every == 0
        timed = False
        while pending and state.t >= pending[0] - 1e-6 * dt:
            pending.pop(0)
            timed = True
        if periodic or timed:
            snaps.append(Snapshot(step, state.t, grid.xi, state.h.copy(), state.x_L, state.x_R))
    return series(reason)

