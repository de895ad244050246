"""Shooting solver for the dome-profile eigenvalue problem.

Finds ``mu`` and ``F`` on ``[0, 1]`` with

    F F'' - (c - 1) F'^2 - xi F' + ((2 mu - 1) / mu) F = 0,
    F'(0) = 0,  F(1) = 0,  F'(1) = -1 / (c - 1),

without using the closed form. The equation degenerates at ``xi = 1``, so the
backward integration starts at ``xi = 1 - delta`` from the regular local
expansion in ``s = 1 - xi``::

    F = s / (c - 1) + a2 s^2,   a2 = (1 - mu) / (2 mu (2 - c)).

``a2`` follows from the O(s) balance ``a2 (2/(c-1) - 2) = (1 - k)/(c-1)``,
``k = (2mu - 1)/mu``. At ``c = 2`` that balance is resonant: a regular expansion
exists only for ``mu = 1`` and ``a2`` becomes the free shooting parameter.

Backward integration amplifies start-data errors roughly like
``(2 delta)^(1 - c)``, which pins ``mu`` sharply but spoils the profile for large
``c``. The reported profile is therefore re-integrated outward from ``xi = 0``
(a stable direction) at the converged ``mu`` and rescaled to vanish at ``xi = 1``
using the invariance ``F -> l^2 F(xi / l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .physmap import DomainError

OK, HIT_ZERO, BLOW_UP = 0, 1, 2
# roots this close to mu = 1 sit on the linear solution, see solve_eigenvalue
LINEAR_EXCLUSION = 1e-7
SCAN_RETRIES = 3
_BLOW_UP_LEVEL = 1e100


class IntegrationBreakdown(RuntimeError):
    """The backward trajectory left the admissible region before ``xi = 0``.

    ``direction`` is +1 when ``F`` reached zero (the trajectory was turning
    down, the ``F'(0) > 0`` side) and -1 when it blew up.
    """

    def __init__(self, direction: int, xi: float):
        kind = "F reached zero" if direction > 0 else "F blew up"
        super().__init__(f"{kind} at xi={xi:.6g}")
        self.direction = direction
        self.xi = xi


class BracketError(RuntimeError):
    pass


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class ShootingConfig:
    c: float
    start_offset: float = 1e-3
    ode_step: float = 1e-4
    mu_bracket: tuple = (0.5005, 20.0)
    tolerance: float = 1e-6
    mu_tol: float = 1e-12
    scan_points: int = 120
    max_iter: int = 200

    def __post_init__(self):
        if not self.c > 1.5:
            raise DomainError(f"shooting needs c > 3/2, got {self.c!r}")
        if not 0 < self.start_offset <= 1e-3:
            raise DomainError("start_offset must lie in (0, 1e-3]")
        if not 0 < self.ode_step <= self.start_offset:
            raise DomainError("ode_step must be positive and no larger than start_offset")
        lo, hi = self.mu_bracket
        if not (hi > lo and hi > 0):
            raise DomainError(f"mu_bracket must have positive width with positive values, got {self.mu_bracket}")
        if self.scan_points < 2:
            raise DomainError("scan_points must be >= 2")

    def refined(self) -> "ShootingConfig":
        """Same problem with the start offset and step halved."""
        return ShootingConfig(
            c=self.c,
            start_offset=self.start_offset / 2,
            ode_step=self.ode_step / 2,
            mu_bracket=self.mu_bracket,
            tolerance=self.tolerance,
            mu_tol=self.mu_tol,
            scan_points=self.scan_points,
            max_iter=self.max_iter,
        )


@dataclass
class EigenSolution:
    mu_numeric: float
    xi: np.ndarray
    profile: np.ndarray
    residual_at_zero: float
    iterations: int
    candidates: list = field(default_factory=list)
    resonant: bool = False


def is_resonant(c: float) -> bool:
    return abs(c - 2.0) < 1e-12


def start_coefficient(c: float, mu: float) -> float:
    """Second coefficient of the regular expansion at the interface."""
    return (1.0 - mu) / (2.0 * mu * (2.0 - c))


@njit(cache=True)
def _accel(c, k, xi, F, G):
    return ((c - 1.0) * G * G + xi * G - k * F) / F


@njit(cache=True)
def _shoot_inward(c, mu, a2, delta, step, store, xs, Fs, Gs):
    """RK4 from ``xi = 1 - delta`` down to ``xi = 0``.

    Returns ``(status, xi, F, G, n_stored)``.
    """
    k = (2.0 * mu - 1.0) / mu
    a1 = 1.0 / (c - 1.0)
    F = a1 * delta + a2 * delta * delta
    G = -a1 - 2.0 * a2 * delta
    x_start = 1.0 - delta
    n = int(math.ceil(x_start / step - 1e-9))
    h = -x_start / n
    xi = x_start
    if store:
        xs[0] = xi
        Fs[0] = F
        Gs[0] = G
    for i in range(n):
        f1 = _accel(c, k, xi, F, G)
        Fa = F + 0.5 * h * G
        Ga = G + 0.5 * h * f1
        xm = xi + 0.5 * h
        f2 = _accel(c, k, xm, Fa, Ga)
        Fb = F + 0.5 * h * Ga
        Gb = G + 0.5 * h * f2
        f3 = _accel(c, k, xm, Fb, Gb)
        Fc = F + h * Gb
        Gc = G + h * f3
        f4 = _accel(c, k, xi + h, Fc, Gc)
        F = F + h / 6.0 * (G + 2.0 * Ga + 2.0 * Gb + Gc)
        G = G + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        xi = x_start + (i + 1) * h
        if not F > 0.0:
            return HIT_ZERO, xi, F, G, i + 1
        if not (abs(G) < _BLOW_UP_LEVEL and F < _BLOW_UP_LEVEL):
            return BLOW_UP, xi, F, G, i + 1
        if store:
            xs[i + 1] = xi
            Fs[i + 1] = F
            Gs[i + 1] = G
    return OK, 0.0, F, G, n + 1


@njit(cache=True)
def _integrate_outward(c, mu, F0, xi_end, f_floor, xs, Fs, Gs):
    """RK4 from ``xi = 0`` (F = F0, F' = 0) toward ``xi_end``.

    Stops early once ``F`` drops below ``f_floor`` or the step would violate
    the explicit stability bound of the stiff approach to ``F = 0``.
    Returns the number of stored nodes.
    """
    k = (2.0 * mu - 1.0) / mu
    F = F0
    G = 0.0
    xi = 0.0
    xs[0] = xi
    Fs[0] = F
    Gs[0] = G
    n = xs.shape[0] - 1
    h = xi_end / n
    for i in range(n):
        # |d accel / dG| ~ xi / F near the front; RK4 is stable for h |.| < 2.78
        if F < f_floor or h * (xi + h) > 1.0 * F:
            return i + 1
        f1 = _accel(c, k, xi, F, G)
        Fa = F + 0.5 * h * G
        Ga = G + 0.5 * h * f1
        xm = xi + 0.5 * h
        f2 = _accel(c, k, xm, Fa, Ga)
        Fb = F + 0.5 * h * Ga
        Gb = G + 0.5 * h * f2
        f3 = _accel(c, k, xm, Fb, Gb)
        Fc = F + h * Gb
        Gc = G + h * f3
        f4 = _accel(c, k, xi + h, Fc, Gc)
        F = F + h / 6.0 * (G + 2.0 * Ga + 2.0 * Gb + Gc)
        G = G + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        xi = (i + 1) * h
        if not F > 0.0:
            return i + 1
        xs[i + 1] = xi
        Fs[i + 1] = F
        Gs[i + 1] = G
    return n + 1


def _n_steps(cfg: ShootingConfig) -> int:
    return int(math.ceil((1.0 - cfg.start_offset) / cfg.ode_step - 1e-9))


def integrate_from_interface(c: float, mu: float, cfg: ShootingConfig, a2: float | None = None):
    """Integrate backward from the interface to ``xi = 0``.

    Returns ``(xi, F, F_prime, F_prime_at_zero)`` with ``xi`` decreasing from
    ``1 - delta`` to 0. Raises IntegrationBreakdown if ``F`` reaches zero or
    blows up on the way.
    """
    if a2 is None:
        if is_resonant(c):
            raise DomainError("c = 2 is resonant; pass the free coefficient a2 explicitly")
        a2 = start_coefficient(c, mu)
    n = _n_steps(cfg)
    xs = np.empty(n + 1)
    Fs = np.empty(n + 1)
    Gs = np.empty(n + 1)
    status, xi, F, G, m = _shoot_inward(c, mu, a2, cfg.start_offset, cfg.ode_step, True, xs, Fs, Gs)
    if status != OK:
        raise IntegrationBreakdown(+1 if status == HIT_ZERO else -1, xi)
    return xs, Fs, Gs, float(G)


_dummy = np.empty(1)


def _symmetry_sign(c, mu, a2, delta, step):
    """Sign of ``F'(0)``; breakdowns count as the side they diverge to."""
    status, _, _, G, _ = _shoot_inward(c, mu, a2, delta, step, False, _dummy, _dummy, _dummy)
    if status == HIT_ZERO:
        return 1.0, math.inf
    if status == BLOW_UP:
        return -1.0, math.inf
    if G == 0.0:
        return 0.0, 0.0
    return math.copysign(1.0, G), abs(G)


def _bisect(sign_at, lo, hi, tol, max_iter):
    s_lo, r_lo = sign_at(lo)
    s_hi, r_hi = sign_at(hi)
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        s_mid, r_mid = sign_at(mid)
        it += 1
        if s_mid == 0.0:
            return mid, mid, r_mid, it
        if s_mid == s_lo:
            lo, r_lo = mid, r_mid
        else:
            hi, r_hi = mid, r_mid
    best = lo if r_lo <= r_hi else hi
    return 0.5 * (lo + hi), best, min(r_lo, r_hi), it


def _scan_grid(cfg: ShootingConfig, resonant: bool):
    if resonant:
        a1 = 1.0 / (cfg.c - 1.0)
        return np.linspace(-10.0 * a1, 10.0 * a1, cfg.scan_points)
    lo, hi = cfg.mu_bracket
    lo = max(lo, 0.5 + 1e-9)
    # uniform in log of k = (2mu - 1)/mu, which resolves mu near 1/2 for large c
    k_lo, k_hi = 2.0 - 1.0 / lo, 2.0 - 1.0 / hi
    return 1.0 / (2.0 - np.geomspace(k_lo, k_hi, cfg.scan_points))


def _sign_function(cfg: ShootingConfig, resonant: bool):
    c, delta, step = cfg.c, cfg.start_offset, cfg.ode_step
    if resonant:
        return lambda a2: _symmetry_sign(c, 1.0, a2, delta, step)
    return lambda mu: _symmetry_sign(c, mu, start_coefficient(c, mu), delta, step)


def find_roots(cfg: ShootingConfig):
    """All sign changes of ``F'(0)`` over the scan grid, each refined by bisection.

    Returns a list of ``(root, best_endpoint, residual, iterations)``. In the
    resonant case the root is the free start coefficient, not ``mu``.
    """
    resonant = is_resonant(cfg.c)
    sign_at = _sign_function(cfg, resonant)
    grid = _scan_grid(cfg, resonant)
    signs = [sign_at(p)[0] for p in grid]
    roots = []
    for i in range(len(grid) - 1):
        if signs[i] == 0.0:
            roots.append((grid[i], grid[i], 0.0, 0))
        elif signs[i + 1] != 0.0 and signs[i] != signs[i + 1]:
            roots.append(_bisect(sign_at, grid[i], grid[i + 1], cfg.mu_tol, cfg.max_iter))
    return roots


def _drift(root, cfg: ShootingConfig, resonant: bool):
    """Shift of a root when the start offset and step are halved."""
    fine = cfg.refined()
    sign_at = _sign_function(fine, resonant)
    width = max(1e-6, 1e-6 * abs(root))
    lo, hi = root - width, root + width
    if sign_at(lo)[0] == sign_at(hi)[0]:
        return math.inf
    moved, _, _, _ = _bisect(sign_at, lo, hi, cfg.mu_tol, cfg.max_iter)
    return abs(moved - root)


def reconstruct_profile(c: float, mu: float, cfg: ShootingConfig, a2: float | None = None):
    """Symmetric profile at a given ``mu``, integrated outward and rescaled.

    Nodes are ``xi = j * ode_step`` up to ``1 - start_offset``. The last few
    nodes, where the outward march turns stiff, are filled from the interface
    expansion.
    """
    if a2 is None:
        a2 = start_coefficient(c, mu)
    step = cfg.ode_step
    # first pass from F(0) = 1 locates the zero xi_z; F -> F(xi xi_z)/xi_z^2 vanishes at 1
    n_probe = int(math.ceil(1.5 / step))
    xs = np.empty(n_probe + 1)
    Fs = np.empty(n_probe + 1)
    Gs = np.empty(n_probe + 1)
    reach = 1.5
    for _ in range(12):
        m = _integrate_outward(c, mu, 1.0, reach, 0.05, xs, Fs, Gs)
        if m <= n_probe:
            break
        reach *= 2.0
    else:
        raise NoConvergence(f"outward profile did not approach zero for mu={mu}")
    xe, Fe, Ge = xs[m - 1], Fs[m - 1], Gs[m - 1]
    k = (2.0 * mu - 1.0) / mu
    acc = ((c - 1.0) * Ge * Ge + xe * Ge - k * Fe) / Fe
    # smallest positive root of Fe + Ge d + acc d^2 / 2
    if abs(acc) < 1e-300:
        d = -Fe / Ge
    else:
        disc = Ge * Ge - 2.0 * acc * Fe
        d = (-Ge - math.copysign(math.sqrt(max(disc, 0.0)), Ge)) / acc
        alt = 2.0 * Fe / (-Ge - math.copysign(math.sqrt(max(disc, 0.0)), Ge))
        cands = [v for v in (d, alt) if v > 0]
        d = min(cands) if cands else -Fe / Ge
    xi_zero = xe + d
    F0 = 1.0 / xi_zero**2

    xi_end = 1.0 - cfg.start_offset
    n = int(round(xi_end / step))
    xs = np.empty(n + 1)
    Fs = np.empty(n + 1)
    Gs = np.empty(n + 1)
    m = _integrate_outward(c, mu, F0, xi_end, 0.0, xs, Fs, Gs)
    xi = np.linspace(0.0, xi_end, n + 1)
    F = np.empty(n + 1)
    F[:m] = Fs[:m]
    s = 1.0 - xi[m:]
    F[m:] = s / (c - 1.0) + a2 * s * s
    return xi, F


def solve_eigenvalue(c: float, cfg: ShootingConfig | None = None) -> EigenSolution:
    """Locate the similarity exponent by shooting on the symmetry condition.

    Every sign change of ``F'(0)`` in the bracket is refined by bisection.
    Truncating the interface expansion also produces sign changes that move
    when the start offset is refined; the reported eigenvalue is the root that
    moves least under halving ``start_offset`` and ``ode_step``.

    A sign change at ``mu = 1`` is never the eigenvalue when ``c != 2``: there
    the start coefficient vanishes, the backward trajectory is the exact
    non-symmetric solution ``(1 - xi)/(c - 1)`` and neighbouring ``mu`` break
    down in opposite directions around it. Such roots are listed with
    ``excluded`` set. All roots and their drifts are kept in ``candidates``.

    A close pair of sign changes can fall between two scan nodes and cancel,
    so when no usable root turns up the scan is repeated with twice the
    points, up to ``SCAN_RETRIES`` times.
    """
    if cfg is None:
        cfg = ShootingConfig(c=c)
    elif cfg.c != c:
        raise DomainError(f"config is for c={cfg.c}, asked for c={c}")
    for attempt in range(SCAN_RETRIES + 1):
        try:
            return _solve_scan(c, cfg)
        except (BracketError, NoConvergence):
            if attempt == SCAN_RETRIES:
                raise
            cfg = replace(cfg, scan_points=2 * cfg.scan_points)


def _solve_scan(c: float, cfg: ShootingConfig) -> EigenSolution:
    resonant = is_resonant(c)
    roots = find_roots(cfg)
    if not roots:
        what = "start coefficient" if resonant else "mu"
        raise BracketError(f"no sign change of F'(0) found over the {what} scan for c={c}")
    candidates = []
    for root, best, residual, its in roots:
        linear = not resonant and abs(root - 1.0) < LINEAR_EXCLUSION
        candidates.append(
            {
                "root": float(root),
                "best": float(best),
                "residual": residual,
                "iterations": its,
                "drift": math.inf if linear else _drift(root, cfg, resonant),
                "excluded": "linear solution" if linear else "",
            }
        )
    chosen = min(candidates, key=lambda r: (r["drift"], r["root"]))
    if not math.isfinite(chosen["drift"]):
        raise NoConvergence(f"no sign change of F'(0) survives start-offset refinement for c={c}")
    if resonant:
        mu, a2 = 1.0, chosen["best"]
    else:
        mu, a2 = chosen["best"], None
    xi, F = reconstruct_profile(c, mu, cfg, a2=a2)
    return EigenSolution(
        mu_numeric=float(mu),
        xi=xi,
        profile=F,
        residual_at_zero=float(chosen["residual"]),
        iterations=int(sum(r["iterations"] for r in candidates)),
        candidates=candidates,
        resonant=resonant,
    )


def ode_residual(xi, F, mu: float, c: float) -> float:
    """Sup-norm of the profile equation's left side at interior nodes.

    Derivatives are centred differences on the (uniform) sample grid.
    """
    xi = np.asarray(xi, dtype=float)
    F = np.asarray(F, dtype=float)
    if xi.size < 3:
        return 0.0
    dx = xi[1] - xi[0]
    Fc = F[1:-1]
    d1 = (F[2:] - F[:-2]) / (2.0 * dx)
    d2 = (F[2:] - 2.0 * Fc + F[:-2]) / (dx * dx)
    k = (2.0 * mu - 1.0) / mu
    res = Fc * d2 - (c - 1.0) * d1 * d1 - xi[1:-1] * d1 + k * Fc
    return float(np.max(np.abs(res)))
