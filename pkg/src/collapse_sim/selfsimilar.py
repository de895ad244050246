"""Closed-form self-similar solutions of ``h_t = h h_xx - (c - 1) h_x^2``.

For ``c > 3/2`` the dome collapses at a finite time ``t0``::

    h = B^2 mu (t0 - t)^(2 mu - 1) F((x - x0) / (B (t0 - t)^mu)),
    F(xi) = (1 - xi^2) / (2 (c - 1)),   mu = (c - 1) / (2c - 3).

For ``1 < c < 3/2`` the same family decays as a power law in ``t0 + t``, and at
``c = 3/2`` both branches meet in an exponentially shrinking solution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .physmap import DomainError

# below this, (t0 - t)^p is formed from logarithms only
_LOG_GUARD = 1e-300


class Regime(enum.Enum):
    WEAK_ABSORPTION = "weak_absorption"  # 0 <= c < 1
    DEGENERATE_UNIT = "degenerate_unit"  # c == 1
    POWER_LAW_DECAY = "power_law_decay"  # 1 < c < 3/2
    EXPONENTIAL_BOUNDARY = "exponential_boundary"  # c == 3/2
    FINITE_TIME_COLLAPSE = "finite_time_collapse"  # c > 3/2


@dataclass(frozen=True)
class AbsorptionParams:
    c: float
    regime: Regime


def classify(c: float) -> AbsorptionParams:
    if not math.isfinite(c) or c < 0:
        raise DomainError(f"absorption coefficient must be finite and >= 0, got {c!r}")
    if c < 1:
        regime = Regime.WEAK_ABSORPTION
    elif c == 1:
        regime = Regime.DEGENERATE_UNIT
    elif c < 1.5:
        regime = Regime.POWER_LAW_DECAY
    elif c == 1.5:
        regime = Regime.EXPONENTIAL_BOUNDARY
    else:
        regime = Regime.FINITE_TIME_COLLAPSE
    return AbsorptionParams(c=float(c), regime=regime)


def mu_of_c(c: float) -> float:
    """Similarity exponent of the collapsing branch, defined for ``c > 3/2``."""
    if not c > 1.5:
        raise DomainError(f"mu_of_c needs c > 3/2, got {c!r}")
    return (c - 1.0) / (2.0 * c - 3.0)


def _check_xi(xi, extended):
    xi = np.asarray(xi, dtype=float)
    if not extended and np.any(np.abs(xi) > 1):
        raise DomainError("profile is only defined on |xi| <= 1 (pass extended=True for zero fill)")
    return xi


def profile_F(xi, c: float, extended: bool = False):
    """Normalized dome profile ``(1 - xi^2) / (2 (c - 1))``; zero for ``|xi| >= 1``."""
    if not c > 1:
        raise DomainError(f"profile_F needs c > 1, got {c!r}")
    xi = _check_xi(xi, extended)
    out = np.where(np.abs(xi) < 1, (1.0 - xi * xi) / (2.0 * (c - 1.0)), 0.0)
    return out if out.ndim else float(out)


def profile_dF(xi, c: float, extended: bool = False):
    if not c > 1:
        raise DomainError(f"profile_dF needs c > 1, got {c!r}")
    xi = _check_xi(xi, extended)
    out = np.where(np.abs(xi) <= 1, -xi / (c - 1.0), 0.0)
    return out if out.ndim else float(out)


def profile_d2F(xi, c: float, extended: bool = False):
    if not c > 1:
        raise DomainError(f"profile_d2F needs c > 1, got {c!r}")
    xi = _check_xi(xi, extended)
    out = np.where(np.abs(xi) <= 1, -1.0 / (c - 1.0) + 0.0 * xi, 0.0)
    return out if out.ndim else float(out)


def _pow(base, exponent):
    """``base ** exponent`` for ``base > 0``, through logs near underflow."""
    base = np.asarray(base, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        direct = np.power(base, exponent)
        logged = np.exp(exponent * np.log(np.maximum(base, np.finfo(float).tiny)))
    return np.where(base < _LOG_GUARD, logged, direct)


@dataclass(frozen=True)
class SelfSimilarSolution:
    """Dome parameters ``(c, B, t0, x0)``.

    ``mu`` is ``(c - 1) / (2c - 3)`` on both sides of ``c = 3/2``; it is negative
    in the power-law regime, where ``t0`` becomes an additive time shift.
    """

    params: AbsorptionParams
    B: float
    t0: float
    x0: float = 0.0
    mu: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.B) and self.B > 0):
            raise DomainError(f"B must be positive, got {self.B!r}")
        regime = self.params.regime
        c = self.params.c
        if regime not in (Regime.FINITE_TIME_COLLAPSE, Regime.POWER_LAW_DECAY):
            raise DomainError(f"no closed-form dome for regime {regime.value} (c={c})")
        object.__setattr__(self, "mu", (c - 1.0) / (2.0 * c - 3.0))

    @classmethod
    def create(cls, c: float, B: float, t0: float, x0: float = 0.0) -> "SelfSimilarSolution":
        return cls(classify(c), float(B), float(t0), float(x0))

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def regime(self) -> Regime:
        return self.params.regime

    def amplitude(self) -> float:
        """The ansatz constant ``A = B^2 mu``."""
        return self.B**2 * self.mu


def _require(sol: SelfSimilarSolution, regime: Regime):
    if sol.regime is not regime:
        raise DomainError(f"solution regime is {sol.regime.value}, expected {regime.value}")


def _time_base(sol: SelfSimilarSolution, t):
    t = np.asarray(t, dtype=float)
    if sol.regime is Regime.FINITE_TIME_COLLAPSE:
        tau = sol.t0 - t
        if np.any(tau <= 0):
            raise DomainError(f"collapse solution undefined at t >= t0={sol.t0}")
    else:
        tau = sol.t0 + t
        if np.any(tau <= 0):
            raise DomainError(f"decay solution undefined for t0 + t <= 0 (t0={sol.t0})")
    return tau


def half_width(sol: SelfSimilarSolution, t):
    """Half-width of the support at time ``t`` for either dome regime."""
    if sol.regime is Regime.POWER_LAW_DECAY and np.any(np.asarray(t) < 0):
        raise DomainError("decay solution is parameterized for t >= 0")
    tau = _time_base(sol, t)
    out = sol.B * _pow(tau, sol.mu)
    return out if np.ndim(out) else float(out)


def h_max(sol: SelfSimilarSolution, t):
    """Level at the dome centre, ``B^2 (t0 -/+ t)^(2mu - 1) / (2 |2c - 3|)``."""
    tau = _time_base(sol, t)
    c = sol.c
    out = sol.B**2 * _pow(tau, 2.0 * sol.mu - 1.0) / (2.0 * abs(2.0 * c - 3.0))
    return out if np.ndim(out) else float(out)


def _eval_dome(sol, x, t, strict):
    tau = _time_base(sol, t)
    xf = sol.B * _pow(tau, sol.mu)
    xi = (np.asarray(x, dtype=float) - sol.x0) / xf
    if strict and np.any(np.abs(xi) > 1):
        raise DomainError("point outside the support (strict=True)")
    # ansatz factorization: h = A tau^lambda F(xi), A = B^2 mu, lambda = 2mu - 1
    scale = abs(sol.amplitude()) * _pow(tau, 2.0 * sol.mu - 1.0)
    out = scale * profile_F(xi, sol.c, extended=True)
    return out if np.ndim(out) else float(out)


def eval_collapse(sol: SelfSimilarSolution, x, t, strict: bool = False):
    """Collapsing dome level at ``(x, t)``, ``t < t0``; zero outside the support."""
    _require(sol, Regime.FINITE_TIME_COLLAPSE)
    return _eval_dome(sol, x, t, strict)


def eval_decay(sol: SelfSimilarSolution, x, t, strict: bool = False):
    """Power-law decaying dome for ``1 < c < 3/2``; zero outside the support."""
    _require(sol, Regime.POWER_LAW_DECAY)
    if np.any(np.asarray(t) < 0):
        raise DomainError("decay solution is parameterized for t >= 0")
    return _eval_dome(sol, x, t, strict)


@dataclass(frozen=True)
class ExponentialLimitSolution:
    """``c = 3/2`` dome: ``h = C^2 e^(-2t/Theta) (1 - (x-x0)^2 / (C^2 Theta e^(-2t/Theta)))``."""

    C: float
    Theta: float
    x0: float = 0.0

    def __post_init__(self):
        if not (self.C > 0 and self.Theta > 0):
            raise DomainError(f"C and Theta must be positive, got C={self.C!r}, Theta={self.Theta!r}")

    def half_width(self, t):
        out = self.C * math.sqrt(self.Theta) * np.exp(-np.asarray(t, dtype=float) / self.Theta)
        return out if np.ndim(out) else float(out)

    def h_max(self, t):
        out = self.C**2 * np.exp(-2.0 * np.asarray(t, dtype=float) / self.Theta)
        return out if np.ndim(out) else float(out)


def eval_exponential(sol: ExponentialLimitSolution, x, t, strict: bool = False):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    decay = np.exp(-2.0 * t / sol.Theta)
    bracket = 1.0 - (x - sol.x0) ** 2 / (sol.C**2 * sol.Theta * decay)
    if strict and np.any(bracket < 0):
        raise DomainError("point outside the support (strict=True)")
    out = sol.C**2 * decay * np.maximum(bracket, 0.0)
    return out if np.ndim(out) else float(out)


def _near_critical_level(eps, side, C, Theta, x, t, x0):
    """Dome at ``c = 3/2 + side*eps`` matched to ``(C, Theta)``, evaluated in logs."""
    t0 = Theta / (4.0 * eps)
    if side > 0:
        # B^2 t0^(1/(2 eps) + 1) = C^2 Theta
        log_B = 0.5 * (math.log(C * C * Theta) - (0.5 / eps + 1.0) * math.log(t0))
        log_tau = np.log(t0 - t)
        mu = 0.25 / eps + 0.5
    else:
        # B t0^(-1/(4 eps) + 1/2) = C sqrt(Theta)
        log_B = math.log(C * math.sqrt(Theta)) + (0.25 / eps - 0.5) * math.log(t0)
        log_tau = np.log(t0 + t)
        mu = -(0.25 / eps - 0.5)
    log_xf = log_B + mu * log_tau
    centre = np.exp(2.0 * log_B + (2.0 * mu - 1.0) * log_tau) / (4.0 * eps)
    bracket = 1.0 - ((x - x0) / np.exp(log_xf)) ** 2
    return centre * np.maximum(bracket, 0.0)


def limit_consistency_check(
    eps: float,
    Theta: float = 1.0,
    C: float = 1.0,
    side: int = +1,
    x0: float = 0.0,
    t_max: float = 1.0,
    n_t: int = 41,
    n_x: int = 201,
) -> float:
    """Sup-norm gap between the ``c = 3/2 +/- eps`` dome and the exponential limit.

    The near-critical dome is matched through ``t0 = Theta / (4 eps)`` and the
    amplitude constant; the gap is measured on a fixed grid covering
    ``t in [0, t_max]`` and ``|x - x0| <= C sqrt(Theta)``.
    """
    if not 0 < eps <= 0.1:
        raise DomainError(f"eps must lie in (0, 0.1], got {eps!r}")
    if side not in (-1, +1):
        raise DomainError("side must be +1 (from above) or -1 (from below)")
    limit = ExponentialLimitSolution(C=C, Theta=Theta, x0=x0)
    ts = np.linspace(0.0, t_max, n_t)[:, None]
    half = C * math.sqrt(Theta)
    xs = np.linspace(x0 - half, x0 + half, n_x)[None, :]
    near = _near_critical_level(eps, side, C, Theta, xs, ts, x0)
    exact = eval_exponential(limit, xs, ts)
    return float(np.max(np.abs(near - exact)))
