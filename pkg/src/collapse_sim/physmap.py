"""Reduction of rock/fluid parameters to the canonical absorption coefficient.

The dimensional balance

    m(1 - alpha) h_t = kappa (h h_xx + (1 - alpha m / m1) h_x^2),   kappa = rho g k / mu_f

becomes ``h_t = h h_xx - (c - 1) h_x^2`` with ``c = alpha m / m1`` once ``x`` is
divided by ``sqrt(kappa / (m (1 - alpha)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

STANDARD_GRAVITY = 9.80665


class DomainError(ValueError):
    """Raised when a parameter lies outside the physically admissible range."""


@dataclass(frozen=True)
class RockFluidParams:
    permeability: float
    block_porosity: float
    fissure_porosity: float
    absorption_fraction: float
    density: float
    viscosity: float
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self):
        for name in ("permeability", "density", "viscosity", "gravity"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        m, m1, alpha = self.block_porosity, self.fissure_porosity, self.absorption_fraction
        if not 0 < m < 1:
            raise DomainError(f"block_porosity must lie in (0, 1), got {m!r}")
        if not 0 < m1 <= m:
            raise DomainError(f"fissure_porosity must lie in (0, block_porosity], got {m1!r}")
        if not 0 <= alpha < 1:
            raise DomainError(f"absorption_fraction must lie in [0, 1), got {alpha!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "RockFluidParams":
        allowed = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - allowed
        if unknown:
            raise DomainError(f"unknown rock/fluid keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class CanonicalReduction:
    c: float
    space_scale: float
    kappa: float

    def to_canonical_x(self, x_physical):
        return x_physical / self.space_scale

    def to_physical_x(self, x_canonical):
        return x_canonical * self.space_scale


def reduce(params: RockFluidParams) -> CanonicalReduction:
    """Collapse the physical parameters to ``c`` and the space rescaling."""
    kappa = params.density * params.gravity * params.permeability / params.viscosity
    alpha = params.absorption_fraction
    c = alpha * params.block_porosity / params.fissure_porosity
    space_scale = math.sqrt(kappa / (params.block_porosity * (1.0 - alpha)))
    return CanonicalReduction(c=c, space_scale=space_scale, kappa=kappa)
