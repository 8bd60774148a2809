"""Grid fields: nonnegative densities living on a GridRegion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hyperbolic import GridRegion


@dataclass(frozen=True, eq=False)
class DensityField:
    """Nonnegative per-cell values on a grid; masked cells hold 0."""

    region: GridRegion
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.region.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.region.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("density values must be finite and nonnegative")
        v = np.where(self.region.mask, v, 0.0)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, region, c):
        return cls(region, np.full(region.shape, float(c)))

    @classmethod
    def from_function(cls, region, func):
        """Sample ``func(z)`` at the cell centers."""
        z = region.centers
        vals = np.where(region.mask, np.asarray(func(z), dtype=float) * np.ones(z.shape), 0.0)
        return cls(region, vals)

    def scaled(self, factor):
        return DensityField(self.region, self.values * float(factor))

    def energy(self, mode="hyperbolic"):
        """Midpoint-rule value of the integral of rho^2 against the mode's area element."""
        return float(np.sum(self.values ** 2 * self.region.area_elements(mode)))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real per-cell values of any sign (infinities allowed) on a grid."""

    region: GridRegion
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.region.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.region.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, region, func):
        z = region.centers
        return cls(region, np.asarray(func(z), dtype=float) * np.ones(z.shape))
