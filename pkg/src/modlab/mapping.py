"""Dilatation of sampled mappings and a numerical check of the modulus inequality.

For a map ``f`` with Wirtinger derivatives ``f_z = (f_x - i f_y) / 2`` and
``f_zbar = (f_x + i f_y) / 2`` the norm is ``|f_z| + |f_zbar|``, the Jacobian
``|f_z|^2 - |f_zbar|^2`` and the dilatation ``K = norm / (|f_z| - |f_zbar|)``
(1 where the norm vanishes, infinite where only the Jacobian does).
The verifier compares the modulus of a pushed-forward family with
``integral K rho^2`` for an admissible ``rho`` of the original family.
"""

from __future__ import annotations

import cmath
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import OutOfRegionError
from .fields import DensityField, ScalarField
from .hyperbolic import GridRegion, check_mode, euclidean_disk_of_ball, hyp_distance
from .modulus import CurveFamily, ModulusResult, modulus

PROVENANCES = ("analytic", "tabulated")


def _wirtinger_fd(region, f_values):
    h = region.cell_size
    fy, fx = np.gradient(np.asarray(f_values, dtype=complex), h, h)
    return (fx - 1j * fy) / 2.0, (fx + 1j * fy) / 2.0


@dataclass(frozen=True, eq=False)
class MapSample:
    region: GridRegion
    f_values: np.ndarray
    fz: np.ndarray
    fzbar: np.ndarray
    provenance: str = "analytic"
    func: Optional[Callable] = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        for name in ("f_values", "fz", "fzbar"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != self.region.shape:
                raise ValueError(f"{name} has shape {arr.shape}, grid is {self.region.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_analytic(cls, region, f, fz, fzbar, label=""):
        z = region.centers
        ones = np.ones(z.shape)
        return cls(region, f(z) * ones, fz(z) * ones, fzbar(z) * ones, "analytic", f, label)

    @classmethod
    def from_values(cls, region, f_values, label=""):
        """Tabulated map; derivatives come from central differences of the values."""
        fz, fzbar = _wirtinger_fd(region, f_values)
        return cls(region, f_values, fz, fzbar, "tabulated", None, label)

    def wirtinger_residual(self, where=None):
        """Max deviation of ``fz, fzbar`` from central differences of ``f_values``.

        Only interior cells whose four neighbors are unmasked (and, if given,
        inside ``where``) are compared.
        """
        fz, fzbar = _wirtinger_fd(self.region, self.f_values)
        m = self.region.mask.copy()
        if where is not None:
            m &= where
        inner = np.zeros_like(m)
        inner[1:-1, 1:-1] = (m[1:-1, 1:-1] & m[:-2, 1:-1] & m[2:, 1:-1]
                             & m[1:-1, :-2] & m[1:-1, 2:])
        if not inner.any():
            return 0.0
        return float(max(np.max(np.abs(fz - self.fz)[inner]),
                         np.max(np.abs(fzbar - self.fzbar)[inner])))

    def evaluate(self, z):
        """Map points; analytic samples use the formula, tabulated ones bilinear reads."""
        if self.func is not None:
            return self.func(z)
        reg, h = self.region, self.region.cell_size
        z = np.asarray(z, dtype=complex)
        fx = (z.real - reg.x0) / h - 0.5
        fy = (z.imag - reg.y0) / h - 0.5
        i = np.clip(np.floor(fx).astype(int), 0, reg.nx - 2)
        j = np.clip(np.floor(fy).astype(int), 0, reg.ny - 2)
        tx, ty = fx - i, fy - j
        if np.any((tx < -1e-9) | (tx > 1 + 1e-9) | (ty < -1e-9) | (ty > 1 + 1e-9)):
            raise OutOfRegionError("point outside the tabulated map's grid")
        F = self.f_values
        return ((1 - tx) * (1 - ty) * F[j, i] + tx * (1 - ty) * F[j, i + 1]
                + (1 - tx) * ty * F[j + 1, i] + tx * ty * F[j + 1, i + 1])


# -- named analytic families --------------------------------------------------

def mobius_map(a=0j, theta=0.0):
    a = complex(a)
    rot = cmath.exp(1j * theta)

    def f(z):
        return rot * (z - a) / (1 - np.conj(a) * z)

    def fz(z):
        return rot * (1 - abs(a) ** 2) / (1 - np.conj(a) * z) ** 2

    return f, fz, lambda z: np.zeros(np.shape(z), dtype=complex)


def affine_map(k):
    """``z -> z + k conj(z)``, constant dilatation ``(1 + |k|) / (1 - |k|)``."""
    k = complex(k)
    return (lambda z: z + k * np.conj(z),
            lambda z: np.ones(np.shape(z), dtype=complex),
            lambda z: np.full(np.shape(z), k, dtype=complex))


def radial_stretch(alpha):
    """``z -> z |z|^(alpha - 1)``, constant dilatation ``max(alpha, 1 / alpha)`` off 0."""
    alpha = float(alpha)

    def f(z):
        return z * np.abs(z) ** (alpha - 1)

    def fz(z):
        return (alpha + 1) / 2 * np.abs(z) ** (alpha - 1) + 0j

    def fzbar(z):
        z = np.asarray(z, dtype=complex)
        phase = np.where(z == 0, 1.0, z / np.where(z == 0, 1.0, np.conj(z)))
        return (alpha - 1) / 2 * np.abs(z) ** (alpha - 1) * phase

    return f, fz, fzbar


NAMED_MAPS = {"conformal": mobius_map, "mobius": mobius_map, "affine": affine_map,
              "radial_stretch": radial_stretch}


def map_from_config(cfg, region) -> MapSample:
    """Build a sample from ``{"map": name, **params}``.

    ``conformal``/``mobius`` take ``a_re, a_im, theta``; ``affine`` takes
    ``k`` (or ``k_re, k_im``); ``radial_stretch`` takes ``alpha``.
    """
    cfg = dict(cfg)
    name = cfg.pop("map")
    if name in ("conformal", "mobius"):
        funcs = mobius_map(complex(cfg.get("a_re", 0.0), cfg.get("a_im", 0.0)), cfg.get("theta", 0.0))
    elif name == "affine":
        k = cfg["k"] if "k" in cfg else complex(cfg.get("k_re", 0.0), cfg.get("k_im", 0.0))
        funcs = affine_map(k)
    elif name == "radial_stretch":
        funcs = radial_stretch(cfg["alpha"])
    else:
        raise ValueError(f"unknown map {name!r}; known: {sorted(NAMED_MAPS)}")
    label = name + "(" + ",".join(f"{k}={v}" for k, v in sorted(cfg.items())) + ")"
    return MapSample.from_analytic(region, *funcs, label=label)


# -- dilatation ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DilatationField:
    region: GridRegion
    K: np.ndarray
    J: np.ndarray
    norm: np.ndarray

    def as_field(self, component="K"):
        return ScalarField(self.region, getattr(self, component))


def dilatation(ms: MapSample) -> DilatationField:
    """Per-cell dilatation, Jacobian and norm of the sampled derivatives.

    Orientation-reversing cells (``J < 0``) get ``norm / ||f_z| - |f_zbar||``
    so that ``K >= 1`` wherever it is finite.
    """
    a, b = np.abs(ms.fz), np.abs(ms.fzbar)
    norm = a + b
    J = (a - b) * (a + b)
    K = np.full(norm.shape, np.inf)
    regular = J != 0
    K[regular] = norm[regular] / np.abs(a - b)[regular]
    K[norm == 0] = 1.0
    return DilatationField(ms.region, K, J, norm)


def poletsky_rhs(ms: MapSample, rho: DensityField, mode="hyperbolic") -> float:
    """Midpoint-rule value of the integral of ``K rho^2`` against the mode's area element.

    Cells with ``rho = 0`` contribute nothing even where ``K`` is infinite.
    """
    if not rho.region.same_grid(ms.region):
        raise ValueError("density and map sample live on different grids")
    K = dilatation(ms).K
    live = (rho.values > 0) & ms.region.mask
    if np.any(np.isinf(K[live])):
        raise ValueError("dilatation is infinite on a cell where rho > 0")
    w = ms.region.area_elements(check_mode(mode))
    return float(np.sum(np.where(live, K, 0.0) * rho.values ** 2 * w))


def poletsky_constant(r0, R0):
    """Factor ``1 / ((1 - R0^2)^2 (1 - r0^2)^2)`` of the chart-comparison form of the bound."""
    return 1.0 / ((1.0 - R0 ** 2) ** 2 * (1.0 - r0 ** 2) ** 2)


def image_region(image: CurveFamily, n_cells, pad_cells=3):
    """Grid with about ``n_cells`` square cells covering the image family."""
    v = image.vertices()
    w = v.real.max() - v.real.min()
    hgt = v.imag.max() - v.imag.min()
    h = np.sqrt(max(w * hgt, 1e-300) / n_cells)
    # the padding enlarges the box, so iterate once to keep the count close
    h = np.sqrt((w + 2 * pad_cells * h) * (hgt + 2 * pad_cells * h) / n_cells)
    return GridRegion.from_bounds(v.real.min() - pad_cells * h, v.real.max() + pad_cells * h,
                                  v.imag.min() - pad_cells * h, v.imag.max() + pad_cells * h, h)


@dataclass(frozen=True, eq=False)
class PoletskyReport:
    lhs: float
    rhs: float
    rel_tol: float
    mode: str
    image_result: ModulusResult = field(repr=False)
    source_result: Optional[ModulusResult] = field(repr=False, default=None)
    label: str = ""

    @property
    def margin(self):
        return self.rhs - self.lhs

    @property
    def relative_margin(self):
        return self.margin / self.rhs if self.rhs else np.inf

    @property
    def passed(self):
        return self.lhs <= self.rhs * (1.0 + self.rel_tol)

    def to_dict(self):
        return {"label": self.label, "mode": self.mode, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "relative_margin": self.relative_margin,
                "rel_tol": self.rel_tol, "passed": self.passed,
                "lhs_kkt_residual": self.image_result.kkt_residual}


def poletsky_verify(ms: MapSample, family: CurveFamily, region: GridRegion, rho=None,
                    mode="euclidean", rel_tol=0.03, image_cells=None, workers=1,
                    solver_tol=1e-7) -> PoletskyReport:
    """Evaluate both sides of ``M(f(Gamma)) <= integral K rho^2`` numerically.

    The left side is the modulus of the vertex-wise image of ``family`` on a
    grid over its bounding box with the same number of cells as ``region``
    (or ``image_cells``). Without ``rho`` the right side uses the optimal
    density of ``family`` on ``region``.
    """
    if not ms.region.same_grid(region):
        raise ValueError("map sample must be tabulated on the family's region")
    check_mode(mode)
    image = family.map(ms.evaluate)
    img_region = image_region(image, image_cells or region.nx * region.ny)

    def lhs_job():
        return modulus(image, img_region, mode, tol=solver_tol)

    def rhs_job():
        return modulus(family, region, mode, tol=solver_tol)

    if rho is None and workers > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            lhs_f, rhs_f = pool.submit(lhs_job), pool.submit(rhs_job)
            lhs_res, src = lhs_f.result(), rhs_f.result()
    else:
        lhs_res = lhs_job()
        src = rhs_job() if rho is None else None
    density = src.density if rho is None else rho
    rhs = poletsky_rhs(ms, density, mode)
    return PoletskyReport(lhs_res.value, rhs, rel_tol, mode, lhs_res, src, ms.label)


# -- finite mean oscillation ---------------------------------------------------

def fmo_statistic(Q: ScalarField, p0, radii):
    """Normalized mean oscillation of ``Q`` over hyperbolic balls around ``p0``.

    For each radius ``eps`` returns ``(eps, osc)`` with
    ``osc = (1 / |B|) integral_B |Q - Q_B| dh`` and ``Q_B`` the hyperbolic
    average over ``B = B_h(p0, eps)``, both by the midpoint rule on the
    cells whose centers lie in the ball.

    Raises
    ------
    OutOfRegionError
        If a ball leaves the grid, touches masked cells or contains no cell.
    """
    region = Q.region
    centers = region.centers
    w = region.area_elements("hyperbolic")
    xmin, xmax, ymin, ymax = region.bounds
    h = region.cell_size
    out = []
    for eps in radii:
        c, rad = euclidean_disk_of_ball(p0, eps)
        if (c.real - rad < xmin + h / 2 or c.real + rad > xmax - h / 2
                or c.imag - rad < ymin + h / 2 or c.imag + rad > ymax - h / 2):
            raise OutOfRegionError(f"ball of radius {eps} leaves the grid")
        inside = hyp_distance(p0, centers) < eps
        if np.any(inside & ~region.mask):
            raise OutOfRegionError(f"ball of radius {eps} touches masked cells")
        if not inside.any():
            raise OutOfRegionError(f"ball of radius {eps} contains no cell center")
        q, wq = Q.values[inside], w[inside]
        # centering on one sample makes a constant field give exactly 0
        dev = q - q[0]
        dev = dev - np.sum(wq * dev) / np.sum(wq)
        osc = np.sum(wq * np.abs(dev)) / np.sum(wq)
        out.append((float(eps), float(osc)))
    return out
