"""Polyline curves, line integrals and arc-length reparameterization.

Curves are polylines with straight (Euclidean) segments. Hyperbolic length
of a segment is the integral of ``2 |dz| / (1 - |z|^2)`` along it; against a
grid density the same element gives the line integral of the density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq

from .exceptions import OutOfRegionError
from .fields import DensityField
from .hyperbolic import as_disk_points, check_mode, hyp_distance, length_density

_GL8 = np.polynomial.legendre.leggauss(8)
_GL4 = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True, eq=False)
class Curve:
    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.array(as_disk_points(self.vertices, "vertices"), dtype=complex).ravel()
        if v.size < 2:
            raise ValueError("a curve needs at least two vertices")
        ends = np.append(v, v[0]) if self.closed else v
        if np.any(np.diff(ends) == 0):
            raise ValueError("consecutive vertices must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def segment(cls, z0, z1, n=2):
        return cls(np.linspace(complex(z0), complex(z1), n))

    @classmethod
    def from_function(cls, alpha, a, b, n):
        return cls(np.asarray(alpha(np.linspace(a, b, n)), dtype=complex))

    def segments(self):
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1)
        return v[:-1], v[1:]

    def map(self, f):
        """Vertex-wise image ``f(vertices)``."""
        return Curve(np.asarray(f(self.vertices), dtype=complex), self.closed)

    def __len__(self):
        return self.vertices.size


def _gl_pieces(p, q, mode, rule=_GL8):
    x, w = rule
    d = q - p
    nodes = p[:, None] + d[:, None] * (1.0 + x[None, :]) / 2.0
    return np.sum(w * length_density(nodes, mode), axis=1) * np.abs(d) / 2.0


def segment_lengths(p, q, mode="hyperbolic", rtol=1e-13, max_depth=40):
    """Length of each straight segment ``[p_k, q_k]``.

    Adaptive Gauss-Legendre: a piece is accepted when its 8-point value and
    the sum over its two halves agree to ``rtol``; otherwise both halves
    are refined further.
    """
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    if check_mode(mode) == "euclidean":
        return np.abs(q - p)
    out = np.zeros(p.shape, dtype=float)
    owner = np.arange(p.size)
    whole = _gl_pieces(p, q, mode)
    for _ in range(max_depth):
        if owner.size == 0:
            break
        mid = (p + q) / 2.0
        left, right = _gl_pieces(p, mid, mode), _gl_pieces(mid, q, mode)
        halves = left + right
        ok = np.abs(halves - whole) <= rtol * halves + 1e-300
        np.add.at(out, owner[ok], halves[ok])
        keep = ~ok
        p, mid, q, owner = p[keep], mid[keep], q[keep], owner[keep]
        p, q = np.concatenate([p, mid]), np.concatenate([mid, q])
        whole = np.concatenate([left[keep], right[keep]])
        owner = np.concatenate([owner, owner])
    else:
        np.add.at(out, owner, whole)
    return out


def hyp_length(c: Curve, mode="hyperbolic") -> float:
    """Length of the polyline (hyperbolic by default, or Euclidean)."""
    p, q = c.segments()
    return float(segment_lengths(p, q, mode).sum())


@dataclass(frozen=True, eq=False)
class LengthFunction:
    """Nondecreasing length function sampled at parameter knots."""

    parameter_knots: np.ndarray
    cumulative_lengths: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.parameter_knots, dtype=float)
        s = np.asarray(self.cumulative_lengths, dtype=float)
        if k.shape != s.shape or s.size == 0 or s[0] != 0 or np.any(np.diff(s) < 0):
            raise ValueError("cumulative lengths must start at 0 and be nondecreasing")
        object.__setattr__(self, "parameter_knots", k)
        object.__setattr__(self, "cumulative_lengths", s)

    @property
    def total(self):
        return float(self.cumulative_lengths[-1])

    def __call__(self, t):
        return np.interp(t, self.parameter_knots, self.cumulative_lengths)


def length_function(c: Curve, mode="hyperbolic") -> LengthFunction:
    """Cumulative length at each vertex, parameterized by vertex index."""
    p, q = c.segments()
    s = np.concatenate([[0.0], np.cumsum(segment_lengths(p, q, mode))])
    return LengthFunction(np.arange(s.size, dtype=float), s)


def transfer_length_function(c: Curve, image: Curve, mode="hyperbolic") -> LengthFunction:
    """Samples of the map ``l_c(t) -> l_image(t)`` at the shared vertices."""
    if len(c) != len(image) or c.closed != image.closed:
        raise ValueError("curves must share their vertex parameterization")
    src = length_function(c, mode)
    dst = length_function(image, mode)
    return LengthFunction(src.cumulative_lengths, dst.cumulative_lengths)


def normal_representation(c: Curve, n: int, mode="hyperbolic") -> Curve:
    """Resample ``c`` at ``n`` points equally spaced in arc length."""
    if n < 2:
        raise ValueError("n must be at least 2")
    p, q = c.segments()
    lf = length_function(c, mode)
    s = lf.cumulative_lengths
    targets = lf.total * np.arange(n) / (n - 1)
    out = np.empty(n, dtype=complex)
    out[0], out[-1] = p[0], q[-1]
    for k in range(1, n - 1):
        j = min(int(np.searchsorted(s, targets[k], side="right")) - 1, p.size - 1)
        need = targets[k] - s[j]
        if need <= 0:
            out[k] = p[j]
            continue
        pj, dj = p[j], q[j] - p[j]

        def excess(u):
            return segment_lengths(pj, pj + u * dj, mode)[0] - need

        u = brentq(excess, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps) if excess(1.0) > 0 else 1.0
        out[k] = pj + u * dj
    return Curve(out)


def integration_matrix(curves, region, mode="hyperbolic", max_piece=None):
    """Sparse matrix ``A`` with ``(A @ rho.ravel())[k]`` the line integral over curve ``k``.

    Each segment is cut into pieces no longer than ``max_piece`` (default
    half a cell), each piece gets 4 Gauss-Legendre nodes, and the density is
    read by bilinear interpolation between cell centers.

    Raises
    ------
    OutOfRegionError
        If a quadrature node needs a cell outside the grid or a masked cell.
    """
    check_mode(mode)
    h = region.cell_size
    if region.nx < 2 or region.ny < 2:
        raise ValueError("grid must have at least 2 x 2 cells")
    max_piece = h / 2.0 if max_piece is None else max_piece
    ps, qs, owners = [], [], []
    for k, c in enumerate(curves):
        p, q = c.segments()
        ps.append(p)
        qs.append(q)
        owners.append(np.full(p.size, k))
    p, q, owner = np.concatenate(ps), np.concatenate(qs), np.concatenate(owners)
    nsub = np.maximum(1, np.ceil(np.abs(q - p) / max_piece).astype(int))
    seg = np.repeat(np.arange(p.size), nsub)
    first = np.repeat(np.cumsum(nsub) - nsub, nsub)
    frac0 = (np.arange(seg.size) - first) / nsub[seg]
    d = (q - p)[seg] / nsub[seg]
    a = p[seg] + frac0 * (q - p)[seg]
    x, w = _GL4
    nodes = (a[:, None] + d[:, None] * (1.0 + x[None, :]) / 2.0).ravel()
    weights = ((w[None, :] * np.abs(d)[:, None] / 2.0).ravel()
               * length_density(as_disk_points(nodes, "curve"), mode))
    rows = np.repeat(owner[seg], x.size)

    fx = (nodes.real - region.x0) / h - 0.5
    fy = (nodes.imag - region.y0) / h - 0.5
    i = np.clip(np.floor(fx).astype(int), 0, region.nx - 2)
    j = np.clip(np.floor(fy).astype(int), 0, region.ny - 2)
    tx, ty = fx - i, fy - j
    bad = (tx < -1e-9) | (tx > 1 + 1e-9) | (ty < -1e-9) | (ty > 1 + 1e-9)
    if np.any(bad):
        raise OutOfRegionError(f"curve {int(rows[np.argmax(bad)])} leaves the grid")
    tx, ty = np.clip(tx, 0, 1), np.clip(ty, 0, 1)
    cols, data, rr = [], [], []
    for di, dj, wt in ((0, 0, (1 - tx) * (1 - ty)), (1, 0, tx * (1 - ty)),
                       (0, 1, (1 - tx) * ty), (1, 1, tx * ty)):
        ii, jj = i + di, j + dj
        used = wt > 0
        if np.any(used & ~region.mask[jj, ii]):
            k = int(rows[np.argmax(used & ~region.mask[jj, ii])])
            raise OutOfRegionError(f"curve {k} touches a masked cell")
        cols.append((jj * region.nx + ii)[used])
        data.append((wt * weights)[used])
        rr.append(rows[used])
    n_curves = len(ps)
    return sp.csr_matrix((np.concatenate(data), (np.concatenate(rr), np.concatenate(cols))),
                         shape=(n_curves, region.nx * region.ny))


def line_integral(c: Curve, rho: DensityField, mode="hyperbolic") -> float:
    """Integral of ``rho`` along ``c`` against the mode's length element."""
    A = integration_matrix([c], rho.region, mode)
    return float((A @ rho.values.ravel())[0])


@dataclass(frozen=True)
class DerivativeReport:
    t: np.ndarray
    finite_difference: np.ndarray
    closed_form: np.ndarray
    max_abs_deviation: float


def derivative_check(alpha, a, b, dalpha=None, n_points=9, step=1e-4, substeps=32):
    """Compare the arc-length rate of ``alpha`` with ``2 |alpha'| / (1 - |alpha|^2)``.

    The rate is a central difference of the chord-sum length of ``alpha``
    over ``[t - step, t + step]``; ``dalpha`` defaults to a central
    difference of ``alpha`` itself.
    """
    t = np.linspace(a, b, n_points + 2)[1:-1]
    fd = np.empty(t.size)
    for k, tk in enumerate(t):
        z = np.asarray(alpha(np.linspace(tk - step, tk + step, substeps + 1)), dtype=complex)
        if np.any(np.diff(z) == 0):
            raise ValueError("curve is constant near t; derivative check undefined")
        fd[k] = np.sum(hyp_distance(z[:-1], z[1:])) / (2.0 * step)
    if dalpha is None:
        e = 1e-6
        deriv = (np.asarray(alpha(t + e)) - np.asarray(alpha(t - e))) / (2 * e)
    else:
        deriv = np.asarray(dalpha(t), dtype=complex)
    closed = 2.0 * np.abs(deriv) / (1.0 - np.abs(np.asarray(alpha(t))) ** 2)
    return DerivativeReport(t, fd, closed, float(np.max(np.abs(fd - closed))))
