"""Discrete modulus of sampled curve families.

For curves ``gamma_k`` and a grid density ``rho`` the engine solves::

    minimize    sum_cells rho^2 * dA
    subject to  (A rho)_k >= 1   for every curve,   rho >= 0

where ``A`` holds the quadrature weights of the line integrals. Writing
``rho = W^-1 A^T mu`` with curve multipliers ``mu >= 0`` turns this into the
complementarity problem ``mu >= 0, Q mu - 1 >= 0, mu . (Q mu - 1) = 0`` with
``Q = A W^-1 A^T``, which is small (one row per curve). It is solved either
by accelerated projected gradient (Uzawa) steps on the multipliers or by a
dual active-set method; both polish the final support exactly. The estimate
is the exact modulus of the sampled family on the grid; for a continuum
family it is a lower-bound type approximation.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .curves import Curve, integration_matrix
from .exceptions import InadmissibleDensityError
from .fields import DensityField
from .hyperbolic import GridRegion, check_mode

log = logging.getLogger(__name__)

ADMISSIBILITY_TOL = 1e-6


@dataclass(frozen=True)
class CurveFamily:
    curves: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))

    def __len__(self):
        return len(self.curves)

    def __add__(self, other):
        return CurveFamily(self.curves + other.curves, f"{self.label}+{other.label}")

    def map(self, f, label=None):
        return CurveFamily(tuple(c.map(f) for c in self.curves),
                           label if label is not None else f"f({self.label})")

    def vertices(self):
        return np.concatenate([c.vertices for c in self.curves])


@dataclass(frozen=True, eq=False)
class ModulusResult:
    value: float
    density: DensityField
    iterations: int
    kkt_residual: float
    converged: bool
    duals: np.ndarray = field(repr=False)
    integrals: np.ndarray = field(repr=False)

    def to_dict(self):
        return {"value": self.value, "iterations": self.iterations,
                "kkt_residual": self.kkt_residual, "converged": self.converged}


def _lipschitz(Q):
    if Q.shape[0] <= 4000:
        return float(np.linalg.eigvalsh(Q)[-1])
    v = np.ones(Q.shape[0])
    for _ in range(100):
        v = Q @ v
        v /= np.linalg.norm(v)
    return float(1.05 * v @ Q @ v)


def _kkt(mu, g):
    # natural residual of the complementarity problem; g = Q mu - 1
    return float(np.max(np.abs(np.minimum(mu, g)))) if mu.size else 0.0


def _polish(Q, mu, tol):
    """Solve the equality system on the current support; None if it does not help."""
    active = mu > 0
    if not np.any(active):
        return None
    for _ in range(20):
        sub = Q[np.ix_(active, active)]
        try:
            x = np.linalg.solve(sub, np.ones(int(active.sum())))
        except np.linalg.LinAlgError:
            x = np.linalg.lstsq(sub, np.ones(int(active.sum())), rcond=None)[0]
        cand = np.zeros_like(mu)
        cand[active] = x
        if np.any(x < 0):
            drop = np.zeros_like(active)
            drop[np.flatnonzero(active)[x < 0]] = True
            active = active & ~drop
            if not np.any(active):
                return None
            continue
        g = Q @ cand - 1.0
        viol = (~active) & (g < -tol)
        if not np.any(viol):
            return cand
        active = active | viol
    return None


class _Cholesky:
    """Lower Cholesky factor of ``Q[S, S]`` with row/column append and delete."""

    def __init__(self, m):
        self.L = np.zeros((m, m))
        self.q = 0

    def solve(self, b):
        L = self.L[:self.q, :self.q]
        y = solve_triangular(L, b, lower=True, check_finite=False)
        return solve_triangular(L.T, y, lower=False, check_finite=False)

    def forward(self, b):
        return solve_triangular(self.L[:self.q, :self.q], b, lower=True, check_finite=False)

    def append(self, col, diag):
        q = self.q
        self.L[q, :q] = col
        self.L[q, q] = diag
        self.q = q + 1

    def delete(self, k):
        q, L = self.q, self.L
        L[k:q - 1, :q] = L[k + 1:q, :q]
        L[q - 1, :] = 0.0
        self.q = n = q - 1
        # dropping a row leaves one superdiagonal entry per row; rotate it away
        for j in range(k, n):
            a, b = L[j, j], L[j, j + 1]
            rr = np.hypot(a, b)
            if rr == 0.0:
                continue
            c, s = a / rr, b / rr
            colj, coln = L[j:n, j].copy(), L[j:n, j + 1].copy()
            L[j:n, j] = c * colj + s * coln
            L[j:n, j + 1] = -s * colj + c * coln
        L[:, n] = 0.0


def _active_set(Q, tol, max_steps):
    """Dual active-set method of Goldfarb and Idnani in constraint space.

    Constraints enter one at a time (most violated first); an entering
    constraint that is linearly dependent on the active ones is absorbed by
    shifting multiplier weight until some active constraint can leave.
    """
    m = Q.shape[0]
    diag = np.diag(Q)
    u = np.zeros(m)
    s = -np.ones(m)
    active = []
    chol = _Cholesky(m)
    steps = 0
    while steps < max_steps:
        p = int(np.argmin(s))
        if s[p] >= -tol:
            break
        while steps < max_steps:
            steps += 1
            if active:
                qsp = Q[active, p]
                r = chol.solve(qsp)
                schur = diag[p] - qsp @ r
            else:
                r = np.zeros(0)
                schur = diag[p]
            t1 = -s[p] / schur if schur > 1e-13 * diag[p] else np.inf
            pos = np.flatnonzero(r > 1e-14)
            t2, k = np.inf, -1
            if pos.size:
                ratios = u[np.asarray(active)[pos]] / r[pos]
                j = int(np.argmin(ratios))
                t2, k = float(ratios[j]), int(pos[j])
            t = min(t1, t2)
            if not np.isfinite(t):
                raise RuntimeError("modulus problem is infeasible")
            if active:
                u[active] -= t * r
            u[p] += t
            if np.isfinite(t1):
                r_full = np.zeros(m)
                r_full[active] = r
                s += t * (Q[:, p] - Q @ r_full)
            if t == t1:
                s[p] = 0.0
                col = chol.forward(Q[active, p]) if active else np.zeros(0)
                chol.append(col, np.sqrt(max(schur, 0.0)))
                active.append(p)
                break
            u[active[k]] = 0.0
            chol.delete(k)
            del active[k]
    return np.maximum(u, 0.0), steps


def solve_dual(Q, tol=1e-7, max_iter=50_000, method="active-set", polish_every=200):
    """Solve ``mu >= 0, Q mu >= 1, mu (Q mu - 1) = 0`` for positive semidefinite ``Q``.

    ``method="projected-gradient"`` runs accelerated projected gradient
    (Uzawa) steps on the multipliers with periodic support polishing;
    ``method="active-set"`` first tries the all-active polish and then the
    dual active-set method, which copes with the nearly dependent
    constraints that appear when many curves share cells.

    Returns ``(mu, iterations, residual)``.
    """
    if method == "projected-gradient":
        return _projected_gradient(Q, tol, max_iter, polish_every)
    if method != "active-set":
        raise ValueError(f"unknown method {method!r}")
    cand = _polish(Q, np.ones(Q.shape[0]), tol)
    if cand is not None:
        res = _kkt(cand, Q @ cand - 1.0)
        if res < tol:
            return cand, 1, res
    mu, steps = _active_set(Q, tol / 10.0, max_iter)
    return mu, steps, _kkt(mu, Q @ mu - 1.0)


def _projected_gradient(Q, tol, max_iter, polish_every):
    m = Q.shape[0]
    L = _lipschitz(Q)
    step = 1.0 / L
    mu = np.full(m, 1.0 / max(np.trace(Q), 1e-300))
    y, t = mu.copy(), 1.0
    res = _kkt(mu, Q @ mu - 1.0)
    it = 0
    while it < max_iter and res >= tol:
        it += 1
        gy = Q @ y - 1.0
        new = np.maximum(0.0, y - step * gy)
        if np.dot(y - new, new - mu) < 0:
            # gradient restart: momentum points uphill, drop it
            mu, y, t = new, new.copy(), 1.0
        else:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = new + ((t - 1.0) / t_new) * (new - mu)
            mu, t = new, t_new
        if it % polish_every == 0 or it < 5:
            cand = _polish(Q, mu, tol)
            if cand is not None:
                r = _kkt(cand, Q @ cand - 1.0)
                if r < _kkt(mu, Q @ mu - 1.0):
                    mu = cand
                    y, t = mu.copy(), 1.0
        res = _kkt(mu, Q @ mu - 1.0)
    return mu, it, res


def modulus(family: CurveFamily, region: GridRegion, mode="hyperbolic", tol=1e-7,
            max_iter=50_000, max_piece=None, method="active-set") -> ModulusResult:
    """Modulus estimate of a sampled family on ``region``.

    Parameters
    ----------
    family : CurveFamily
        Non-empty family; every curve must stay inside the unmasked grid.
    region : GridRegion
        Carrier of the density.
    mode : {"hyperbolic", "euclidean"}
        Selects both the area element and the length element.
    tol : float
        Target KKT residual of the multiplier problem.

    Returns
    -------
    ModulusResult
        ``value`` is the energy of the returned density, which is scaled if
        necessary so that every curve integral is at least 1.
    """
    check_mode(mode)
    if len(family) == 0:
        raise ValueError("modulus of an empty family is undefined here")
    A = integration_matrix(family.curves, region, mode, max_piece=max_piece)
    w = region.area_elements(mode).ravel()
    used = np.unique(A.indices)
    B = A[:, used]
    winv = 1.0 / w[used]
    Q = np.asarray((B.multiply(winv[None, :]) @ B.T).todense())
    mu, iterations, res = solve_dual(Q, tol=tol, max_iter=max_iter, method=method)
    converged = res < tol
    if not converged:
        warnings.warn(f"modulus solver stopped at KKT residual {res:.3e}", RuntimeWarning)
    rho = np.zeros(w.size)
    rho[used] = winv * (B.T @ mu)
    integrals = A @ rho
    low = float(integrals.min())
    if low < 1.0:
        rho /= low
        integrals = integrals / low
    density = DensityField(region, rho.reshape(region.shape))
    value = float(np.sum(rho ** 2 * w))
    log.debug("modulus %s: value=%.8g iterations=%d residual=%.2e", family.label, value,
              iterations, res)
    return ModulusResult(value, density, iterations, res, converged, mu, integrals)


@dataclass(frozen=True, eq=False)
class AdmissibilityReport:
    integrals: np.ndarray
    failing: np.ndarray
    tol: float

    @property
    def admissible(self):
        return not np.any(self.failing)

    @property
    def min_integral(self):
        return float(self.integrals.min())


def admissibility_check(family: CurveFamily, rho: DensityField, mode="hyperbolic",
                        tol=ADMISSIBILITY_TOL) -> AdmissibilityReport:
    """Per-curve line integrals of ``rho`` and which of them fall below ``1 - tol``."""
    integrals = integration_matrix(family.curves, rho.region, mode) @ rho.values.ravel()
    return AdmissibilityReport(integrals, integrals < 1.0 - tol, tol)


def upper_bound_via_density(family: CurveFamily, rho: DensityField, mode="hyperbolic",
                            tol=ADMISSIBILITY_TOL) -> float:
    """Energy of an admissible density, an upper bound for the modulus."""
    report = admissibility_check(family, rho, mode, tol)
    if not report.admissible:
        raise InadmissibleDensityError(
            f"{int(report.failing.sum())} curves have integral below 1 (min {report.min_integral:.6g})")
    return rho.energy(mode)


# -- standard families -------------------------------------------------------

def annulus_radial_family(r, R, n_curves, n_vertices=2, center=0j, phase=0.0):
    """Radial segments joining the circles ``|z - center| = r`` and ``= R``."""
    angles = phase + 2.0 * np.pi * np.arange(n_curves) / n_curves
    radii = np.linspace(r, R, n_vertices)
    curves = tuple(Curve(complex(center) + radii * np.exp(1j * a)) for a in angles)
    return CurveFamily(curves, f"annulus({r},{R})x{n_curves}")


def annulus_region(R, n, pad_cells=2, center=0j):
    """``n x n`` grid on a square slightly larger than the disk of radius ``R``."""
    half = R * n / (n - 2.0 * pad_cells)
    return GridRegion.square(half, n, center)


def ring_modulus(r, R):
    """Modulus ``2 pi / log(R / r)`` of the family joining the boundary circles of a ring."""
    return 2.0 * np.pi / np.log(R / r)


def annulus_extremal_density(region, r, R, mode="euclidean", center=0j):
    """Grid samples of the extremal ring density ``1 / (|z - c| log(R / r))``.

    Cells whose center is within ``h / sqrt(2)`` of the closed ring keep the
    density, i.e. roughly the cells the ring passes through. In hyperbolic
    mode the values are multiplied by ``(1 - |z|^2) / 2``, which leaves both
    the curve integrals and the energy unchanged.
    """
    pad = region.cell_size / np.sqrt(2.0)
    z = region.centers
    dist = np.abs(z - center)
    band = (dist >= r - pad) & (dist <= R + pad)
    vals = np.where(band, 1.0 / (np.maximum(dist, 1e-300) * np.log(R / r)), 0.0)
    if check_mode(mode) == "hyperbolic":
        vals = vals * (1.0 - np.abs(z) ** 2) / 2.0
    return DensityField(region, vals)


def rectangle_family(x1, x2, y1, y2, n_curves, n_vertices=2):
    """Horizontal segments joining the vertical sides of a rectangle."""
    ys = y1 + (y2 - y1) * (np.arange(n_curves) + 0.5) / n_curves
    xs = np.linspace(x1, x2, n_vertices)
    return CurveFamily(tuple(Curve(xs + 1j * y) for y in ys), f"rect({x1},{x2},{y1},{y2})")
