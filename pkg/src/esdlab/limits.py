"""Limiting spectral laws.

Closed forms (Marchenko-Pastur family, shifted semicircle), the effective-medium
cubic, and two self-consistent equations driven by a ``WeightMeasure``:

    z f = -1 + a f sum_k w_k / (1 + a xi_k f)              (fixed point)
    z f = -1 - 2 f^2 sum_k xi_k w_k / (1 - xi_k^2 f^2)      (general adjacency)

Every Stieltjes value returned is certified: the defining equation is
re-evaluated at the returned point, and ``Im f > 0``, ``|f| <= 1/Im z`` are
checked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import legendre as _leg
from scipy.optimize import brentq

from .measure import WeightMeasure

POLY_TOL = 1e-12
FIXED_POINT_TOL = 1e-10
DEFAULT_ETAS = (1e-2, 1e-3, 1e-4)
CONTINUATION_START = 10.0
SINGULAR_DENOM = 1e-14


class SolverError(RuntimeError):
    """A Stieltjes solve failed certification; ``z`` and ``residual`` locate it."""

    def __init__(self, message, z=None, residual=None):
        super().__init__(message)
        self.z = z
        self.residual = residual


@dataclass
class SolveReport:
    """Result of one (scalar) or many (array) Stieltjes solves.

    For array solves ``f``, ``residual`` and ``iterations`` are arrays.
    ``continued`` records whether a continuation ladder in Im z was used.
    """

    f: complex | np.ndarray
    residual: float | np.ndarray
    iterations: int | np.ndarray
    branch_note: str
    continued: bool | np.ndarray = False
    conjectural: bool = False

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual))


@dataclass(frozen=True)
class Atom:
    """A point mass of a limit law (returned where a density does not exist)."""

    location: float
    weight: float = 1.0


# ---------------------------------------------------------------- helpers

def _as_z(z) -> tuple[np.ndarray, bool]:
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr.imag <= 0):
        raise ValueError("Stieltjes solvers need Im z > 0")
    return z_arr.reshape(-1), z_arr.ndim == 0


def _report(f, res, its, note, continued, scalar, conjectural=False) -> SolveReport:
    if scalar:
        return SolveReport(complex(f[0]), float(res[0]), int(its[0]), note,
                           bool(np.asarray(continued).reshape(-1)[0]), conjectural)
    return SolveReport(f, res, its, note, continued, conjectural)


def stieltjes_violations(f, z, xi=()) -> np.ndarray:
    """Boolean mask of points that break the Stieltjes constraints.

    Checks ``Im f > 0``, ``|f| <= 1/Im z`` and, for every atom location
    ``xi``, ``1/|1 + xi f| <= max(2, 4|xi|/Im z)``.
    """
    f = np.asarray(f, dtype=complex)
    z = np.asarray(z, dtype=complex)
    eta = z.imag
    bad = ~(f.imag > 0) | (np.abs(f) * eta > 1.0 + 1e-12)
    for x in xi:
        cap = np.maximum(2.0, 4.0 * abs(x) / eta)
        bad |= 1.0 / np.abs(1.0 + x * f) > cap * (1.0 + 1e-12)
    return bad


def _select_root(roots: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pick the unique root that is a Stieltjes value; ``ok`` is False where not unique."""
    eta = z.imag[:, None]
    good = (roots.imag > 0) & (np.abs(roots) * eta <= 1.0 + 1e-9)
    ok = good.sum(axis=1) == 1
    idx = np.argmax(good, axis=1)
    return roots[np.arange(len(z)), idx], ok


def _poly_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of many polynomials at once; ``coeffs`` is (N, deg+1), highest first."""
    deg = coeffs.shape[1] - 1
    comp = np.zeros((coeffs.shape[0], deg, deg), dtype=complex)
    comp[:, 0, :] = -coeffs[:, 1:] / coeffs[:, :1]
    comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
    return np.linalg.eigvals(comp)


def _polish_poly(coeffs: np.ndarray, f: np.ndarray, steps: int = 3) -> np.ndarray:
    for _ in range(steps):
        val = _polyval(coeffs, f)
        der = _polyval(_polyder(coeffs), f)
        step = np.where(der != 0, val / np.where(der != 0, der, 1.0), 0.0)
        trial = f - step
        better = np.abs(_polyval(coeffs, trial)) <= np.abs(val)
        f = np.where(better, trial, f)
    return f


def _polyval(coeffs: np.ndarray, f: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f)
    for j in range(coeffs.shape[1]):
        out = out * f + coeffs[:, j]
    return out


def _polyder(coeffs: np.ndarray) -> np.ndarray:
    deg = coeffs.shape[1] - 1
    return coeffs[:, :-1] * np.arange(deg, 0, -1)[None, :]


def _ladder(z: np.ndarray, ratio: float = 0.5) -> list[np.ndarray]:
    """Points ``Re z + i eta_k`` with eta descending geometrically from 10 to Im z."""
    eta = z.imag
    start = np.maximum(CONTINUATION_START, eta)
    steps = int(np.ceil(np.max(np.log(start / eta)) / -math.log(ratio))) if len(z) else 0
    if steps == 0:
        return [z]
    out = []
    for k in range(steps + 1):
        t = k / steps
        out.append(z.real + 1j * start ** (1 - t) * eta ** t)
    return out


def _track_polynomial(coeff_fn, z: np.ndarray) -> np.ndarray:
    """Follow the Stieltjes root from Re z + 10i down to z, nearest-root at each rung."""
    ladder = _ladder(z, ratio=0.8)
    f = -1.0 / ladder[0]
    for zk in ladder:
        coeffs = coeff_fn(zk)
        roots = _poly_roots(coeffs)
        pick = np.argmin(np.abs(roots - f[:, None]), axis=1)
        f = _polish_poly(coeffs, roots[np.arange(len(zk)), pick])
    return f


def _solve_polynomial(coeff_fn, z, note: str) -> SolveReport:
    z_arr, scalar = _as_z(z)
    coeffs = coeff_fn(z_arr)
    f, ok = _select_root(_poly_roots(coeffs), z_arr)
    f = _polish_poly(coeffs, f)
    continued = ~ok
    if np.any(continued):
        f[continued] = _track_polynomial(coeff_fn, z_arr[continued])
    # residual relative to the size of the terms, so large |f| near an atom is not penalised
    res = np.abs(_polyval(coeffs, f)) / np.maximum(1.0, _polyval(np.abs(coeffs), np.abs(f)).real)
    bad = stieltjes_violations(f, z_arr) | (res > POLY_TOL)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise SolverError(f"no certified Stieltjes root at z={z_arr[i]}", z_arr[i], res[i])
    its = np.where(continued, -1, 0)
    return _report(f, res, its, note, continued, scalar)


# ---------------------------------------------------------------- closed forms

def mp_coefficients(b: float, c1: float):
    return lambda z: np.column_stack([b * z, z + b - c1, np.ones_like(z)])


def mp_stieltjes(b: float, c1: float, z) -> SolveReport:
    """Root of ``b z f^2 + (z + b - c1) f + 1 = 0`` that is a Stieltjes value."""
    if b < 0 or c1 <= 0:
        raise ValueError("need b >= 0 and c1 > 0")
    if b == 0:
        z_arr, scalar = _as_z(z)
        f = 1.0 / (c1 - z_arr)
        res = np.abs((z_arr - c1) * f + 1.0)
        return _report(f, res, np.zeros(len(f), int), "point mass at c1", np.zeros(len(f), bool),
                       scalar)
    return _solve_polynomial(mp_coefficients(b, c1), z, "quadratic root, Im f > 0")


def _mp_edges(b: float, c1: float) -> tuple[float, float]:
    return (math.sqrt(b) - math.sqrt(c1)) ** 2, (math.sqrt(b) + math.sqrt(c1)) ** 2


def mp_density(b: float, c1: float, lam):
    """Density of the continuous part; an ``Atom`` at ``c1`` when ``b == 0``."""
    if b < 0 or c1 < 0:
        raise ValueError("need b >= 0 and c1 >= 0")
    if b == 0:
        return Atom(c1, 1.0)
    if c1 == 0:
        return Atom(0.0, 1.0)
    lo, hi = _mp_edges(b, c1)
    lam_arr = np.asarray(lam, dtype=float)
    inside = (lam_arr > 0) & (lam_arr > lo) & (lam_arr < hi)
    safe = np.where(inside, lam_arr, 1.0)
    out = np.where(inside, np.sqrt(np.clip((hi - safe) * (safe - lo), 0, None)) /
                   (2 * math.pi * b * safe), 0.0)
    return float(out) if out.ndim == 0 else out


def block_laplacian_density(c: float, lam):
    """Limit density of the block Laplacian: the b = 2 member of the MP family."""
    return mp_density(2.0, c, lam)


def shifted_semicircle_density(c1: float, c2: float, lam):
    if c2 <= 0:
        raise ValueError("need c2 > 0")
    lam_arr = np.asarray(lam, dtype=float)
    out = np.sqrt(np.clip(4 * c2 - (lam_arr - c1) ** 2, 0, None)) / (2 * math.pi * c2)
    return float(out) if out.ndim == 0 else out


def shifted_semicircle_stieltjes(c1: float, c2: float, z) -> SolveReport:
    """Root of ``c2 f^2 + (z - c1) f + 1 = 0`` that is a Stieltjes value."""
    return _solve_polynomial(
        lambda zz: np.column_stack([np.full_like(zz, c2), zz - c1, np.ones_like(zz)]),
        z, "quadratic root, Im f > 0")


def effective_medium_coefficients(c: float):
    return lambda z: np.column_stack([z, np.full_like(z, 1.0 - c), -z, -np.ones_like(z)])


def effective_medium_stieltjes(c: float, z) -> SolveReport:
    """Root of ``z f^3 + (1 - c) f^2 - z f - 1 = 0`` that is a Stieltjes value."""
    if c < 0:
        raise ValueError("need c >= 0")
    if c == 0:
        z_arr, scalar = _as_z(z)
        f = -1.0 / z_arr
        coeffs = effective_medium_coefficients(0.0)(z_arr)
        res = np.abs(_polyval(coeffs, f)) / np.maximum(1.0, _polyval(np.abs(coeffs), np.abs(f)).real)
        return _report(f, res, np.zeros(len(f), int), "factor (f^2 - 1)(z f + 1): point mass at 0",
                       np.zeros(len(f), bool), scalar)
    return _solve_polynomial(effective_medium_coefficients(c), z,
                             "cubic root, Im f > 0 and |f| <= 1/Im z")


def effective_medium_support(c: float) -> list[tuple[float, float]]:
    """Where the cubic has non-real roots for real z: ``4u^2 + (b^2 + 18b - 27)u + 4b^3 < 0``
    with ``u = lambda^2`` and ``b = 1 - c``."""
    beta = 1.0 - c
    qa, qb, qc = 4.0, beta ** 2 + 18 * beta - 27, 4 * beta ** 3
    disc = qb * qb - 4 * qa * qc
    if disc <= 0:
        return []
    sq = math.sqrt(disc)
    u_hi = (-qb + sq) / (2 * qa)
    u_lo = qc / (qa * u_hi) if u_hi != 0 else 0.0
    if u_hi <= 0:
        return []
    top = math.sqrt(u_hi)
    if u_lo <= 0:
        # split at 0, where the density may blow up (c = 1)
        return [(-top, 0.0), (0.0, top)]
    bot = math.sqrt(u_lo)
    return [(-top, -bot), (bot, top)]


def effective_medium_density(c: float, lam):
    """Density from the cubic's non-real root at real ``lam`` (conjugate pair, Im > 0 one)."""
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.zeros(lam_arr.shape)
    intervals = effective_medium_support(c)
    inside = np.zeros(lam_arr.shape, bool)
    for lo, hi in intervals:
        inside |= (lam_arr > lo) & (lam_arr < hi)
    inside &= lam_arr != 0
    if np.any(inside):
        x = lam_arr[inside].astype(complex)
        roots = _poly_roots(effective_medium_coefficients(c)(x))
        out[inside] = np.max(roots.imag, axis=1) / math.pi
    out = np.clip(out, 0, None)
    return float(out[0]) if np.ndim(lam) == 0 else out


# ---------------------------------------------------------------- fixed-point equations

class _Equation:
    """``F(f; z) = 0`` with derivative and a fixed-point map ``f = T(f; z)``."""

    def residual(self, f, z):
        raise NotImplementedError

    def derivative(self, f, z):
        raise NotImplementedError

    def fixed_map(self, f, z):
        raise NotImplementedError

    def min_denominator(self, f):
        raise NotImplementedError


class _MeasureEquation(_Equation):
    """``z f + 1 - a f sum w / (1 + a xi f)``."""

    def __init__(self, measure: WeightMeasure, a: float):
        xi, w = measure.arrays()
        self.ax = (a * xi)[:, None]
        self.w = w[:, None]
        self.a = a

    def _s(self, f):
        den = 1.0 + self.ax * f[None, :]
        return np.sum(self.w / den, axis=0), np.sum(-self.w * self.ax / den ** 2, axis=0)

    def residual(self, f, z):
        s, _ = self._s(f)
        return z * f + 1.0 - self.a * f * s

    def derivative(self, f, z):
        s, ds = self._s(f)
        return z - self.a * s - self.a * f * ds

    def fixed_map(self, f, z):
        s, _ = self._s(f)
        return (-1.0 + self.a * f * s) / z

    def min_denominator(self, f):
        if self.ax.size == 0:
            return np.full(f.shape, np.inf)
        return np.min(np.abs(1.0 + self.ax * f[None, :]), axis=0)


class _AdjacencyEquation(_Equation):
    """``z f + 1 + 2 f^2 sum xi w / (1 - xi^2 f^2)``."""

    def __init__(self, measure: WeightMeasure):
        xi, w = measure.arrays()
        self.xi = xi[:, None]
        self.xw = (xi * w)[:, None]

    def _p(self, f):
        den = 1.0 - self.xi ** 2 * f[None, :] ** 2
        p = np.sum(self.xw / den, axis=0)
        dp = np.sum(self.xw * 2 * self.xi ** 2 * f[None, :] / den ** 2, axis=0)
        return p, dp

    def residual(self, f, z):
        p, _ = self._p(f)
        return z * f + 1.0 + 2.0 * f ** 2 * p

    def derivative(self, f, z):
        p, dp = self._p(f)
        return z + 4.0 * f * p + 2.0 * f ** 2 * dp

    def fixed_map(self, f, z):
        p, _ = self._p(f)
        return (-1.0 - 2.0 * f ** 2 * p) / z

    def min_denominator(self, f):
        if self.xi.size == 0:
            return np.full(f.shape, np.inf)
        return np.min(np.abs(1.0 - self.xi ** 2 * f[None, :] ** 2), axis=0)


def _solve_rung(eq: _Equation, f, z, tol, theta0, damped_iters, newton_iters):
    """Damped fixed-point sweeps, halving the damping on residual increase, then Newton."""
    its = np.zeros(len(z), int)
    res = np.abs(eq.residual(f, z))
    theta = np.full(len(z), theta0)
    for _ in range(damped_iters):
        active = res > tol
        if not active.any():
            break
        g = (1 - theta) * f + theta * eq.fixed_map(f, z)
        new = np.abs(eq.residual(g, z))
        accept = active & (new <= res) & (g.imag > 0)
        f = np.where(accept, g, f)
        res = np.where(accept, new, res)
        theta = np.where(active & ~accept, theta / 2, theta)
        its += active
    for _ in range(newton_iters):
        active = res > tol
        if not active.any():
            break
        step = eq.residual(f, z) / eq.derivative(f, z)
        lam = np.ones(len(z))
        done = ~active
        for _ in range(30):
            g = f - lam * step
            new = np.abs(eq.residual(g, z))
            ok = ~done & (new < res) & (g.imag > 0) & np.isfinite(new)
            f = np.where(ok, g, f)
            res = np.where(ok, new, res)
            done |= ok
            if done.all():
                break
            lam = np.where(done, lam, lam / 2)
        its += active
    return f, res, its


def _solve_measure_equation(eq: _Equation, z, tol, theta, max_iter, note, xi_atoms,
                            conjectural=False) -> SolveReport:
    z_arr, scalar = _as_z(z)
    if tol <= 0:
        raise ValueError("tol must be positive")
    ladder = _ladder(z_arr)
    continued = np.full(len(z_arr), len(ladder) > 1) & (z_arr.imag < CONTINUATION_START)
    f = -1.0 / ladder[0]
    its = np.zeros(len(z_arr), int)
    for k, zk in enumerate(ladder):
        last = k == len(ladder) - 1
        # the last rung is polished well past tol so f itself is accurate
        rung_tol = max(tol * 1e-3, 1e-15) if last else max(tol, 1e-8)
        f, res, n = _solve_rung(eq, f, zk, rung_tol, theta, max_iter if last else 5, 60)
        its += n
        if np.any(eq.min_denominator(f) < SINGULAR_DENOM):
            i = int(np.argmin(eq.min_denominator(f)))
            raise SolverError(f"denominator vanished near z={zk[i]}", zk[i], float(res[i]))
    res = np.abs(eq.residual(f, z_arr))
    bad = (res > tol) | stieltjes_violations(f, z_arr, xi_atoms)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise SolverError(f"fixed-point solve failed at z={z_arr[i]} (residual {res[i]:.3e})",
                          z_arr[i], float(res[i]))
    return _report(f, res, its, note, continued, scalar, conjectural)


def fixed_point_stieltjes(measure: WeightMeasure, a: float, z, tol: float = FIXED_POINT_TOL,
                          theta: float = 0.5, max_iter: int = 50) -> SolveReport:
    """Solve ``z f = -1 + a f sum_k w_k / (1 + a xi_k f)`` for the Stieltjes branch.

    Starts from ``f = -1/z`` high in the upper half-plane and walks Im z down
    geometrically, warm-starting each step.
    """
    if a <= 0:
        raise ValueError("scale a must be positive")
    eq = _MeasureEquation(measure, a)
    return _solve_measure_equation(eq, z, tol, theta, max_iter, "damped fixed point",
                                   [a * x for x in measure.xi])


def adjacency_general_stieltjes(measure: WeightMeasure, z, tol: float = FIXED_POINT_TOL,
                                theta: float = 0.5, max_iter: int = 50) -> SolveReport:
    """Solve ``z f = -1 - 2 f^2 sum_k xi_k w_k / (1 - xi_k^2 f^2)``.

    This equation is conjectured (unproved) for general weights; every report is
    flagged ``conjectural``.
    """
    eq = _AdjacencyEquation(measure)
    return _solve_measure_equation(eq, z, tol, theta, max_iter,
                                   "damped fixed point (conjectural equation)",
                                   list(measure.xi), conjectural=True)


# ---------------------------------------------------------------- inversion

def _extrapolate_to_zero(etas: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Neville extrapolation of ``values[k]`` (taken at ``etas[k]``) to eta = 0."""
    p = [v.copy() for v in values]
    k = len(etas)
    for level in range(1, k):
        for i in range(k - level):
            x0, x1 = etas[i], etas[i + level]
            p[i] = (x1 * p[i] - x0 * p[i + 1]) / (x1 - x0)
    return p[0]


def density_from_stieltjes(law: "LimitLaw", lam, eta_schedule=DEFAULT_ETAS):
    """``(1/pi) Im f(lam + i eta)`` extrapolated to eta -> 0 over the schedule."""
    etas = np.asarray(eta_schedule, dtype=float)
    if len(etas) < 2 or np.any(etas <= 0) or np.any(np.diff(etas) >= 0):
        raise ValueError("eta schedule must hold >= 2 decreasing positive values")
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    vals = np.array([law.stieltjes(lam_arr + 1j * e).f.imag / math.pi for e in etas])
    out = np.clip(_extrapolate_to_zero(etas, vals), 0, None)
    return float(out[0]) if np.ndim(lam) == 0 else out


# ---------------------------------------------------------------- quadrature tables

_GL_ORDER = 12
_GL_X, _GL_W = _leg.leggauss(_GL_ORDER)


def _theta_breaks(uniform: int = 64, levels: int = 30) -> np.ndarray:
    """Panel ends on [0, pi], uniform with geometric grading into both endpoints."""
    h = math.pi / uniform
    inner = np.linspace(h, math.pi - h, uniform - 1)
    grade = h * 2.0 ** -np.arange(levels, 0, -1)
    return np.concatenate([[0.0], grade, inner, math.pi - grade[::-1], [math.pi]])


class _IntervalTable:
    """Integral of a density over ``[lo, hi]`` in the variable ``lambda = lo + (hi-lo)(1-cos t)/2``.

    The substitution absorbs square-root and inverse-square-root edge behaviour.
    Each panel keeps a Legendre antiderivative so partial integrals are exact to
    quadrature order.
    """

    def __init__(self, density, lo: float, hi: float):
        self.lo, self.hi = lo, hi
        self.breaks = _theta_breaks()
        t0, t1 = self.breaks[:-1], self.breaks[1:]
        half = (t1 - t0) / 2
        theta = (t0 + t1)[:, None] / 2 + half[:, None] * _GL_X[None, :]
        lam = self._lam(theta)
        g = np.asarray(density(lam.ravel()), dtype=float).reshape(theta.shape)
        g = g * (hi - lo) / 2 * np.sin(theta) * half[:, None]
        self.nodes_lam = lam
        self.nodes_weight = g * _GL_W[None, :]
        # Legendre interpolant per panel, antiderivative from the panel start
        vand_inv = np.linalg.inv(_leg.legvander(_GL_X, _GL_ORDER - 1))
        coef = g @ vand_inv.T
        anti = np.array([_leg.legint(c, lbnd=-1) for c in coef])
        self.anti = anti
        self.panel_mass = self.nodes_weight.sum(axis=1)
        self.cum = np.concatenate([[0.0], np.cumsum(self.panel_mass)])

    def _lam(self, theta):
        return self.lo + (self.hi - self.lo) * (1 - np.cos(theta)) / 2

    @property
    def mass(self) -> float:
        return float(self.cum[-1])

    def partial(self, t: np.ndarray) -> np.ndarray:
        """Mass on ``[lo, t]``."""
        t = np.asarray(t, dtype=float)
        out = np.where(t >= self.hi, self.mass, 0.0)
        inside = (t > self.lo) & (t < self.hi)
        if np.any(inside):
            arg = np.clip(1 - 2 * (t[inside] - self.lo) / (self.hi - self.lo), -1, 1)
            theta = np.arccos(arg)
            p = np.clip(np.searchsorted(self.breaks, theta, side="right") - 1, 0,
                        len(self.breaks) - 2)
            t0, t1 = self.breaks[p], self.breaks[p + 1]
            x = (2 * theta - t0 - t1) / (t1 - t0)
            basis = _leg.legvander(x, _GL_ORDER)
            out[inside] = self.cum[p] + np.sum(basis * self.anti[p], axis=1)
        return out

    def moment(self, j: int) -> float:
        return float(np.sum(self.nodes_lam ** j * self.nodes_weight))


# ---------------------------------------------------------------- laws

class LimitLaw:
    """A limiting spectral distribution: continuous part on ``intervals()`` plus ``atoms()``."""

    name = "law"
    conjectural = False
    closed_form = True

    def stieltjes(self, z) -> SolveReport:
        raise NotImplementedError

    def density(self, lam):
        raise NotImplementedError

    def atoms(self) -> list[Atom]:
        return []

    def intervals(self) -> list[tuple[float, float]]:
        raise NotImplementedError

    def atom_locations(self) -> list[float]:
        return []

    def __str__(self) -> str:
        return self.name

    @cached_property
    def _tables(self) -> list[_IntervalTable]:
        return [_IntervalTable(self.density, lo, hi) for lo, hi in self.intervals()]

    def support_bounds(self) -> tuple[float, float]:
        pts = [p for iv in self.intervals() for p in iv] + [a.location for a in self.atoms()]
        return min(pts), max(pts)

    def mass(self) -> float:
        return sum(t.mass for t in self._tables) + sum(a.weight for a in self.atoms())

    def cdf(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t_arr.shape)
        for table in self._tables:
            out += table.partial(t_arr)
        for atom in self.atoms():
            out += np.where(t_arr >= atom.location, atom.weight, 0.0)
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if np.ndim(t) == 0 else out

    def cdf_left(self, t):
        """Left limit ``F(t-)``: the CDF minus any atom sitting exactly at ``t``."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.atleast_1d(self.cdf(t_arr)).copy()
        for atom in self.atoms():
            out -= np.where(t_arr == atom.location, atom.weight, 0.0)
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if np.ndim(t) == 0 else out

    def quantile(self, q: float) -> float:
        """Generalised inverse ``inf{t : F(t) >= q}``."""
        lo, hi = self.support_bounds()
        for atom in self.atoms():
            if self.cdf_left(atom.location) < q <= self.cdf(atom.location):
                return atom.location
        if q <= self.cdf(lo):
            return lo
        if q >= 1.0:
            return hi
        return brentq(lambda t: self.cdf(t) - q, lo, hi, xtol=1e-13, rtol=1e-14)

    def moments(self, j_max: int) -> list[float]:
        """``int lambda^j dN`` for ``j = 1..j_max`` (density part plus atoms)."""
        if j_max < 1:
            raise ValueError("j_max must be >= 1")
        return [sum(t.moment(j) for t in self._tables)
                + sum(a.weight * a.location ** j for a in self.atoms())
                for j in range(1, j_max + 1)]


def _fmt(x: float) -> str:
    return f"{x:g}"


class MarchenkoPastur(LimitLaw):
    """``b z f^2 + (z + b - c1) f + 1 = 0``; a point mass at ``c1`` when ``b = 0``
    and an extra atom ``1 - c1/b`` at 0 when ``c1 < b``."""

    def __init__(self, b: float, c1: float):
        if b < 0 or c1 < 0 or (b == 0 and c1 == 0):
            raise ValueError("need b >= 0, c1 >= 0, not both zero")
        self.b, self.c1 = float(b), float(c1)
        self.name = f"MP(b={_fmt(b)}, c1={_fmt(c1)})"

    def stieltjes(self, z):
        if self.c1 == 0:
            return effective_medium_stieltjes(0.0, z)
        return mp_stieltjes(self.b, self.c1, z)

    def density(self, lam):
        if self.b == 0 or self.c1 == 0:
            return np.zeros(np.shape(lam)) if np.ndim(lam) else 0.0
        return mp_density(self.b, self.c1, lam)

    def atoms(self):
        if self.b == 0:
            return [Atom(self.c1, 1.0)]
        if self.c1 < self.b:
            return [Atom(0.0, 1.0 - self.c1 / self.b)]
        return []

    def intervals(self):
        if self.b == 0 or self.c1 == 0:
            return []
        return [_mp_edges(self.b, self.c1)]


class BlockLaplacian(MarchenkoPastur):
    """Limit of the block Laplacian: MP with ``b = 2``, ``c1 = c``."""

    def __init__(self, c: float):
        super().__init__(2.0, c)
        self.c = float(c)
        self.name = f"BlockLaplacian(c={_fmt(c)})"


class ShiftedSemicircle(LimitLaw):
    def __init__(self, c1: float = 0.0, c2: float = 1.0):
        if c2 <= 0:
            raise ValueError("need c2 > 0")
        self.c1, self.c2 = float(c1), float(c2)
        self.name = f"ShiftedSemicircle(c1={_fmt(c1)}, c2={_fmt(c2)})"

    def stieltjes(self, z):
        return shifted_semicircle_stieltjes(self.c1, self.c2, z)

    def density(self, lam):
        return shifted_semicircle_density(self.c1, self.c2, lam)

    def intervals(self):
        r = 2 * math.sqrt(self.c2)
        return [(self.c1 - r, self.c1 + r)]


class EffectiveMedium(LimitLaw):
    """``z f^3 + (1 - c) f^2 - z f - 1 = 0``; atom ``1 - c`` at 0 when ``c < 1``."""

    def __init__(self, c: float):
        if c < 0:
            raise ValueError("need c >= 0")
        self.c = float(c)
        self.name = f"EffectiveMedium(c={_fmt(c)})"

    def stieltjes(self, z):
        return effective_medium_stieltjes(self.c, z)

    def density(self, lam):
        return effective_medium_density(self.c, lam)

    def atoms(self):
        return [Atom(0.0, 1.0 - self.c)] if self.c < 1 else []

    def intervals(self):
        return effective_medium_support(self.c)


class _SolverLaw(LimitLaw):
    """Law known only through a solver; support is located by scanning the density.

    The density is ``Im f / pi`` just above the real axis (``BOUNDARY_ETA``)
    unless an explicit ``eta_schedule`` asks for extrapolated inversion.
    """

    # two points this close to the axis cancel the O(eta) tails of atoms and edges
    BOUNDARY_ETAS = (1e-9, 1e-10)
    scan_points = 4001
    eta_schedule = None
    closed_form = False

    def density(self, lam):
        return density_from_stieltjes(self, lam, self.eta_schedule or self.BOUNDARY_ETAS)

    def _scan_radius(self) -> float:
        raise NotImplementedError

    def _centre(self) -> float:
        return 0.0

    def _check_signs(self, measure: WeightMeasure):
        if any(x * w < 0 for x, w in measure.atoms):
            raise ValueError("each weight must carry the sign of its atom (w = (m/n) xi p)")

    @cached_property
    def _intervals(self) -> list[tuple[float, float]]:
        radius = self._scan_radius()
        centre = self._centre()
        grid = np.linspace(centre - radius, centre + radius, self.scan_points)
        keep = np.ones(len(grid), bool)
        for atom in self.atoms():
            keep &= np.abs(grid - atom.location) > 2e-3 * radius
        rho = np.zeros(len(grid))
        rho[keep] = self.density(grid[keep])
        pos = rho > 1e-8
        if pos[0] or pos[-1]:
            raise SolverError(f"{self.name}: density does not vanish at the scan boundary")
        flips = np.flatnonzero(np.diff(pos.astype(int)))
        if len(flips) == 0:
            return []
        lo, hi = grid[flips], grid[flips + 1]
        rising = pos[flips + 1]
        # vectorised bisection on every edge at once
        for _ in range(36):
            mid = 0.5 * (lo + hi)
            inside = self.density(mid) > 1e-8
            move_hi = inside == rising
            hi = np.where(move_hi, mid, hi)
            lo = np.where(move_hi, lo, mid)
        edges = 0.5 * (lo + hi)
        out = []
        # split at the centre, where the density can have an integrable singularity
        for a, b in zip(edges[::2], edges[1::2]):
            if a < centre < b:
                out += [(float(a), centre), (centre, float(b))]
            else:
                out.append((float(a), float(b)))
        return out

    def intervals(self):
        return self._intervals


class FixedPointLaw(_SolverLaw):
    """Law whose Stieltjes transform solves ``z f = -1 + a f sum w/(1 + a xi f)``."""

    def __init__(self, measure: WeightMeasure, a: float = 1.0, tol: float = FIXED_POINT_TOL):
        if a <= 0:
            raise ValueError("need a > 0")
        self._check_signs(measure)
        self.measure, self.a, self.tol = measure, float(a), tol
        self.name = f"FixedPoint(measure={measure}, a={_fmt(a)})"

    def stieltjes(self, z):
        return fixed_point_stieltjes(self.measure, self.a, z, self.tol)

    def atoms(self):
        # as f -> infinity each nonzero atom contributes w/xi; xi = 0 atoms shift the law
        shift = self.a * sum(w for x, w in self.measure.atoms if x == 0)
        weight = 1.0 - sum(w / x for x, w in self.measure.atoms if x != 0)
        return [Atom(shift, weight)] if weight > 1e-12 else []

    def _centre(self):
        return self.a * sum(w for x, w in self.measure.atoms if x == 0)

    def _scan_radius(self):
        xi, w = self.measure.arrays()
        big = self.a * (np.max(np.abs(xi), initial=0.0) + np.sum(np.abs(w)))
        return 2.0 * (big + 2 * self.a * math.sqrt(np.sum(np.abs(w * xi)))) + 1.0


class AdjacencyGeneralLaw(_SolverLaw):
    """Law of the (conjectured) general-weight adjacency equation."""

    conjectural = True

    def __init__(self, measure: WeightMeasure, tol: float = FIXED_POINT_TOL):
        self._check_signs(measure)
        self.measure, self.tol = measure, tol
        self.name = f"AdjacencyGeneral(measure={measure})"

    def stieltjes(self, z):
        return adjacency_general_stieltjes(self.measure, z, self.tol)

    def atoms(self):
        weight = 1.0 - 2.0 * sum(w / x for x, w in self.measure.atoms if x != 0)
        return [Atom(0.0, weight)] if weight > 1e-12 else []

    def _scan_radius(self):
        xi, w = self.measure.arrays()
        big = np.max(np.abs(xi), initial=0.0) + 2 * np.sum(np.abs(w))
        return 2.0 * (big + 2 * math.sqrt(2 * np.sum(np.abs(w * xi)))) + 2.0


def cdf_from_density(law: LimitLaw, t):
    """CDF of ``law`` at ``t``: quadrature of the density plus atom jumps."""
    return law.cdf(t)


def parse_law(text: str, measure: WeightMeasure | None = None) -> LimitLaw:
    """Build a law from ``name[:k=v,...]``.

    Names: ``mp``, ``block-laplacian``, ``effective-medium``, ``shifted-semicircle``,
    ``semicircle``, ``fixed-point`` and ``adjacency-general`` (the last two need
    ``measure``).
    """
    name, _, rest = text.strip().lower().partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"law parameter {item!r} is not key=value")
        params[key.strip()] = float(val)
    try:
        if name == "mp":
            return MarchenkoPastur(params["b"], params["c1"])
        if name == "block-laplacian":
            return BlockLaplacian(params["c"])
        if name == "effective-medium":
            return EffectiveMedium(params["c"])
        if name == "shifted-semicircle":
            return ShiftedSemicircle(params.get("c1", 0.0), params.get("c2", 1.0))
        if name == "semicircle":
            return ShiftedSemicircle(0.0, 1.0)
    except KeyError as exc:
        raise ValueError(f"law {name!r} needs parameter {exc.args[0]!r}") from None
    if name in ("fixed-point", "adjacency-general"):
        if measure is None:
            raise ValueError(f"law {name!r} needs a weight measure (give --xi, --n, --m)")
        if name == "fixed-point":
            return FixedPointLaw(measure, params.get("a", 1.0))
        return AdjacencyGeneralLaw(measure)
    raise ValueError(f"unknown law {name!r}")
