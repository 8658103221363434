"""Deterministic numerics: resolvent, potential operator and Laplace functionals.

Discretization
--------------
Displacements are rounded to the nearest multiple of ``dt``. The lattice law

    q_0 = 1 - Phi(dt/2),    q_k = Phi((k - 1/2) dt) - Phi((k + 1/2) dt)

is built from tail differences, so it carries exactly the mass of ``phi``
(including the integrable singularity of the Mittag-Leffler density at 0) and
``sum_k q_k + Phi((n - 1/2) dt) = 1``.

* The resolvent masses solve ``r = q + q * r`` on nodes ``k dt``.
* Test functions enter as averages over cells ``[j dt, (j+1) dt)``; ``g`` and
  ``h`` live at cell midpoints and are marched backwards in time, using that
  clusters only move to the right. The same lattice operator is used for
  ``g`` and ``h`` so that ``w = h - g`` is a difference of consistent
  approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import beta as beta_fn

from .kernels import lattice_masses
from .stable import c_alpha as c_alpha_closed

MAX_CELL_ITER = 200
CELL_RTOL = 1e-15


@dataclass(frozen=True)
class Grid:
    dt: float
    n: int

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive")
        if self.n < 1:
            raise ValueError("grid needs at least one cell")

    @property
    def horizon(self) -> float:
        return self.dt * self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.dt

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.dt

    @classmethod
    def covering(cls, horizon: float, n: int) -> "Grid":
        return cls(horizon / n, n)


# --------------------------------------------------------------------------
# resolvent


@dataclass(frozen=True)
class ResolventTable:
    """Lattice kernel law, resolvent masses and ``I_R`` on nodes ``k dt``."""

    grid: Grid
    masses: np.ndarray
    resolvent_masses: np.ndarray
    I_R: np.ndarray
    alpha: float
    c_phi: float
    far_tail: float

    @property
    def dt(self) -> float:
        return self.grid.dt

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def criticality_defect(self) -> float:
        """``|sum q_k + Phi(far) - 1|``."""
        return abs(math.fsum(self.masses) + self.far_tail - 1.0)

    def renewal_residual(self) -> float:
        """``max_k |r_k - q_k - (q * r)_k|`` over the table."""
        q, r = self.masses, self.resolvent_masses
        conv = np.convolve(q, r)[: len(r)]
        return float(np.max(np.abs(r - q - conv)))

    def density(self) -> np.ndarray:
        """Resolvent density estimate ``r_k / dt`` at nodes ``k dt``, ``k >= 1``."""
        return self.resolvent_masses[1:] / self.dt

    def I_R_at(self, t):
        """``I_R(t)`` by linear interpolation between nodes."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.grid.horizon * (1 + 1e-12)):
            raise ValueError("t outside the resolvent table horizon")
        out = np.interp(t, self.t, self.I_R)
        return float(out) if out.ndim == 0 else out

    @property
    def c_alpha(self) -> float:
        return c_alpha_closed(self.alpha, self.c_phi)

    @property
    def c_alpha_estimate(self) -> float:
        """``I_R(T) / T**alpha`` at the table horizon."""
        T = self.grid.horizon
        return float(self.I_R[-1] / T**self.alpha)

    def resolvent_slope(self, decades: float = 1.0) -> float:
        """Least-squares log-log slope of ``r_k / dt`` over the last ``decades``."""
        k = np.arange(1, len(self.resolvent_masses))
        t = k * self.dt
        sel = t >= self.grid.horizon * 10.0 ** (-decades)
        dens = self.resolvent_masses[k[sel]] / self.dt
        return float(np.polyfit(np.log(t[sel]), np.log(dens), 1)[0])

    def integral_I_R(self, u: float) -> float:
        """``int_0^u I_R(t) dt`` (trapezoid on nodes, exact on the last partial cell)."""
        if u < 0 or u > self.grid.horizon * (1 + 1e-12):
            raise ValueError("u outside the resolvent table horizon")
        dt = self.dt
        k = min(int(u // dt), self.grid.n)
        cum = 0.5 * dt * (self.I_R[:k].sum() + self.I_R[1 : k + 1].sum()) if k else 0.0
        rem = u - k * dt
        if rem > 0 and k < self.grid.n:
            end = self.I_R[k] + (self.I_R[k + 1] - self.I_R[k]) * rem / dt
            cum += 0.5 * rem * (self.I_R[k] + end)
        return float(cum)

    def to_csv_rows(self):
        """Rows ``(k, t, m, r, I_R)``."""
        for k in range(self.grid.n + 1):
            m = self.masses[k] if k < len(self.masses) else float("nan")
            r = self.resolvent_masses[k] if k < len(self.resolvent_masses) else float("nan")
            yield k, k * self.dt, m, r, self.I_R[k]


def renewal_recursion(q: np.ndarray) -> np.ndarray:
    """Solve ``r = q + q * r`` forwards: ``r_k (1 - q_0) = q_k + sum_{j=1}^k q_j r_{k-j}``."""
    q = np.asarray(q, dtype=float)
    q0 = q[0]
    if not q0 < 1.0:
        raise ValueError("grid too coarse: the first lattice mass is not below one")
    n = len(q)
    r = np.zeros(n)
    qrev = q[::-1].copy()  # qrev[n-1-j] = q_j
    denom = 1.0 - q0
    for k in range(n):
        # sum_{j=1}^k q_j r_{k-j} = q[1:k+1] . r[k-1::-1]
        acc = qrev[n - 1 - k : n - 1] @ r[:k] if k else 0.0
        r[k] = (q[k] + acc) / denom
    return r


def build_resolvent(kernel, grid: Grid) -> ResolventTable:
    """Resolvent table of ``kernel`` on ``grid`` (nodes ``0, dt, ..., n dt``)."""
    q = lattice_masses(kernel, grid.dt, grid.n + 1)
    r = renewal_recursion(q)
    I_R = np.empty(grid.n + 1)
    I_R[0] = 0.0
    cums = np.cumsum(r)
    # I_R(k dt) = sum_{i<k} r_i + r_k / 2: node k stands for [(k-1/2)dt, (k+1/2)dt)
    I_R[1:] = cums[:-1] + 0.5 * r[1:]
    far = float(kernel.tail((grid.n + 0.5) * grid.dt))
    return ResolventTable(grid, q, r, I_R, kernel.alpha, kernel.c_phi, far)


def exact_mean_N(table: ResolventTable, mu: float, u: float) -> float:
    """``E N([0,u]) = mu (u + int_0^u I_R(t) dt)``."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    return mu * (u + table.integral_I_R(u))


@dataclass
class TightnessReport:
    T: float
    M: float
    eps: float
    sup_ratio: float
    argmax: tuple
    n_pairs: int


def check_tightness(table: ResolventTable, T: float, M: float, eps: float, n_points: int = 400) -> TightnessReport:
    """``sup_{0<=s<t<=M} (I_R(Tt) - I_R(Ts)) / (T**alpha (t-s)**eps)`` on a grid.

    The scaled grid has ``n_points + 1`` equally spaced points in ``[0, M]``.
    Pairs closer than one table cell in real time are skipped.
    """
    if not (0 < eps <= table.alpha):
        raise ValueError("eps must lie in (0, alpha]")
    if T * M > table.grid.horizon * (1 + 1e-12):
        raise ValueError("T * M exceeds the resolvent table horizon")
    s = np.linspace(0.0, M, n_points + 1)
    I = table.I_R_at(T * s)
    diff_I = I[None, :] - I[:, None]
    gap = s[None, :] - s[:, None]
    ok = gap * T >= table.dt
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(ok, diff_I / (T**table.alpha * np.where(ok, gap, 1.0) ** eps), -np.inf)
    idx = np.unravel_index(np.argmax(ratio), ratio.shape)
    return TightnessReport(T, M, eps, float(ratio[idx]), (float(s[idx[0]]), float(s[idx[1]])), int(ok.sum()))


# --------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function ``f = values[i]`` on ``[breaks[i], breaks[i+1])``.

    ``breaks[0] = 0``; ``f = 0`` beyond ``breaks[-1]``. Compactly supported, so
    it lies in every decay class.
    """

    breaks: np.ndarray
    values: np.ndarray
    gamma: float = math.inf

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or len(b) != len(v) + 1:
            raise ValueError("need one more break than values")
        if b[0] != 0 or np.any(np.diff(b) <= 0):
            raise ValueError("breaks must start at 0 and increase")
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_indicators(cls, coefs, ends) -> "StepFunction":
        """``sum_k a_k 1_[0, t_k]``."""
        coefs = np.asarray(coefs, dtype=float)
        ends = np.asarray(ends, dtype=float)
        if np.any(ends <= 0):
            raise ValueError("indicator ends must be positive")
        order = np.argsort(ends)
        ends, coefs = ends[order], coefs[order]
        b = np.concatenate([[0.0], np.unique(ends)])
        vals = np.array([coefs[ends >= hi].sum() for hi in b[1:]])
        return cls(b, vals)

    @classmethod
    def indicator(cls, u: float, c: float = 1.0) -> "StepFunction":
        return cls(np.array([0.0, u]), np.array([c]))

    @classmethod
    def zero(cls, u: float = 1.0) -> "StepFunction":
        return cls.indicator(u, 0.0)

    @property
    def support(self) -> float:
        nz = np.flatnonzero(self.values != 0)
        return float(self.breaks[nz[-1] + 1]) if nz.size else 0.0

    @property
    def nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def as_indicators(self):
        """Coefficients ``a_k`` and ends ``t_k`` with ``f = sum a_k 1_[0,t_k]``."""
        nxt = np.append(self.values[1:], 0.0)
        return self.values - nxt, self.breaks[1:]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.values))
        out = np.where(inside, self.values[np.clip(idx, 0, len(self.values) - 1)], 0.0)
        return float(out) if out.ndim == 0 else out

    def scaled(self, T: float, F_T: float = 1.0) -> "StepFunction":
        """``f_T(t) = f(t / T) / F_T``."""
        return StepFunction(self.breaks * T, self.values / F_T, self.gamma)

    def cell_averages(self, grid: Grid) -> np.ndarray:
        """Averages over cells ``[j dt, (j+1) dt)``, ``j < grid.n``."""
        edges = grid.nodes
        # primitive of f evaluated at cell edges
        prim_b = np.concatenate([[0.0], np.cumsum(self.values * np.diff(self.breaks))])
        idx = np.clip(np.searchsorted(self.breaks, edges, side="right") - 1, 0, len(self.values) - 1)
        within = np.clip(edges - self.breaks[idx], 0.0, None)
        prim = np.where(
            edges >= self.breaks[-1], prim_b[-1], prim_b[idx] + self.values[idx] * np.minimum(within, np.diff(self.breaks)[idx])
        )
        return np.diff(prim) / grid.dt


def g_alpha(f, t, alpha: float, gamma: float | None = None):
    """Potential operator ``G f(t) = int_0^inf f(t+s) s**(alpha-1) ds``.

    Step functions use ``G 1_[0,u](t) = ((u-t)_+)**alpha / alpha``. Other
    callables are integrated after the substitution ``s = v**(1/alpha)``;
    their decay exponent (``gamma`` argument or attribute) must exceed alpha.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    t_arr = np.asarray(t, dtype=float)
    if isinstance(f, StepFunction):
        coefs, ends = f.as_indicators()
        pos = np.clip(ends[None, :] - t_arr.reshape(-1, 1), 0.0, None)
        out = (pos**alpha / alpha) @ coefs
        return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)
    gam = gamma if gamma is not None else getattr(f, "gamma", None)
    if gam is None or not gam > alpha:
        raise ValueError("test function must decay like (1+s)**-gamma with gamma > alpha")

    def one(tt):
        val, _ = integrate.quad(lambda v: f(tt + v ** (1.0 / alpha)), 0.0, np.inf, limit=400)
        return val / alpha

    out = np.vectorize(one, otypes=[float])(t_arr)
    return float(out) if t_arr.ndim == 0 else out


def limit_exponent(f, alpha: float, power: float) -> float:
    """``int_0^inf (G f(t))**power t**alpha dt`` for nonnegative ``f``."""
    if isinstance(f, StepFunction):
        coefs, ends = f.as_indicators()
        if len(ends) == 1:
            u = ends[0]
            return coefs[0] ** power * alpha ** (-power) * u ** (1 + alpha + alpha * power) * beta_fn(
                alpha + 1.0, alpha * power + 1.0
            )
        pieces = np.concatenate([[0.0], ends])
        total = 0.0
        for lo, hi in zip(pieces[:-1], pieces[1:]):
            val, _ = integrate.quad(lambda s: g_alpha(f, s, alpha) ** power * s**alpha, lo, hi, limit=200)
            total += val
        return total
    val, _ = integrate.quad(lambda s: g_alpha(f, s, alpha) ** power * s**alpha, 0.0, np.inf, limit=400)
    return val


# --------------------------------------------------------------------------
# Laplace functionals


@dataclass
class SolverState:
    """Cell-midpoint arrays ``g``, ``h``, ``w = h - g`` and derived scalars."""

    grid: Grid
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    mu: float = 1.0
    w: np.ndarray = field(init=False)

    def __post_init__(self):
        self.w = self.h - self.g

    @property
    def log_laplace(self) -> float:
        """``log E exp(-<N, f>) = -mu int g``."""
        return -self.mu * float(self.g.sum()) * self.grid.dt

    @property
    def exact_log_laplace(self) -> float:
        """``mu int w``: log-Laplace of the centered functional ``<N, f> - E<N, f>``."""
        return self.mu * float(self.w.sum()) * self.grid.dt

    centered_log_laplace = exact_log_laplace

    @property
    def exact_mean(self) -> float:
        """``E <N, f> = mu int h``."""
        return self.mu * float(self.h.sum()) * self.grid.dt

    @property
    def laplace(self) -> float:
        return math.exp(self.log_laplace)

    def renewal_residual(self, q: np.ndarray) -> float:
        """``max_j |h_j - f_j - sum_k q_k h_{j+k}|``."""
        n = len(self.h)
        conv = np.array([q[: n - j] @ self.h[j:] for j in range(n)])
        return float(np.max(np.abs(self.h - self.f - conv)))


def _cell_values(f, grid: Grid) -> np.ndarray:
    if isinstance(f, StepFunction):
        if f.support > grid.horizon * (1 + 1e-12):
            raise ValueError("test function support exceeds the grid horizon")
        vals = f.cell_averages(grid)
    else:
        vals = np.asarray(f, dtype=float)
        if vals.shape != (grid.n,):
            raise ValueError("cell values must match the grid")
    if np.any(vals < 0):
        raise ValueError("test function must be nonnegative")
    return vals


def solve_g(f, kernel, marks, grid: Grid, mu: float = 1.0, q: np.ndarray | None = None) -> SolverState:
    """Solve the cluster Laplace equation and its linearization on ``grid``.

    ``g = 1 - e^{-f} (1 - y + H(y))`` with ``y = int g(t+s) phi(ds)`` and
    ``h = f + int h(t+s) phi(ds)``, both zero beyond the support of ``f``.
    ``marks`` is any object with a nonlinearity ``H`` (a mark law for
    Poisson offspring, or a branching law).

    Parameters
    ----------
    f : StepFunction or ndarray
        Nonnegative test function, or its cell averages.
    kernel : Kernel
    marks : object with ``H``
    grid : Grid
        Must cover the support of ``f``.
    mu : float
        Immigration rate, used only in the derived scalars.
    q : ndarray, optional
        Precomputed lattice law for ``grid`` (length ``grid.n``).
    """
    fv = _cell_values(f, grid)
    n = grid.n
    nz = np.flatnonzero(fv)
    g = np.zeros(n)
    h = np.zeros(n)
    if nz.size == 0:
        return SolverState(grid, fv, g, h, mu)
    if q is None:
        q = lattice_masses(kernel, grid.dt, n)
    q0 = float(q[0])
    if not q0 < 1.0:
        raise ValueError("grid too coarse: the first lattice mass is not below one")
    qr = np.ascontiguousarray(q[1:])
    H = getattr(marks, "H_scalar", marks.H)
    last = int(nz[-1])
    for j in range(last, -1, -1):
        m = last - j
        S = float(qr[:m] @ g[j + 1 : j + 1 + m]) if m else 0.0
        Sh = float(qr[:m] @ h[j + 1 : j + 1 + m]) if m else 0.0
        fj = fv[j]
        h[j] = (fj + Sh) / (1.0 - q0)
        a = -math.expm1(-fj)
        e = math.exp(-fj)
        # scalar fixed point in g_j; contraction with factor below q0
        x = g[j + 1] if j + 1 < n else a
        for _ in range(MAX_CELL_ITER):
            y = q0 * x + S
            xn = a + e * (y - H(y))
            if abs(xn - x) <= CELL_RTOL * abs(xn):
                x = xn
                break
            x = xn
        g[j] = x
    return SolverState(grid, fv, g, h, mu)


def scaled_w_integral(f: StepFunction, kernel, marks, T: float, F_T: float, n_cells: int = 10_000) -> float:
    """``int w_{f_T}`` for ``f_T(t) = f(t/T) / F_T`` on ``n_cells`` cells covering its support."""
    fT = f.scaled(T, F_T)
    a = fT.support
    if a == 0:
        return 0.0
    state = solve_g(fT, kernel, marks, Grid.covering(a, n_cells))
    return state.exact_log_laplace
