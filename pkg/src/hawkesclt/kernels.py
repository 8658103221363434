"""Displacement densities for critical Hawkes kernels.

Every kernel is a probability density ``phi`` on ``(0, inf)`` (criticality is
``int phi = 1``) with a regularly varying tail ``Phi(t) = int_t^inf phi``
satisfying ``t**alpha * Phi(t) -> c_phi``.

Three families are provided:

* :class:`ParetoTail` -- ``phi(t) = alpha (1 + t)**(-1 - alpha)``, closed form
  throughout and ``c_phi = 1``.
* :class:`MittagLeffler` -- ``phi(t) = theta t**(alpha-1) E_{alpha,alpha}(-theta t**alpha)``
  with tail ``E_{alpha,1}(-theta t**alpha)``.
* :class:`StableDensity` -- the one-sided stable density with Laplace
  transform ``exp(-lam**alpha)``, evaluated by Zolotarev's integral.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import gamma, roots_legendre

from .mittag_leffler import mittag_leffler
from .stable import sample_positive_stable

CACHE_VERSION = 1
TABLE_TMIN = 1e-6
TABLE_TMAX = 1e6
TABLE_KNOTS = 2048


def _as_times(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("kernel arguments must be non-negative")
    return arr


def _scalar_or_array(out, t_in):
    return float(out) if np.ndim(t_in) == 0 else out


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"tail exponent alpha must lie in (0, 1), got {alpha}")


class Kernel:
    """Common interface; subclasses supply ``_density``, ``_tail``, ``sample``."""

    alpha: float

    @property
    def c_phi(self) -> float:
        raise NotImplementedError

    @property
    def variant(self) -> str:
        return type(self).__name__

    @property
    def monotone(self) -> bool:
        """Whether the density is bounded and non-increasing on ``(0, inf)``.

        Thinning needs both, so kernels with a singular density at the origin
        report ``False``.
        """
        return False

    def density(self, t):
        """Kernel density ``phi(t)``; raises on negative ``t``."""
        arr = _as_times(t)
        return _scalar_or_array(self._density(arr), t)

    def tail(self, t):
        """Tail mass ``Phi(t) = int_t^inf phi(s) ds``."""
        arr = _as_times(t)
        return _scalar_or_array(self._tail(arr), t)

    def cdf(self, t):
        return 1.0 - self.tail(t)

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def sample_displacement(self, rng: np.random.Generator, size=None):
        return self.sample(rng, size)

    def estimate_tail_constant(self, t: float = 1e8) -> float:
        """Numerical estimate of ``c_phi`` as ``t**alpha * Phi(t)`` at large ``t``.

        Uses Richardson extrapolation in ``t**-alpha``, which removes the
        leading correction of every kernel here.
        """
        t1, t2 = t, 4.0 * t
        y1 = t1**self.alpha * self.tail(t1)
        y2 = t2**self.alpha * self.tail(t2)
        r = 4.0 ** (-self.alpha)
        return (y2 - r * y1) / (1.0 - r)

    def params(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ParetoTail(Kernel):
    """``phi(t) = alpha (1+t)^(-1-alpha)``, the canonical test kernel."""

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    @property
    def c_phi(self) -> float:
        return 1.0

    @property
    def monotone(self) -> bool:
        return True

    def _density(self, t):
        return self.alpha * (1.0 + t) ** (-1.0 - self.alpha)

    def _tail(self, t):
        return (1.0 + t) ** (-self.alpha)

    def sample(self, rng, size=None):
        u = rng.random(size)
        # (1-u)^(-1/alpha) - 1 without cancellation for small u.
        return np.expm1(-np.log1p(-u) / self.alpha)

    def params(self):
        return {"variant": "pareto", "alpha": self.alpha}


@dataclass(frozen=True)
class MittagLeffler(Kernel):
    """Mittag-Leffler kernel ``theta t^(alpha-1) E_{alpha,alpha}(-theta t^alpha)``.

    The density is infinite at ``t = 0``; :meth:`density` returns ``inf``
    there. Sampling inverts a tabulated tail (geometric grid from ``1e-6`` to
    ``1e6``, 2048 knots, monotone cubic interpolation of ``log t`` against
    ``logit Phi``) with the two-term asymptotic expansions beyond both ends.
    """

    alpha: float
    theta: float = 1.0
    cache_dir: str | None = field(default=None, compare=False)
    _table: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.theta > 0:
            raise ValueError("theta must be positive")

    @property
    def c_phi(self) -> float:
        return 1.0 / (self.theta * gamma(1.0 - self.alpha))

    def _density(self, t):
        out = np.full(t.shape, np.inf)
        pos = t > 0
        tp = t[pos]
        z = -self.theta * tp**self.alpha
        out[pos] = self.theta * tp ** (self.alpha - 1.0) * mittag_leffler(self.alpha, self.alpha, z)
        return out

    def _tail(self, t):
        return np.asarray(mittag_leffler(self.alpha, 1.0, -self.theta * t**self.alpha))

    # -- tabulation -------------------------------------------------------

    def params(self):
        return {"variant": "mittag-leffler", "alpha": self.alpha, "theta": self.theta}

    def table_key(self) -> str:
        payload = dict(self.params(), version=CACHE_VERSION, tmin=TABLE_TMIN,
                       tmax=TABLE_TMAX, knots=TABLE_KNOTS)
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]

    def tabulate(self):
        """Return ``(t, Phi(t))`` on the sampling grid, using the cache if set."""
        if self._table is not None:
            return self._table
        table = None
        path = None
        if self.cache_dir is not None:
            path = Path(self.cache_dir) / f"ml_tail_{self.table_key()}.npz"
            if path.exists():
                table = load_table(path)
        if table is None:
            t = np.geomspace(TABLE_TMIN, TABLE_TMAX, TABLE_KNOTS)
            table = (t, self._tail(t))
            if path is not None:
                save_table(path, *table)
        object.__setattr__(self, "_table", table)
        return table

    def _inverse_interp(self):
        t, phi = self.tabulate()
        x = -(np.log(phi) - np.log1p(-phi))
        return PchipInterpolator(x, np.log(t)), x[0], x[-1]

    def quantile_of_tail(self, u):
        """Return ``t`` with ``Phi(t) = u`` for ``u`` in ``(0, 1)``."""
        u = np.asarray(u, dtype=float)
        interp, xlo, xhi = self._interp_cached()
        x = -(np.log(u) - np.log1p(-u))
        out = np.empty_like(u)
        mid = (x >= xlo) & (x <= xhi)
        out[mid] = np.exp(interp(x[mid]))
        lo = x < xlo
        if lo.any():
            # 1 - Phi(t) ~ theta t^a / Gamma(1+a) - theta^2 t^(2a) / Gamma(1+2a)
            c1 = 1.0 / gamma(1.0 + self.alpha)
            c2 = 1.0 / gamma(1.0 + 2.0 * self.alpha)
            v = 1.0 - u[lo]
            y = (c1 - np.sqrt(c1 * c1 - 4.0 * c2 * v)) / (2.0 * c2)
            out[lo] = (y / self.theta) ** (1.0 / self.alpha)
        hi = x > xhi
        if hi.any():
            # Phi(t) ~ y / Gamma(1-a) - y^2 / Gamma(1-2a), y = 1 / (theta t^a)
            c1 = 1.0 / gamma(1.0 - self.alpha)
            c2 = float(np.nan_to_num(1.0 / gamma(1.0 - 2.0 * self.alpha)))
            v = u[hi]
            if c2 == 0.0:
                y = v / c1
            else:
                y = (c1 - np.sqrt(c1 * c1 - 4.0 * c2 * v)) / (2.0 * c2)
            out[hi] = (1.0 / (self.theta * y)) ** (1.0 / self.alpha)
        return out

    def _interp_cached(self):
        cached = self.__dict__.get("_interp")
        if cached is None:
            cached = self._inverse_interp()
            object.__setattr__(self, "_interp", cached)
        return cached

    def sample(self, rng, size=None):
        u = rng.random(size)
        # Phi(xi) is uniform; u == 0 has probability 2^-53 and is remapped.
        u = np.where(u == 0.0, 0.5, u)
        out = self.quantile_of_tail(np.atleast_1d(u))
        return float(out[0]) if size is None else out


def _zolotarev_nodes(levels: int = 48, order: int = 24):
    """Composite Gauss-Legendre rule on ``(0, pi)`` with geometric panels at both ends.

    The integrands develop boundary layers of width ``t**(-alpha)`` at ``u = pi``
    (large ``t``) and ``t**(kappa/2)`` at ``u = 0`` (small ``t``); halving the
    panels towards each endpoint resolves them at every scale. Returns the nodes,
    their distances to ``pi`` (kept separately so ``sin u`` stays accurate) and
    the weights.
    """
    x, w = roots_legendre(order)
    half = np.pi * 2.0 ** -np.arange(1, levels + 1)
    edges = np.concatenate([[0.0], half[::-1], [np.pi / 2]])  # panels of [0, pi/2]
    lo, hi = edges[:-1], edges[1:]
    left = (0.5 * (hi - lo)[:, None] * (x + 1.0)[None, :] + lo[:, None]).ravel()
    wl = (0.5 * (hi - lo)[:, None] * w[None, :]).ravel()
    # mirror: the distance to pi on the right half equals the left node
    u = np.concatenate([left, np.pi - left])
    d = np.concatenate([np.pi - left, left])
    return u, d, np.concatenate([wl, wl])


_ZU, _ZD, _ZW = _zolotarev_nodes()


def _zolotarev_a(alpha: float, u: np.ndarray, d: np.ndarray | None = None) -> np.ndarray:
    sin_u = np.sin(u) if d is None else np.where(u > np.pi / 2, np.sin(d), np.sin(u))
    num = np.sin(alpha * u) ** alpha * np.sin((1.0 - alpha) * u) ** (1.0 - alpha)
    return (num / sin_u) ** (1.0 / (1.0 - alpha))


@dataclass(frozen=True)
class StableDensity(Kernel):
    """One-sided ``alpha``-stable density with Laplace transform ``exp(-lam^alpha)``.

    With ``A(u)`` Zolotarev's function and ``kappa = alpha / (1 - alpha)``,
    ``P(S <= t) = (1/pi) int_0^pi exp(-A(u) t^-kappa) du``; both the tail and
    the density are evaluated by Gauss-Legendre quadrature of this
    representation on a composite rule refined towards both endpoints.
    """

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    @property
    def c_phi(self) -> float:
        return 1.0 / gamma(1.0 - self.alpha)

    def _chunks(self, t, fn):
        out = np.empty(t.shape)
        flat_in, flat_out = t.ravel(), out.reshape(-1)
        a = _zolotarev_a(self.alpha, _ZU, _ZD)
        for start in range(0, flat_in.size, 1024):
            sl = slice(start, start + 1024)
            flat_out[sl] = fn(flat_in[sl], a)
        return out

    def _tail(self, t):
        kappa = self.alpha / (1.0 - self.alpha)

        def fn(tt, a):
            res = np.ones(tt.shape)
            pos = tt > 0
            eps = tt[pos] ** (-kappa)
            res[pos] = (-np.expm1(-np.outer(eps, a)) @ _ZW) / np.pi
            return res

        return self._chunks(t, fn)

    def _density(self, t):
        kappa = self.alpha / (1.0 - self.alpha)

        def fn(tt, a):
            res = np.zeros(tt.shape)
            pos = tt > 0
            tp = tt[pos]
            eps = tp ** (-kappa)
            ea = np.outer(eps, a)
            res[pos] = (ea * np.exp(-ea)) @ _ZW * kappa / (np.pi * tp)
            return res

        return self._chunks(t, fn)

    def sample(self, rng, size=None):
        return sample_positive_stable(self.alpha, rng, size)

    def params(self):
        return {"variant": "stable", "alpha": self.alpha}


def make_kernel(variant: str, alpha: float, theta: float = 1.0, cache_dir=None) -> Kernel:
    """Build a kernel from config keys ``kernel.variant/alpha/theta``."""
    key = variant.lower().replace("_", "-")
    if key in ("pareto", "pareto-tail", "paretotail"):
        return ParetoTail(alpha)
    if key in ("mittag-leffler", "mittagleffler", "ml"):
        return MittagLeffler(alpha, theta, cache_dir=cache_dir)
    if key in ("stable", "stable-density", "stabledensity"):
        return StableDensity(alpha)
    raise ValueError(f"unknown kernel variant {variant!r}")


def save_table(path, t, phi) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(tmp, version=np.int64(CACHE_VERSION), t=t, phi=phi)
    os.replace(tmp, path)


def load_table(path):
    with np.load(path) as data:
        if int(data["version"]) != CACHE_VERSION:
            return None
        return data["t"].copy(), data["phi"].copy()


def cell_masses(kernel: Kernel, dt: float, n: int) -> np.ndarray:
    """Masses ``Phi(k dt) - Phi((k+1) dt)`` of the first ``n`` cells."""
    edges = kernel.tail(np.arange(n + 1) * dt)
    return edges[:-1] - edges[1:]


def lattice_masses(kernel: Kernel, dt: float, n: int) -> np.ndarray:
    """Law of ``dt * round(xi / dt)`` on nodes ``0..n-1``.

    ``q_0 = 1 - Phi(dt/2)`` and ``q_k = Phi((k-1/2) dt) - Phi((k+1/2) dt)``.
    """
    edges = np.concatenate(([0.0], (np.arange(1, n + 1) - 0.5) * dt))
    tails = kernel.tail(edges)
    return tails[:-1] - tails[1:]


__all__ = [
    "Kernel",
    "ParetoTail",
    "MittagLeffler",
    "StableDensity",
    "make_kernel",
    "cell_masses",
    "lattice_masses",
    "mittag_leffler",
    "save_table",
    "load_table",
]
