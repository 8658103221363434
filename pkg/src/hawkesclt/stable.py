"""Totally skewed stable laws and the stable/Gaussian limit processes.

Conventions are fixed through Laplace transforms, never characteristic
functions:

* index ``alpha < 1``: ``E exp(-lam X) = exp(-lam**alpha)``, ``X > 0``;
* index ``a`` in ``(1, 2)``: ``E exp(-lam X) = exp(+lam**a)``, ``E X = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import gamma


def sample_positive_stable(alpha: float, rng: np.random.Generator, size=None):
    """One-sided stable samples with ``E exp(-lam X) = exp(-lam**alpha)``.

    Kanter's representation ``X = (A(U) / W)^((1-alpha)/alpha)`` with ``U``
    uniform on ``(0, pi)`` and ``W`` standard exponential.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    u = math.pi * rng.random(size)
    w = rng.standard_exponential(size)
    num = np.sin(alpha * u) ** alpha * np.sin((1.0 - alpha) * u) ** (1.0 - alpha)
    a = (num / np.sin(u)) ** (1.0 / (1.0 - alpha))
    return (a / w) ** ((1.0 - alpha) / alpha)


def sample_skewed_stable(a: float, rng: np.random.Generator, size=None):
    """Mean-zero, skewness +1 stable samples with ``E exp(-lam X) = exp(lam**a)``.

    Chambers-Mallows-Stuck for ``S_a(sigma, 1, 0)``; the scale
    ``sigma = (-cos(pi a / 2))**(1/a)`` turns the Laplace exponent
    ``-sigma**a lam**a / cos(pi a / 2)`` into ``+lam**a``.
    """
    if not (1.0 < a < 2.0):
        raise ValueError(f"index must lie in (1, 2), got {a}")
    v = math.pi * (rng.random(size) - 0.5)
    w = rng.standard_exponential(size)
    tan_term = math.tan(math.pi * a / 2.0)
    b = math.atan(tan_term) / a
    s = (1.0 + tan_term**2) ** (1.0 / (2.0 * a))
    x = (
        s
        * np.sin(a * (v + b))
        / np.cos(v) ** (1.0 / a)
        * (np.cos(v - a * (v + b)) / w) ** ((1.0 - a) / a)
    )
    sigma = (-math.cos(math.pi * a / 2.0)) ** (1.0 / a)
    return sigma * x


@dataclass(frozen=True)
class StableParams:
    """A totally skewed stable law under the Laplace conventions above."""

    index: float

    def __post_init__(self):
        if not (0.0 < self.index < 1.0 or 1.0 < self.index < 2.0):
            raise ValueError("index must lie in (0, 1) or (1, 2)")

    @property
    def positive(self) -> bool:
        return self.index < 1.0

    def laplace(self, lam):
        lam = np.asarray(lam, dtype=float)
        sign = -1.0 if self.positive else 1.0
        return np.exp(sign * lam**self.index)

    def sample(self, rng, size=None):
        if self.positive:
            return sample_positive_stable(self.index, rng, size)
        return sample_skewed_stable(self.index, rng, size)


def c_alpha(alpha: float, c_phi: float = 1.0) -> float:
    """``lim I_R(T) / T**alpha = 1 / (c_phi Gamma(1+alpha) Gamma(1-alpha))``."""
    return 1.0 / (c_phi * gamma(1.0 + alpha) * gamma(1.0 - alpha))


@dataclass(frozen=True)
class LimitModel:
    """Constants of the rescaled critical marked Hawkes process.

    ``beta`` is the mark (or offspring) tail exponent; ``beta=None`` selects
    the finite-variance regime, which behaves as ``beta = 1``. ``h_coef`` is
    the constant ``C`` in ``H(x) ~ C x**(1+beta)`` as ``x -> 0``:
    ``(c_nu / beta) Gamma(1 - beta)`` for Pareto-type marks,
    ``1 / (1 + beta)`` for the beta-offspring law and half the second moment
    of the marks in the finite-variance case.
    """

    alpha: float
    beta: float | None
    mu: float
    h_coef: float
    c_phi: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if self.beta is not None:
            if not (0.0 < self.beta < 1.0):
                raise ValueError("beta must lie in (0, 1)")
            if not self.alpha < self.beta:
                raise ValueError("the heavy-tailed regime requires alpha < beta")

    @property
    def gaussian(self) -> bool:
        return self.beta is None

    @property
    def power(self) -> float:
        """Stability index ``1 + beta`` (2 in the Gaussian regime)."""
        return 2.0 if self.gaussian else 1.0 + self.beta

    @property
    def c_alpha(self) -> float:
        return c_alpha(self.alpha, self.c_phi)

    @property
    def hurst(self) -> float:
        """Self-similarity index ``(1 + alpha (1 + power)) / power``."""
        return (1.0 + self.alpha * (1.0 + self.power)) / self.power

    @property
    def norming_exponent(self) -> float:
        return self.hurst

    def norming(self, T: float) -> float:
        return T**self.norming_exponent

    @property
    def K(self) -> float:
        p = self.power
        return self.h_coef * self.c_alpha ** (1.0 + p) * self.alpha**p

    @property
    def prefactor(self) -> float:
        """``c`` with ``X_T(t) -> c * zeta(t)`` in law.

        ``(mu K)**(1/(1+beta)) / alpha`` for the stable limit driven by
        increments with Laplace transform ``exp(lam**(1+beta))``, and
        ``sqrt(2 mu K) / alpha`` for the Brownian one.
        """
        if self.gaussian:
            return math.sqrt(2.0 * self.mu * self.K) / self.alpha
        return (self.mu * self.K) ** (1.0 / self.power) / self.alpha

    def indicator_exponent(self, t: float = 1.0) -> float:
        """``int_0^t (G 1_[0,t](u))^p u^alpha du`` in closed form."""
        a, p = self.alpha, self.power
        return a ** (-p) * t ** (1.0 + a + a * p) * beta_fn(a + 1.0, a * p + 1.0)

    def laplace_target(self, t: float = 1.0) -> float:
        """Limit of ``log E exp(-X_T(t))``: ``mu K int (G 1_[0,t])^p u^alpha du``."""
        return self.mu * self.K * self.indicator_exponent(t)

    @classmethod
    def from_components(cls, kernel, marks=None, mu: float = 1.0, offspring=None):
        """Build from a kernel plus either marks or a beta-offspring law."""
        if offspring is not None and getattr(offspring, "beta", None) is not None:
            b = offspring.beta
            return cls(kernel.alpha, b, mu, 1.0 / (1.0 + b), kernel.c_phi)
        if marks.beta is not None:
            return cls(kernel.alpha, marks.beta, mu, marks.h_coef, kernel.c_phi)
        if marks.second_moment is None:
            raise ValueError("marks have neither a tail index nor a finite second moment")
        return cls(kernel.alpha, None, mu, 0.5 * marks.second_moment, kernel.c_phi)


def _path_weights(alpha: float, expo: float, t_eval: np.ndarray, dt: float, n_cells: int):
    u = (np.arange(n_cells) + 0.5) * dt
    diff = t_eval[:, None] - u[None, :]
    w = np.where(diff > 0, np.abs(diff) ** alpha, 0.0) * u[None, :] ** expo
    return w


def simulate_limit_process(
    model: LimitModel,
    dt: float,
    t_max: float,
    rng: np.random.Generator,
    n_paths: int = 1,
    t_eval=None,
):
    """Simulate ``zeta(t) = int_[0,t] u^(alpha/p) (t-u)^alpha L(du)`` on a grid.

    ``L`` has independent increments ``dt**(1/p) S_i`` over cells of width
    ``dt`` with ``S_i`` skewed stable (Gaussian when ``model.gaussian``). The
    integrand is evaluated at cell midpoints; cost is ``O(n_t * n_cells)``
    per path.

    Returns ``(t, paths)`` with ``paths`` of shape ``(n_paths, len(t))``.
    """
    n_cells = int(round(t_max / dt))
    if n_cells < 1:
        raise ValueError("t_max must be at least one grid step")
    t = np.arange(n_cells + 1) * dt if t_eval is None else np.asarray(t_eval, dtype=float)
    p = model.power
    w = _path_weights(model.alpha, model.alpha / p, t, dt, n_cells)
    if model.gaussian:
        incr = math.sqrt(dt) * rng.standard_normal((n_paths, n_cells))
    else:
        incr = dt ** (1.0 / p) * sample_skewed_stable(p, rng, (n_paths, n_cells))
    return t, incr @ w.T


def simulate_gaussian_limit(alpha: float, dt: float, t_max: float, rng, n_paths: int = 1, t_eval=None):
    """``zeta(t) = int_[0,t] u^(alpha/2) (t-u)^alpha B(du)`` on a grid."""
    model = LimitModel(alpha, None, 1.0, 1.0)
    return simulate_limit_process(model, dt, t_max, rng, n_paths, t_eval)


def gaussian_limit_variance(alpha: float, t: float) -> float:
    """``Var zeta(t) = t^(1+3 alpha) B(alpha+1, 2 alpha+1)``."""
    return t ** (1.0 + 3.0 * alpha) * beta_fn(alpha + 1.0, 2.0 * alpha + 1.0)
