"""Mark laws with mean one and the nonlinearity ``H``.

``H(x) = int (exp(-u x) - 1 + u x) nu(du) = L(x) - 1 + x`` where ``L`` is the
Laplace transform of the mark law. Each law evaluates ``H`` in a form free of
the cancellation in ``L(x) - 1 + x`` at small ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, gammaincc

# Below this argument the series branches replace the closed forms.
SMALL_X = 1e-6


def _nonneg(x, what="argument"):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError(f"{what} must be nonnegative")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def _e2(y):
    """``exp(-y) - 1 + y`` without cancellation."""
    y = np.asarray(y, dtype=float)
    small = y < 1e-3
    ys = np.where(small, y, 0.0)
    series = ys * ys * (0.5 - ys * (1 / 6 - ys * (1 / 24 - ys / 120)))
    return np.where(small, series, np.expm1(-y) + y)


class MarkDistribution:
    """Common interface. Subclasses set ``beta``, ``c_nu`` and ``second_moment``."""

    beta: float | None = None
    c_nu: float | None = None
    second_moment: float | None = None

    @property
    def variant(self) -> str:
        return type(self).__name__

    @property
    def mean(self) -> float:
        return 1.0

    @property
    def h_coef(self) -> float:
        """``C`` in ``H(x) ~ C x**(1+beta)`` (``beta=1`` for finite variance)."""
        if self.beta is not None:
            return self.c_nu / self.beta * gamma(1.0 - self.beta)
        return 0.5 * self.second_moment

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    sample_mark = sample

    def tail(self, x):
        """``nu((x, inf))``."""
        arr = _nonneg(x)
        return _out(self._tail(arr), x)

    def laplace(self, z):
        """``int exp(-u z) nu(du)``."""
        arr = _nonneg(z)
        return _out(self._laplace(arr), z)

    def H(self, x):
        arr = _nonneg(x)
        return _out(self._H(arr), x)

    def H_scalar(self, x: float) -> float:
        """``H`` for one float, without array overhead (solver inner loop)."""
        return float(self._H(np.asarray(x, dtype=float)))

    def params(self) -> dict:
        return {"variant": self.variant}


@dataclass(frozen=True)
class DiracOne(MarkDistribution):
    """All marks equal to one: the unmarked critical Hawkes process."""

    second_moment: float = 1.0

    def sample(self, rng, size=None):
        return np.ones(size) if size is not None else 1.0

    def _tail(self, x):
        return np.where(x < 1.0, 1.0, 0.0)

    def _laplace(self, z):
        return np.exp(-z)

    def _H(self, x):
        return _e2(x)

    def H_scalar(self, x):
        if x < 1e-3:
            return x * x * (0.5 - x * (1 / 6 - x * (1 / 24 - x / 120)))
        return math.expm1(-x) + x


@dataclass(frozen=True)
class ExponentialMean1(MarkDistribution):
    second_moment: float = 2.0

    def sample(self, rng, size=None):
        return rng.standard_exponential(size)

    def _tail(self, x):
        return np.exp(-x)

    def _laplace(self, z):
        return 1.0 / (1.0 + z)

    def _H(self, x):
        return x * x / (1.0 + x)

    def H_scalar(self, x):
        return x * x / (1.0 + x)


@dataclass(frozen=True)
class GammaMean1(MarkDistribution):
    """Gamma law with shape ``k`` and scale ``1/k``."""

    shape: float = 2.0

    def __post_init__(self):
        if not self.shape > 0:
            raise ValueError("shape must be positive")

    @property
    def second_moment(self) -> float:
        return (self.shape + 1.0) / self.shape

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, 1.0 / self.shape, size)

    def _tail(self, x):
        return gammaincc(self.shape, self.shape * x)

    def _laplace(self, z):
        return np.exp(-self.shape * np.log1p(z / self.shape))

    def _H(self, x):
        k = self.shape
        third = (k + 1.0) * (k + 2.0) / k**2
        small = x < 1e-4
        xs = np.where(small, x, 0.0)
        series = 0.5 * self.second_moment * xs**2 - third * xs**3 / 6.0
        return np.where(small, series, np.expm1(-k * np.log1p(x / k)) + x)

    def params(self):
        return {"variant": self.variant, "shape": self.shape}


@dataclass(frozen=True)
class ParetoMean1(MarkDistribution):
    """Pareto law on ``[x_m, inf)`` with shape ``1 + beta`` and mean one.

    ``x_m = beta / (1 + beta)`` and ``x**(1+beta) nu((x, inf)) = x_m**(1+beta)``
    for ``x >= x_m``.
    """

    beta: float = 0.6

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")

    @property
    def x_m(self) -> float:
        return self.beta / (1.0 + self.beta)

    @property
    def shape(self) -> float:
        return 1.0 + self.beta

    @property
    def c_nu(self) -> float:
        return self.x_m**self.shape

    @property
    def second_moment(self):
        return None

    def sample(self, rng, size=None):
        u = rng.random(size)
        # 1 - u lies in (0, 1], so samples are finite and >= x_m
        return self.x_m * (1.0 - u) ** (-1.0 / self.shape)

    def _tail(self, x):
        return np.where(x < self.x_m, 1.0, (self.x_m / np.maximum(x, self.x_m)) ** self.shape)

    def _upper_term(self, y):
        # y^(1+b) Gamma(1-b, y) / b, with y = 0 mapped to 0
        b = self.beta
        with np.errstate(divide="ignore", invalid="ignore"):
            val = y**self.shape * gammaincc(1.0 - b, y) * gamma(1.0 - b) / b
        return np.where(y > 0, val, 0.0)

    def _laplace(self, z):
        y = self.x_m * z
        return np.exp(-y) * (1.0 - y / self.beta) + self._upper_term(y)

    def _H(self, x):
        b = self.beta
        y = self.x_m * x
        small = x < SMALL_X
        ys = np.where(small, y, 0.0)
        c2 = 0.5 - 1.0 / (1.0 - b)
        c3 = -1.0 / 6.0 - 0.5 / b + 1.0 / (b * (2.0 - b))
        series = gamma(1.0 - b) / b * ys**self.shape + c2 * ys**2 + c3 * ys**3
        yl = np.where(small, 1.0, y)
        closed = _e2(yl) - yl / b * np.expm1(-yl) + self._upper_term(yl)
        return np.where(small, series, closed)

    def H_scalar(self, x):
        b, p = self.beta, self.shape
        y = self.x_m * x
        g1 = math.gamma(1.0 - b)
        if x < SMALL_X:
            c2 = 0.5 - 1.0 / (1.0 - b)
            c3 = -1.0 / 6.0 - 0.5 / b + 1.0 / (b * (2.0 - b))
            return g1 / b * y**p + c2 * y * y + c3 * y**3
        e2 = y * y * (0.5 - y * (1 / 6 - y * (1 / 24 - y / 120))) if y < 1e-3 else math.expm1(-y) + y
        return e2 - y / b * math.expm1(-y) + y**p * float(gammaincc(1.0 - b, y)) * g1 / b

    def params(self):
        return {"variant": self.variant, "beta": self.beta}


MARK_VARIANTS = {
    "dirac": DiracOne,
    "diracone": DiracOne,
    "pareto": ParetoMean1,
    "paretomean1": ParetoMean1,
    "exponential": ExponentialMean1,
    "exponentialmean1": ExponentialMean1,
    "gamma": GammaMean1,
    "gammamean1": GammaMean1,
}


def make_marks(variant: str, beta: float | None = None, shape: float | None = None) -> MarkDistribution:
    """Build a mark law from config values (``marks.variant``, ``marks.beta``, ``marks.shape``)."""
    key = variant.lower().replace("_", "").replace("-", "")
    if key not in MARK_VARIANTS:
        raise ValueError(f"unknown mark variant {variant!r}")
    cls = MARK_VARIANTS[key]
    if cls is ParetoMean1:
        if beta is None:
            raise ValueError("ParetoMean1 requires beta")
        return cls(beta=float(beta))
    if cls is GammaMean1:
        return cls(shape=float(shape if shape is not None else 2.0))
    return cls()


def pareto_h_expansion(beta: float, x) -> np.ndarray:
    """Two-term small-``x`` expansion of ``H`` for :class:`ParetoMean1`.

    ``H(x) = (c_nu / beta) Gamma(1-beta) x**(1+beta) + c2 x_m**2 x**2 + O(x**3)``
    with ``c2 = 1/2 - 1/(1-beta)``.
    """
    xm = beta / (1.0 + beta)
    y = xm * np.asarray(x, dtype=float)
    return gamma(1.0 - beta) / beta * y ** (1.0 + beta) + (0.5 - 1.0 / (1.0 - beta)) * y**2


__all__ = [
    "MarkDistribution",
    "DiracOne",
    "ExponentialMean1",
    "GammaMean1",
    "ParetoMean1",
    "make_marks",
    "pareto_h_expansion",
]
