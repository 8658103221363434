"""Event-level simulation of critical marked Hawkes processes.

The cluster engine grows all clusters of a batch of replicas one generation
at a time with vectorized numpy draws. Children landing beyond the horizon are
dropped together with their whole subtree, which is exact because every
displacement is positive.

Random streams are counter based: replica block ``b`` of a run with seed
``s`` always uses ``Philox(SeedSequence([s, b]))``, so results do not depend
on the number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.special import gammaln

from .renewal import exact_mean_N

EVENT_CAP = 10**8
BLOCK_SIZE = 256


class EventCapExceeded(RuntimeError):
    """A replica produced more events than the configured cap."""


# --------------------------------------------------------------------------
# offspring laws


@dataclass(frozen=True)
class PoissonOfMark:
    """``Poisson(x)`` children for a parent with mark ``x``."""

    uses_marks = True

    def sample_counts(self, marks, rng: np.random.Generator):
        return rng.poisson(marks)

    def sample_offspring_count(self, mark: float, rng: np.random.Generator) -> int:
        if not mark > 0:
            raise ValueError("mark must be positive")
        return int(rng.poisson(mark))

    def params(self):
        return {"variant": "PoissonOfMark"}


@dataclass(frozen=True)
class BetaSibuya:
    """Critical offspring law with generating function ``s + (1-s)**(1+beta) / (1+beta)``.

    ``p_0 = 1/(1+beta)``, ``p_1 = 0``, ``p_2 = beta/2`` and
    ``p_{k+1} = p_k (k-1-beta) / (k+1)``. The survival function has the closed
    form ``P(theta >= k) = beta Gamma(k-1-beta) / ((1+beta) Gamma(1-beta) Gamma(k))``
    for ``k >= 2``, so ``P(theta >= k) ~ C k**(-1-beta)``.
    Sampling inverts a table up to ``k_max`` and the power tail beyond.
    """

    beta: float
    k_max: int = 10**6
    pmf: np.ndarray = field(init=False, repr=False, compare=False)
    cdf: np.ndarray = field(init=False, repr=False, compare=False)

    uses_marks = False

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")
        b = self.beta
        k = np.arange(2, self.k_max)
        ratios = (k - 1.0 - b) / (k + 1.0)
        p = np.empty(self.k_max)
        p[0] = 1.0 / (1.0 + b)
        p[1] = 0.0
        p[2:] = 0.5 * b * np.concatenate([[1.0], np.cumprod(ratios[:-1])])
        object.__setattr__(self, "pmf", p)
        object.__setattr__(self, "cdf", np.cumsum(p))

    @property
    def tail_constant(self) -> float:
        """``C`` with ``P(theta >= k) ~ C k**(-1-beta)``."""
        b = self.beta
        return b / ((1.0 + b) * math.gamma(1.0 - b))

    def survival(self, k):
        """Exact ``P(theta >= k)``."""
        k = np.asarray(k, dtype=float)
        b = self.beta
        kk = np.maximum(k, 2.0)
        big = np.exp(gammaln(kk - 1.0 - b) - gammaln(kk) - gammaln(1.0 - b)) * b / (1.0 + b)
        out = np.where(k <= 0, 1.0, np.where(k <= 1, b / (1.0 + b), big))
        return float(out) if out.ndim == 0 else out

    def pgf(self, s):
        s = np.asarray(s, dtype=float)
        return s + (1.0 - s) ** (1.0 + self.beta) / (1.0 + self.beta)

    def H(self, y):
        """``G(1-y) - 1 + y = y**(1+beta) / (1+beta)``."""
        y = np.asarray(y, dtype=float)
        out = y ** (1.0 + self.beta) / (1.0 + self.beta)
        return float(out) if out.ndim == 0 else out

    def H_scalar(self, y: float) -> float:
        return y ** (1.0 + self.beta) / (1.0 + self.beta)

    def sample_counts(self, marks, rng: np.random.Generator):
        size = np.shape(marks)
        u = rng.random(size)
        out = np.searchsorted(self.cdf, u, side="right")
        far = out >= self.k_max
        if np.any(far):
            # P(theta >= k) ~ C k^(-1-beta): invert the power tail
            v = 1.0 - u[far]
            k = np.floor((self.tail_constant / v) ** (1.0 / (1.0 + self.beta)))
            out = out.astype(np.int64)
            out[far] = np.maximum(k, self.k_max).astype(np.int64)
        return out.astype(np.int64)

    def sample_offspring_count(self, mark, rng: np.random.Generator) -> int:
        return int(self.sample_counts(np.zeros(()), rng))

    def params(self):
        return {"variant": "BetaSibuya", "beta": self.beta}


def make_offspring(variant: str, beta: float | None = None):
    key = variant.lower().replace("_", "").replace("-", "")
    if key in ("poisson", "poissonofmark"):
        return PoissonOfMark()
    if key in ("beta", "betasibuya", "sibuya"):
        if beta is None:
            raise ValueError("BetaSibuya requires beta")
        return BetaSibuya(float(beta))
    raise ValueError(f"unknown offspring variant {variant!r}")


# --------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class EventRecord:
    time: float
    mark: float
    generation: int = 0
    parent: int | None = None
    id: int = 0


@dataclass
class SimOutput:
    """Sorted event times of one replica, optional records and counts on a grid."""

    times: np.ndarray
    horizon: float
    records: list | None = None
    grid: np.ndarray | None = None
    counts: np.ndarray | None = None

    def N(self, t):
        """``N([0, t])``."""
        out = np.searchsorted(self.times, np.asarray(t, dtype=float), side="right")
        return int(out) if np.ndim(out) == 0 else out


@dataclass
class _Generation:
    times: np.ndarray
    marks: np.ndarray
    owner: np.ndarray
    parent: np.ndarray | None = None


def _grow(times, marks, owner, horizon, kernel, mark_law, law, rng, n_owners, cap=EVENT_CAP, record=False):
    """Yield generations of the clusters rooted at the given events.

    ``owner`` labels the replica (or root) each event belongs to.
    """
    keep = times <= horizon
    gen = _Generation(times[keep], marks[keep], owner[keep])
    if record:
        gen.parent = np.full(gen.times.size, -1, dtype=np.int64)
    totals = np.zeros(n_owners, dtype=np.int64)
    offset = 0
    while gen.times.size:
        yield gen
        totals += np.bincount(gen.owner, minlength=n_owners)
        if totals.max() > cap:
            worst = int(np.argmax(totals))
            raise EventCapExceeded(f"replica {worst} exceeded {cap} events before the horizon {horizon}")
        n_kids = law.sample_counts(gen.marks if law.uses_marks else np.ones(gen.times.size), rng)
        parent_idx = np.repeat(np.arange(gen.times.size), n_kids)
        kid_t = gen.times[parent_idx] + kernel.sample_displacement(rng, parent_idx.size)
        inside = kid_t <= horizon
        parent_idx = parent_idx[inside]
        kid_t = kid_t[inside]
        kid_m = np.asarray(mark_law.sample(rng, kid_t.size), dtype=float) if law.uses_marks else np.ones(kid_t.size)
        nxt = _Generation(kid_t, kid_m, gen.owner[parent_idx])
        if record:
            nxt.parent = offset + parent_idx
        offset += gen.times.size
        gen = nxt


def _immigrants(mu, horizon, n_rep, mark_law, law, rng):
    n_imm = rng.poisson(mu * horizon, n_rep)
    owner = np.repeat(np.arange(n_rep), n_imm)
    times = horizon * rng.random(owner.size)
    marks = np.asarray(mark_law.sample(rng, owner.size), dtype=float) if law.uses_marks else np.ones(owner.size)
    return times, marks, owner


def simulate_cluster(root: EventRecord, horizon: float, kernel, marks, law, rng) -> list:
    """All events of the cluster of ``root`` up to ``horizon``, breadth first."""
    if root.time > horizon:
        return []
    out = []
    gen_no = root.generation
    for gen in _grow(
        np.array([root.time]), np.array([root.mark]), np.zeros(1, dtype=np.int64), horizon, kernel, marks, law, rng, 1, record=True
    ):
        base = len(out)
        for i in range(gen.times.size):
            p = int(gen.parent[i])
            out.append(EventRecord(float(gen.times[i]), float(gen.marks[i]), gen_no, None if p < 0 else p, base + i))
        gen_no += 1
    return out


def cluster_sizes(n_clusters: int, horizon: float, kernel, marks, law, rng, root_time: float = 0.0) -> np.ndarray:
    """Sizes of ``n_clusters`` independent clusters rooted at ``root_time``."""
    t = np.full(n_clusters, root_time)
    m = np.asarray(marks.sample(rng, n_clusters), dtype=float) if law.uses_marks else np.ones(n_clusters)
    owner = np.arange(n_clusters)
    sizes = np.zeros(n_clusters, dtype=np.int64)
    for gen in _grow(t, m, owner, horizon, kernel, marks, law, rng, n_clusters):
        sizes += np.bincount(gen.owner, minlength=n_clusters)
    return sizes


def simulate_hawkes(mu, horizon, kernel, marks, law, rng, grid=None, record=False) -> SimOutput:
    """One replica on ``[0, horizon]``: Poisson immigrants plus their clusters."""
    if mu < 0 or horizon <= 0:
        raise ValueError("need mu >= 0 and horizon > 0")
    t0, m0, own = _immigrants(mu, horizon, 1, marks, law, rng)
    ts, ms, gens, pars = [], [], [], []
    offset = 0
    for g_no, gen in enumerate(_grow(t0, m0, own, horizon, kernel, marks, law, rng, 1, record=record)):
        ts.append(gen.times)
        if record:
            ms.append(gen.marks)
            gens.append(np.full(gen.times.size, g_no))
            pars.append(gen.parent)
        offset += gen.times.size
    times = np.concatenate(ts) if ts else np.zeros(0)
    order = np.argsort(times, kind="stable")
    records = None
    if record:
        marks_all = np.concatenate(ms) if ms else np.zeros(0)
        gen_all = np.concatenate(gens) if gens else np.zeros(0, dtype=int)
        par_all = np.concatenate(pars) if pars else np.zeros(0, dtype=int)
        records = [
            EventRecord(float(times[i]), float(marks_all[i]), int(gen_all[i]), None if par_all[i] < 0 else int(par_all[i]), i)
            for i in range(times.size)
        ]
    out = SimOutput(times[order], horizon, records)
    if grid is not None:
        out.grid = np.asarray(grid, dtype=float)
        out.counts = out.N(out.grid)
    return out


# --------------------------------------------------------------------------
# batches


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def _count_block(mu, grid, kernel, marks, law, n_rep, seed, block, cap):
    rng = block_rng(seed, block)
    horizon = float(grid[-1])
    n_grid = grid.size
    acc = np.zeros(n_rep * (n_grid + 1), dtype=np.int64)
    t0, m0, own = _immigrants(mu, horizon, n_rep, marks, law, rng)
    for gen in _grow(t0, m0, own, horizon, kernel, marks, law, rng, n_rep, cap=cap):
        # event at time s counts towards every grid point t_j >= s
        j = np.searchsorted(grid, gen.times, side="left")
        acc += np.bincount(gen.owner * (n_grid + 1) + j, minlength=acc.size)
    return np.cumsum(acc.reshape(n_rep, n_grid + 1), axis=1)[:, :n_grid]


def simulate_counts(
    mu: float,
    grid,
    kernel,
    marks,
    law,
    n_replicas: int,
    seed: int,
    block_size: int = BLOCK_SIZE,
    n_jobs: int = 1,
    cap: int = EVENT_CAP,
) -> np.ndarray:
    """Counts ``N([0, t_j])`` for ``n_replicas`` independent replicas.

    The horizon is ``grid[-1]``. Returns an integer array of shape
    ``(n_replicas, len(grid))``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) < 0) or grid[0] < 0:
        raise ValueError("grid must be a nondecreasing array of nonnegative times")
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    sizes = [min(block_size, n_replicas - s) for s in range(0, n_replicas, block_size)]
    jobs = (delayed(_count_block)(mu, grid, kernel, marks, law, n, seed, b, cap) for b, n in enumerate(sizes))
    if n_jobs == 1:
        parts = [fn(*a, **kw) for fn, a, kw in jobs]
    else:
        parts = Parallel(n_jobs=n_jobs)(jobs)
    return np.concatenate(parts, axis=0) if parts else np.zeros((0, grid.size), dtype=np.int64)


def step_functional(counts: np.ndarray, grid, f) -> np.ndarray:
    """``<N, f>`` per replica for a step function ``f = sum a_k 1_[0, t_k]``.

    Every ``t_k`` must be a grid point.
    """
    coefs, ends = f.as_indicators()
    grid = np.asarray(grid, dtype=float)
    idx = np.searchsorted(grid, ends)
    if np.any(idx >= grid.size) or not np.allclose(grid[idx], ends):
        raise ValueError("indicator ends must be grid points")
    return counts[:, idx] @ coefs


# --------------------------------------------------------------------------
# thinning oracle


def simulate_thinning(mu: float, horizon: float, kernel, marks, rng: np.random.Generator) -> SimOutput:
    """Ogata thinning for ``lambda(t) = mu + sum eta_i phi(t - tau_i)``.

    Requires a bounded nonincreasing density, so that the intensity just after the
    current time dominates it until the next event.
    """
    if not getattr(kernel, "monotone", False):
        raise ValueError("thinning needs a kernel with nonincreasing density")
    if mu < 0 or horizon <= 0:
        raise ValueError("need mu >= 0 and horizon > 0")
    times: list[float] = []
    eta: list[float] = []
    if mu == 0:
        return SimOutput(np.zeros(0), horizon, [])
    t = 0.0

    def intensity(s):
        if not times:
            return mu
        return mu + float(np.dot(eta, kernel.density(s - np.asarray(times))))

    while True:
        bound = intensity(t)
        t += rng.exponential(1.0 / bound)
        if t > horizon:
            break
        if rng.random() * bound <= intensity(t):
            times.append(t)
            eta.append(float(marks.sample(rng)))
    records = [EventRecord(s, m, id=i) for i, (s, m) in enumerate(zip(times, eta))]
    return SimOutput(np.asarray(times), horizon, records)


# --------------------------------------------------------------------------
# normalization


def normalize_paths(counts: np.ndarray, grid, model, T: float, table, mu: float | None = None) -> np.ndarray:
    """``X_T(t) = (N(T t) - E N(T t)) / F_T`` with the exact mean.

    ``grid`` holds the real times ``T t_j`` at which ``counts`` were taken.
    """
    grid = np.asarray(grid, dtype=float)
    if table is None:
        raise ValueError("a resolvent table covering the horizon is required")
    if grid[-1] > table.grid.horizon * (1 + 1e-12):
        raise ValueError("resolvent table does not cover the simulation horizon")
    mu = model.mu if mu is None else mu
    means = np.array([exact_mean_N(table, mu, u) for u in grid])
    return (counts - means[None, :]) / model.norming(T)


__all__ = [
    "PoissonOfMark",
    "BetaSibuya",
    "make_offspring",
    "EventRecord",
    "SimOutput",
    "EventCapExceeded",
    "simulate_cluster",
    "cluster_sizes",
    "simulate_hawkes",
    "simulate_counts",
    "step_functional",
    "simulate_thinning",
    "normalize_paths",
    "block_rng",
]
