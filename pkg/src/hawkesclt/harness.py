"""Experiment orchestration, estimators and machine-readable reports."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml
from scipy.special import beta as beta_fn

from . import __version__
from .kernels import ParetoTail, make_kernel
from .marks import DiracOne, ParetoMean1, make_marks
from .renewal import Grid, StepFunction, build_resolvent, check_tightness, exact_mean_N, limit_exponent, solve_g
from .simulator import BetaSibuya, PoissonOfMark, make_offspring, simulate_counts, step_functional
from .stable import LimitModel, sample_positive_stable, sample_skewed_stable, simulate_limit_process

# --------------------------------------------------------------------------
# estimators


def hill_estimator(samples, k: int | None = None) -> float:
    """Hill estimate of the tail index from the ``k`` largest positive samples.

    ``1 / mean(log(x_(n-i+1) / x_(n-k)))`` for ``i = 1..k``; ``k`` defaults to
    ``n**0.6`` with ``n`` the sample size.
    """
    x = np.asarray(samples, dtype=float)
    if k is None:
        k = int(x.size**0.6)
    pos = np.sort(x[x > 0])
    if k < 1 or pos.size <= k:
        raise ValueError(f"need more than k={k} positive samples, got {pos.size}")
    top = pos[-k:]
    spacing = np.log(top / pos[-k - 1]).mean()
    if spacing <= 0:
        raise ValueError("zero log-spacings: samples are degenerate")
    return float(1.0 / spacing)


def hill_sensitivity(samples) -> dict:
    """Hill estimates at ``k = n**0.5, n**0.6, n**0.7``."""
    n = np.asarray(samples).size
    return {f"n^{e}": hill_estimator(samples, int(n**e)) for e in (0.5, 0.6, 0.7)}


def empirical_laplace(samples, lambdas):
    """Mean and standard error of ``exp(-lam x)`` for each ``lam``.

    Returns two arrays ``(means, stderr)``.
    """
    x = np.asarray(samples, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    vals = np.exp(-lam[:, None] * x[None, :])
    means = vals.mean(axis=1)
    se = vals.std(axis=1, ddof=1) / math.sqrt(x.size) if x.size > 1 else np.zeros_like(means)
    return means, se


def iqr(x) -> float:
    q75, q25 = np.percentile(x, [75, 25])
    return float(q75 - q25)


# --------------------------------------------------------------------------
# configuration and reports


@dataclass
class ExperimentConfig:
    """Parameters of one experiment; ``beta=None`` selects the finite-variance regime."""

    alpha: float = 0.3
    beta: float | None = 0.6
    mu: float = 1.0
    kernel: str = "pareto"
    theta: float = 1.0
    marks: str = "pareto"
    marks_shape: float | None = None
    offspring: str = "poisson"
    T_grid: list = field(default_factory=lambda: [1e2, 1e3])
    replicas: int = 2000
    seed: int = 0
    n_jobs: int = 1
    n_cells: int = 10_000
    limit_dt: float = 1.0 / 512
    limit_tmax: float = 2.0
    limit_paths: int = 10_000
    tol_laplace: float = 0.15
    tol_limit: float = 0.15
    out_dir: str = "."

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        heavy = self.beta is not None
        if heavy and not self.alpha < self.beta:
            raise ValueError("heavy-tailed runs require alpha < beta")
        if not heavy and self.offspring_law().uses_marks and self.mark_law().second_moment is None:
            raise ValueError("finite-variance runs need marks with a finite second moment")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        """Accept flat keys or the nested ``kernel.* / marks.* / limit.*`` layout."""
        flat = {}
        for key, val in data.items():
            if isinstance(val, dict):
                for sub, v in val.items():
                    flat[f"{key}.{sub}"] = v
            else:
                flat[key] = val
        rename = {
            "kernel.variant": "kernel",
            "kernel.alpha": "alpha",
            "kernel.theta": "theta",
            "marks.variant": "marks",
            "marks.beta": "beta",
            "marks.shape": "marks_shape",
            "offspring.variant": "offspring",
            "offspring.beta": "beta",
            "limit.dt": "limit_dt",
            "limit.tmax": "limit_tmax",
            "limit.paths": "limit_paths",
        }
        kwargs = {rename.get(k, k): v for k, v in flat.items()}
        unknown = set(kwargs) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        return cls.from_mapping(data)

    def kernel_obj(self):
        return make_kernel(self.kernel, self.alpha, self.theta)

    def mark_law(self):
        if self.marks.lower().startswith("pareto"):
            return make_marks(self.marks, beta=self.beta)
        return make_marks(self.marks, shape=self.marks_shape)

    def offspring_law(self):
        return make_offspring(self.offspring, beta=self.beta)

    def model(self) -> LimitModel:
        law = self.offspring_law()
        kern = self.kernel_obj()
        return LimitModel.from_components(kern, self.mark_law(), self.mu, offspring=law if not law.uses_marks else None)

    def nonlinearity(self):
        """The object whose ``H`` drives the Laplace equation."""
        law = self.offspring_law()
        return self.mark_law() if law.uses_marks else law


@dataclass
class Check:
    name: str
    measured: object
    target: object
    tol: object
    passed: bool
    seconds: float = 0.0
    config: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@dataclass
class Report:
    config: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    version: str = __version__

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def to_dict(self) -> dict:
        return {"version": self.version, "config": self.config, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self, path=None) -> str:
        text = json.dumps(_plain(self.to_dict()), indent=2)
        if path is not None:
            Path(path).write_text(text)
        return text


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


class _timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# --------------------------------------------------------------------------
# experiments


def centered_functional(counts, grid, f, T, F_T, state) -> np.ndarray:
    """``<X_T, f> = <N, f_T> - E<N, f_T>`` per replica, ``f_T = f(./T) / F_T``."""
    raw = step_functional(counts, grid, f.scaled(T, F_T))
    return raw - state.exact_mean


def run_clt_experiment(cfg: ExperimentConfig, f: StepFunction | None = None, lambdas=(1.0,)) -> Report:
    """Deterministic, Monte Carlo and tail checks of the Laplace limit for each ``T``."""
    f = StepFunction.indicator(1.0) if f is None else f
    if not f.nonnegative:
        raise ValueError("test function must be nonnegative")
    model = cfg.model()
    kern, H_obj, law = cfg.kernel_obj(), cfg.nonlinearity(), cfg.offspring_law()
    marks = cfg.mark_law() if law.uses_marks else DiracOne()
    target = cfg.mu * model.K * limit_exponent(f, model.alpha, model.power) if f.support > 0 else 0.0
    report = Report(config=asdict(cfg))
    coefs, ends = f.as_indicators()
    for T in cfg.T_grid:
        F_T = model.norming(T)
        fT = f.scaled(T, F_T)
        with _timer() as tm:
            state = solve_g(fT, kern, H_obj, Grid.covering(max(fT.support, 1e-12), cfg.n_cells), mu=cfg.mu)
        exact = state.exact_log_laplace
        rel = abs(exact / target - 1.0) if target else abs(exact)
        report.add(Check(f"deterministic_laplace_T{T:g}", exact, target, cfg.tol_laplace, rel <= cfg.tol_laplace, tm.seconds, {"T": T}))

        with _timer() as tm:
            grid = np.unique(ends * T) if ends.size else np.array([T])
            counts = simulate_counts(cfg.mu, grid, kern, marks, law, cfg.replicas, cfg.seed, n_jobs=cfg.n_jobs)
            x = centered_functional(counts, grid, f, T, F_T, state) if f.support > 0 else np.zeros(cfg.replicas)
            lam = np.asarray(lambdas, dtype=float)
            means, se = empirical_laplace(x, lam)
            exact_lap = np.exp(cfg.mu * np.array([_centered_exponent(f, lm, T, F_T, kern, H_obj, cfg) for lm in lam]))
            z = np.abs(means - exact_lap) / np.where(se > 0, se, np.inf)
        report.add(
            Check(
                f"mc_laplace_T{T:g}",
                means.tolist(),
                exact_lap.tolist(),
                "3 SE",
                bool(np.all(np.where(se > 0, z <= 3.0, means == exact_lap))),
                tm.seconds,
                {"T": T},
                {"stderr": se.tolist(), "lambdas": lam.tolist(), "limit": np.exp(target * lam**model.power).tolist()},
            )
        )
        if x.size > 100 and np.sum(x > 0) > int(x.size**0.6):
            est = hill_estimator(x)
            report.add(
                Check(f"hill_T{T:g}", est, model.power, 0.15, abs(est - model.power) <= 0.15, 0.0, {"T": T}, hill_sensitivity(x))
            )
    return report


def _centered_exponent(f, lam, T, F_T, kern, H_obj, cfg):
    if lam == 0:
        return 0.0
    fl = StepFunction(f.breaks, f.values * lam)
    fT = fl.scaled(T, F_T)
    if fT.support == 0:
        return 0.0
    return solve_g(fT, kern, H_obj, Grid.covering(fT.support, cfg.n_cells)).exact_log_laplace


def run_limit_comparison(cfg: ExperimentConfig, T: float = 1e3) -> Report:
    """Compare ``X_T(1)`` replicas with the scaled limit ``c zeta(1)``; check self-similarity."""
    model = cfg.model()
    kern, law = cfg.kernel_obj(), cfg.offspring_law()
    marks = cfg.mark_law() if law.uses_marks else DiracOne()
    report = Report(config=asdict(cfg))
    with _timer() as tm:
        counts = simulate_counts(cfg.mu, [T], kern, marks, law, cfg.replicas, cfg.seed, n_jobs=cfg.n_jobs)
        table = build_resolvent(kern, Grid.covering(T, cfg.n_cells))
        x = (counts[:, 0] - exact_mean_N(table, cfg.mu, T)) / model.norming(T)
        rng = np.random.default_rng([cfg.seed, 1])
        _, z = simulate_limit_process(model, cfg.limit_dt, 1.0, rng, cfg.limit_paths, t_eval=[1.0])
        z = model.prefactor * z[:, 0]
    # the median is compared on the scale of the IQR since it may sit near 0
    scale = iqr(z)
    for name, a, b, err in (
        ("median", float(np.median(x)), float(np.median(z)), abs(np.median(x) - np.median(z)) / scale),
        ("iqr", iqr(x), scale, abs(iqr(x) / scale - 1.0)),
    ):
        report.add(Check(f"limit_{name}_T{T:g}", a, b, cfg.tol_limit, bool(err <= cfg.tol_limit), tm.seconds, {"T": T}, {"error": err}))
    if model.gaussian:
        var_target = 2.0 * cfg.mu * model.K * model.alpha**-2 * beta_fn(model.alpha + 1, 2 * model.alpha + 1)
        v = float(np.var(x, ddof=1))
        report.add(Check(f"gaussian_variance_T{T:g}", v, var_target, cfg.tol_limit, abs(v / var_target - 1) <= cfg.tol_limit))
    report.add(self_similarity_check(model, cfg.limit_paths, cfg.seed, n_cells=int(round(cfg.limit_tmax / cfg.limit_dt))))
    return report


def exponent_sweep(cfg: ExperimentConfig, T_grid=None) -> tuple:
    """IQR of ``N(T) - E N(T)`` over ``T_grid``; returns ``(T, iqr, slope)``."""
    T_grid = np.asarray(T_grid if T_grid is not None else 10.0 ** np.array([2.0, 2.5, 3.0, 3.5]))
    kern, law = cfg.kernel_obj(), cfg.offspring_law()
    marks = cfg.mark_law() if law.uses_marks else DiracOne()
    counts = simulate_counts(cfg.mu, T_grid, kern, marks, law, cfg.replicas, cfg.seed, n_jobs=cfg.n_jobs)
    spreads = np.array([iqr(counts[:, j]) for j in range(T_grid.size)])
    slope = float(np.polyfit(np.log(T_grid), np.log(spreads), 1)[0])
    return T_grid, spreads, slope, counts


# --------------------------------------------------------------------------
# acceptance checks, one per criterion


def check_stable_samplers(n: int = 10**6, seed: int = 1, alpha: float = 0.5, beta: float = 0.6) -> Check:
    """Laplace transforms of both stable samplers within 3 standard errors."""
    lam = np.array([0.25, 0.5, 1.0, 2.0])
    with _timer() as tm:
        rng = np.random.default_rng(seed)
        pos = sample_positive_stable(alpha, rng, n)
        sk = sample_skewed_stable(1.0 + beta, rng, n)
        m1, s1 = empirical_laplace(pos, lam)
        m2, s2 = empirical_laplace(sk, lam)
    z1 = np.abs(m1 - np.exp(-(lam**alpha))) / s1
    z2 = np.abs(m2 - np.exp(lam ** (1 + beta))) / s2
    worst = float(max(z1.max(), z2.max()))
    return Check(
        "stable_sampler_laplace",
        worst,
        0.0,
        3.0,
        worst <= 3.0 and tm.seconds < 30,
        tm.seconds,
        {"alpha": alpha, "index": 1 + beta, "n": n, "seed": seed},
        {"z_positive": z1.tolist(), "z_skewed": z2.tolist()},
    )


def check_resolvent_asymptotics(alpha: float = 0.5) -> Check:
    with _timer() as tm:
        tp = build_resolvent(ParetoTail(alpha), Grid(1.0, 10_000))
        ratio = tp.I_R[-1] / 1e4**alpha
        ca = tp.c_alpha
        tm_ml = build_resolvent(make_kernel("mittag-leffler", alpha), Grid(1.0, 10_000))
        slope = tm_ml.resolvent_slope()
    ok = abs(ratio / ca - 1) <= 0.05 and abs(slope - (alpha - 1)) <= 0.05
    return Check(
        "resolvent_asymptotics",
        {"I_R_ratio": ratio, "ml_slope": slope},
        {"c_alpha": ca, "slope": alpha - 1},
        {"rel": 0.05, "abs": 0.05},
        ok and tm.seconds < 60,
        tm.seconds,
        {"alpha": alpha},
    )


def check_mean_identity(n_rep: int = 10_000, seed: int = 2, alpha: float = 0.5, mu: float = 1.0) -> Check:
    us = np.array([10.0, 50.0, 200.0])
    kern = ParetoTail(alpha)
    with _timer() as tm:
        counts = simulate_counts(mu, us, kern, DiracOne(), PoissonOfMark(), n_rep, seed)
        table = build_resolvent(kern, Grid(0.01, 20_000))
        exact = np.array([exact_mean_N(table, mu, u) for u in us])
        mc = counts.mean(axis=0)
        se = counts.std(axis=0, ddof=1) / math.sqrt(n_rep)
    z = np.abs(mc - exact) / se
    return Check(
        "mean_identity",
        mc.tolist(),
        exact.tolist(),
        "3 SE",
        bool(np.all(z <= 3.0)) and tm.seconds < 300,
        tm.seconds,
        {"alpha": alpha, "mu": mu, "u": us.tolist(), "replicas": n_rep, "seed": seed},
        {"z": z.tolist(), "stderr": se.tolist()},
    )


FINITE_T_CASES = (
    ("dirac", 0.5, DiracOne()),
    ("pareto", 0.3, ParetoMean1(0.6)),
)


def check_finite_T_laplace(n_rep: int = 100_000, seed: int = 3, mu: float = 1.0, n_cells: int = 4000) -> Check:
    f = StepFunction.indicator(10.0, 0.5)
    grid = np.array([10.0])
    res, ok = {}, True
    with _timer() as tm:
        for name, alpha, marks in FINITE_T_CASES:
            kern = ParetoTail(alpha)
            state = solve_g(f, kern, marks, Grid.covering(10.0, n_cells), mu=mu)
            counts = simulate_counts(mu, grid, kern, marks, PoissonOfMark(), n_rep, seed)
            vals = np.exp(-step_functional(counts, grid, f))
            m, s = vals.mean(), vals.std(ddof=1) / math.sqrt(n_rep)
            z = abs(m - state.laplace) / s
            ok &= z <= 3.0
            res[name] = {"mc": m, "stderr": s, "exact": state.laplace, "z": z, "alpha": alpha}
    return Check(
        "finite_T_laplace",
        {k: v["mc"] for k, v in res.items()},
        {k: v["exact"] for k, v in res.items()},
        "3 SE",
        bool(ok) and tm.seconds < 300,
        tm.seconds,
        {"f": "0.5*1[0,10]", "mu": mu, "replicas": n_rep, "seed": seed},
        res,
    )


def check_deterministic_clt(T_grid=(1e2, 1e3, 1e4), n_cells: int = 10_000, alpha=0.3, beta=0.6, mu=1.0) -> Check:
    kern, marks = ParetoTail(alpha), ParetoMean1(beta)
    model = LimitModel.from_components(kern, marks, mu)
    target = model.laplace_target(1.0)
    f = StepFunction.indicator(1.0)
    errs, vals = [], []
    with _timer() as tm:
        for T in T_grid:
            fT = f.scaled(T, model.norming(T))
            st = solve_g(fT, kern, marks, Grid.covering(T, n_cells), mu=mu)
            vals.append(st.exact_log_laplace)
            errs.append(float(abs(st.exact_log_laplace / target - 1.0)))
    monotone = all(a > b for a, b in zip(errs, errs[1:]))
    ok = monotone and errs[-1] < 0.15 and tm.seconds < 600
    return Check(
        "deterministic_clt",
        vals[-1],
        target,
        0.15,
        ok,
        tm.seconds,
        {"alpha": alpha, "beta": beta, "mu": mu, "T": list(T_grid), "dt": "T*1e-4"},
        {"values": vals, "rel_errors": errs, "monotone": monotone},
    )


SWEEP_T = 10.0 ** np.array([2.0, 2.5, 3.0, 3.5])


def heavy_sweep(n_rep: int = 10_000, seed: int = 6, n_jobs: int = 1):
    cfg = ExperimentConfig(alpha=0.3, beta=0.6, replicas=n_rep, seed=seed, n_jobs=n_jobs)
    return exponent_sweep(cfg, SWEEP_T)


def gaussian_sweep(n_rep: int = 10_000, seed: int = 7, n_jobs: int = 1):
    cfg = ExperimentConfig(alpha=0.4, beta=None, marks="exponential", replicas=n_rep, seed=seed, n_jobs=n_jobs)
    return exponent_sweep(cfg, SWEEP_T)


def check_norming_exponent(heavy=None, gaussian=None, n_rep: int = 10_000, n_jobs: int = 1) -> Check:
    with _timer() as tm:
        heavy = heavy if heavy is not None else heavy_sweep(n_rep, n_jobs=n_jobs)
        gaussian = gaussian if gaussian is not None else gaussian_sweep(n_rep, n_jobs=n_jobs)
    s_h, s_g = heavy[2], gaussian[2]
    t_h = (1 + 0.3 * 2.6) / 1.6
    t_g = (1 + 3 * 0.4) / 2
    ok = abs(s_h - t_h) <= 0.1 and abs(s_g - t_g) <= 0.1
    return Check(
        "norming_exponent",
        {"heavy": s_h, "gaussian": s_g},
        {"heavy": t_h, "gaussian": t_g},
        0.1,
        ok,
        tm.seconds,
        {"T": SWEEP_T.tolist(), "heavy": {"alpha": 0.3, "beta": 0.6}, "gaussian": {"alpha": 0.4, "marks": "ExponentialMean1"}},
        {"iqr_heavy": heavy[1].tolist(), "iqr_gaussian": gaussian[1].tolist()},
    )


def check_tail_index(heavy=None, T: float = 1e3, n_rep: int = 10_000, seed: int = 6, n_jobs: int = 1) -> Check:
    """Hill estimate of ``X_T(1)``; reuses the heavy sweep counts when given."""
    kern = ParetoTail(0.3)
    with _timer() as tm:
        if heavy is not None and T in heavy[0]:
            j = int(np.flatnonzero(heavy[0] == T)[0])
            n = heavy[3][:, j]
        else:
            n = simulate_counts(1.0, [T], kern, ParetoMean1(0.6), PoissonOfMark(), n_rep, seed, n_jobs=n_jobs)[:, 0]
        table = build_resolvent(kern, Grid.covering(T, 10_000))
        x = (n - exact_mean_N(table, 1.0, T)) / LimitModel(0.3, 0.6, 1.0, 1.0).norming(T)
        est = hill_estimator(x)
    return Check(
        "tail_index",
        est,
        1.6,
        0.15,
        abs(est - 1.6) <= 0.15,
        tm.seconds,
        {"alpha": 0.3, "beta": 0.6, "T": T, "replicas": int(x.size)},
        hill_sensitivity(x),
    )


def self_similarity_check(model: LimitModel, n_paths: int = 10_000, seed: int = 8, n_cells: int = 1024) -> Check:
    """Quantiles of ``zeta(2)`` against ``2**H`` times those of ``zeta(1)``."""
    # the Gaussian median is 0, where a relative error is meaningless
    probs = [10, 25, 75, 90] if model.gaussian else [10, 25, 50, 75, 90]
    with _timer() as tm:
        rng = np.random.default_rng(seed)
        _, z = simulate_limit_process(model, 2.0 / n_cells, 2.0, rng, n_paths, t_eval=[1.0, 2.0])
        q1 = np.percentile(z[:, 0], probs)
        q2 = np.percentile(z[:, 1], probs)
        scaled = 2.0**model.hurst * q1
        rel = np.abs(q2 / scaled - 1.0)
    return Check(
        "self_similarity",
        float(rel.max()),
        0.0,
        0.10,
        bool(rel.max() < 0.10),
        tm.seconds,
        {"alpha": model.alpha, "beta": model.beta, "H": model.hurst, "paths": n_paths, "seed": seed},
        {"q_zeta1": q1.tolist(), "q_zeta2": q2.tolist(), "rel": rel.tolist()},
    )


def check_self_similarity(n_paths: int = 10_000, seed: int = 8) -> Check:
    return self_similarity_check(LimitModel(0.3, 0.6, 1.0, 1.0), n_paths, seed)


def check_beta_offspring(beta: float = 0.6, n: int = 10**6, seed: int = 9, trunc: int = 10**4) -> Check:
    """Exact small-k probabilities, total mass and offspring mean of the beta law."""
    with _timer() as tm:
        law = BetaSibuya(beta)
        p = law.pmf
        mass_err = abs(math.fsum(p) + law.survival(law.k_max) - 1.0)
        exact_small = p[0] == 1.0 / (1.0 + beta) and p[1] == 0.0 and abs(p[2] - beta / 2) <= 1e-15
        rng = np.random.default_rng(seed)
        draws = law.sample_counts(np.zeros(n), rng)
        # E min(theta, M) = sum_{k=1}^M P(theta >= k) has finite variance
        cut = np.minimum(draws, trunc)
        trunc_mean = float(np.sum(law.survival(np.arange(1, trunc + 1))))
        z = abs(cut.mean() - trunc_mean) / (cut.std(ddof=1) / math.sqrt(n))
        full_mean = float(draws.mean())
    ok = mass_err <= 1e-10 and exact_small and z <= 3.0 and abs(full_mean - 1.0) <= 0.05
    return Check(
        "beta_offspring_law",
        {"mass_error": mass_err, "p0": p[0], "p1": p[1], "p2": p[2], "mean": full_mean},
        {"mass_error": 0.0, "p0": 1 / (1 + beta), "p1": 0.0, "p2": beta / 2, "mean": 1.0},
        {"mass": 1e-10, "truncated_mean": "3 SE", "mean": 0.05},
        bool(ok),
        tm.seconds,
        {"beta": beta, "n": n, "seed": seed},
        {"truncated_mean_z": z, "truncated_mean_exact": trunc_mean},
    )


def check_beta_branching_ratio(T: float = 1e4, n_cells: int = 10_000, alpha=0.3, beta=0.6) -> Check:
    kern = ParetoTail(alpha)
    marks, law = ParetoMean1(beta), BetaSibuya(beta)
    m_marked = LimitModel.from_components(kern, marks)
    m_beta = LimitModel.from_components(kern, offspring=law)
    f = StepFunction.indicator(1.0)
    with _timer() as tm:
        fT = f.scaled(T, m_marked.norming(T))
        grid = Grid.covering(T, n_cells)
        w_m = solve_g(fT, kern, marks, grid).exact_log_laplace
        w_b = solve_g(fT, kern, law, grid).exact_log_laplace
    target = marks.h_coef * (1.0 + beta)
    ratio = w_m / w_b
    return Check(
        "beta_branching_ratio",
        ratio,
        target,
        0.10,
        abs(ratio / target - 1) <= 0.10,
        tm.seconds,
        {"alpha": alpha, "beta": beta, "T": T},
        {"w_marked": w_m, "w_beta": w_b, "K_ratio": m_marked.K / m_beta.K},
    )


def check_tightness_kernels(alpha: float = 0.5, M: float = 2.0, T_grid=(1e2, 1e3, 1e4), spread: float = 1.5, bound: float = 10.0) -> Check:
    """``sup`` ratios finite, below ``bound`` and within a factor ``spread`` across ``T``."""
    res, ok = {}, True
    with _timer() as tm:
        for name in ("mittag-leffler", "stable"):
            table = build_resolvent(make_kernel(name, alpha), Grid(1.0, int(max(T_grid) * M)))
            sups = [check_tightness(table, T, M, alpha).sup_ratio for T in T_grid]
            res[name] = sups
            ok &= all(math.isfinite(s) and s <= bound for s in sups) and max(sups) / min(sups) <= spread
    return Check(
        "tightness",
        res,
        {"bound": bound, "spread": spread},
        spread,
        bool(ok),
        tm.seconds,
        {"alpha": alpha, "eps": alpha, "M": M, "T": list(T_grid)},
    )


ACCEPTANCE = {
    1: check_stable_samplers,
    2: check_resolvent_asymptotics,
    3: check_mean_identity,
    4: check_finite_T_laplace,
    5: check_deterministic_clt,
    6: check_norming_exponent,
    7: check_tail_index,
    8: check_self_similarity,
    9: check_beta_offspring,
    10: check_beta_branching_ratio,
    11: check_tightness_kernels,
}


def run_acceptance(n_jobs: int = 1, which=None) -> Report:
    """Run the acceptance checks (all by default) and collect one record each."""
    which = sorted(ACCEPTANCE) if which is None else sorted(which)
    report = Report(config={"suite": "acceptance", "criteria": which})
    heavy = None
    if 6 in which or 7 in which:
        heavy = heavy_sweep(n_jobs=n_jobs)
    for k in which:
        if k == 6:
            check = check_norming_exponent(heavy=heavy, n_jobs=n_jobs)
        elif k == 7:
            check = check_tail_index(heavy=heavy)
        else:
            check = ACCEPTANCE[k]()
        check.name = f"{k:02d}_{check.name}"
        report.add(check)
    return report


__all__ = [
    "hill_estimator",
    "hill_sensitivity",
    "empirical_laplace",
    "iqr",
    "ExperimentConfig",
    "Check",
    "Report",
    "run_clt_experiment",
    "run_limit_comparison",
    "exponent_sweep",
    "run_acceptance",
    "ACCEPTANCE",
]
