import math

import numpy as np
import pytest

from hawkesclt.kernels import MittagLeffler, ParetoTail, StableDensity, lattice_masses
from hawkesclt.marks import DiracOne, ExponentialMean1, ParetoMean1
from hawkesclt.renewal import (
    Grid,
    StepFunction,
    build_resolvent,
    check_tightness,
    exact_mean_N,
    g_alpha,
    limit_exponent,
    renewal_recursion,
    scaled_w_integral,
    solve_g,
)
from hawkesclt.simulator import PoissonOfMark, simulate_counts
from hawkesclt.stable import LimitModel

from oracles import C_ALPHA_05, HEAVY_TARGET_03_06


@pytest.fixture(scope="module")
def pareto_table():
    return build_resolvent(ParetoTail(0.5), Grid(0.05, 20_000))


def test_degenerate_geometric_resolvent():
    q = 0.3
    r = renewal_recursion(np.array([q, 0.0, 0.0]))
    assert r[0] == pytest.approx(q / (1 - q))
    assert np.all(r[1:] == 0)


def test_grid_too_coarse_rejected():
    with pytest.raises(ValueError, match="too coarse"):
        renewal_recursion(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        Grid(0.0, 10)


def test_resolvent_invariants(pareto_table):
    t = pareto_table
    assert t.criticality_defect < 1e-8
    assert t.renewal_residual() < 1e-8
    assert t.I_R[0] == 0.0
    assert np.all(np.diff(t.I_R) >= 0)


def test_c_alpha_estimate_at_1e4():
    t = build_resolvent(ParetoTail(0.5), Grid(0.5, 20_000))
    assert t.c_alpha == pytest.approx(C_ALPHA_05, rel=1e-14)
    assert t.c_alpha_estimate == pytest.approx(C_ALPHA_05, rel=0.05)


def test_mittag_leffler_resolvent_slope():
    t = build_resolvent(MittagLeffler(0.5), Grid(0.1, 10_000))
    assert t.resolvent_slope() == pytest.approx(-0.5, abs=0.05)


def test_resolvent_csv_rows(pareto_table):
    rows = list(pareto_table.to_csv_rows())
    assert len(rows) == pareto_table.grid.n + 1
    assert rows[0][0] == 0 and rows[0][4] == 0.0


def test_exact_mean(pareto_table):
    assert exact_mean_N(pareto_table, 1.0, 0.0) == 0.0
    u = 1e3
    approx = u + C_ALPHA_05 * u**1.5 / 1.5
    assert exact_mean_N(pareto_table, 1.0, u) == pytest.approx(approx, rel=0.05)
    assert exact_mean_N(pareto_table, 2.0, u) == pytest.approx(2 * exact_mean_N(pareto_table, 1.0, u))
    with pytest.raises(ValueError):
        exact_mean_N(pareto_table, 1.0, 2e3)


def test_exact_mean_matches_monte_carlo():
    k = ParetoTail(0.5)
    table = build_resolvent(k, Grid(0.01, 2000))
    n = simulate_counts(1.0, [5.0, 20.0], k, DiracOne(), PoissonOfMark(), 20_000, seed=41)
    for j, u in enumerate((5.0, 20.0)):
        col = n[:, j]
        assert abs(col.mean() - exact_mean_N(table, 1.0, u)) < 4 * col.std() / math.sqrt(col.size)


def test_tightness_report():
    table = build_resolvent(MittagLeffler(0.5), Grid(0.5, 2000))
    rep = check_tightness(table, 100.0, 2.0, 0.5, n_points=100)
    assert np.isfinite(rep.sup_ratio) and rep.sup_ratio > 0
    assert rep.argmax[0] < rep.argmax[1]
    with pytest.raises(ValueError):
        check_tightness(table, 1e4, 2.0, 0.5)
    with pytest.raises(ValueError):
        check_tightness(table, 100.0, 2.0, 0.6)


def test_g_alpha_examples():
    f = StepFunction.indicator(1.0)
    assert g_alpha(f, 0.0, 0.5) == pytest.approx(2.0)
    assert g_alpha(f, 2.0, 0.5) == 0.0
    assert g_alpha(f, 0.5, 0.5) == pytest.approx(math.sqrt(0.5) / 0.5)


def test_g_alpha_quadrature_matches_closed_form():
    class Smooth:
        gamma = 2.0

        def __call__(self, s):
            return 1.0 / (1.0 + s) ** 2

    # int_0^inf (1+t+s)^-2 s^(-1/2) ds = pi / (2 (1+t)^(3/2))
    for t in (0.0, 0.7, 3.0):
        assert g_alpha(Smooth(), t, 0.5) == pytest.approx(math.pi / 2 / (1 + t) ** 1.5, rel=1e-7)
    with pytest.raises(ValueError):
        g_alpha(lambda s: 1.0 / (1 + s) ** 0.2, 0.0, 0.5, gamma=0.2)


def test_step_function_representations():
    f = StepFunction.from_indicators([1.0, 2.0], [2.0, 1.0])
    assert f(0.5) == 3.0 and f(1.5) == 1.0 and f(2.5) == 0.0
    coefs, ends = f.as_indicators()
    assert np.allclose(coefs, [2.0, 1.0]) and np.allclose(ends, [1.0, 2.0])
    g = f.scaled(10.0, 4.0)
    assert g.support == 20.0 and g(5.0) == 0.75
    cells = f.cell_averages(Grid(0.75, 4))
    assert np.allclose(cells, [3.0, (0.25 * 3 + 0.5 * 1) / 0.75, 0.5 / 0.75, 0.0])
    assert g_alpha(f, 0.0, 0.5) == pytest.approx(2 * 2.0 + 1.0 * 2 * math.sqrt(2.0))


def test_limit_exponent_closed_form_and_quadrature_agree():
    f1 = StepFunction.indicator(1.0)
    f2 = StepFunction(np.array([0.0, 0.5, 1.0]), np.array([1.0, 1.0]))  # same function, two pieces
    a, p = 0.3, 1.6
    assert limit_exponent(f2, a, p) == pytest.approx(limit_exponent(f1, a, p), rel=1e-7)
    m = LimitModel(0.3, 0.6, 1.0, 1.0)
    assert limit_exponent(f1, a, p) == pytest.approx(m.indicator_exponent(1.0), rel=1e-14)


def test_solver_zero_input():
    s = solve_g(StepFunction.zero(5.0), ParetoTail(0.5), DiracOne(), Grid(0.01, 500))
    assert np.all(s.g == 0) and np.all(s.h == 0) and np.all(s.w == 0)
    assert scaled_w_integral(StepFunction.zero(), ParetoTail(0.3), ParetoMean1(0.6), 1e3, 100.0) == 0.0


@pytest.mark.parametrize(
    "kernel, marks",
    [(ParetoTail(0.5), DiracOne()), (ParetoTail(0.3), ParetoMean1(0.6)), (StableDensity(0.5), ExponentialMean1())],
)
@pytest.mark.parametrize("c", [0.05, 1.0, 20.0])
def test_solver_order_and_renewal_invariants(kernel, marks, c):
    grid = Grid(0.02, 1000)
    f = StepFunction(np.array([0.0, 3.0, 8.0, 14.0]), np.array([c, 0.0, 2 * c]))
    s = solve_g(f, kernel, marks, grid)
    tol = 1e-12 * max(1.0, s.h.max())
    assert np.all(s.g >= -tol)
    assert np.all(s.g <= s.h + tol)
    assert np.all(s.w >= -tol) and np.all(s.w <= s.h + tol)
    assert np.all(s.g[grid.midpoints > 14.0] == 0)
    q = lattice_masses(kernel, grid.dt, grid.n)
    assert s.renewal_residual(q) <= 1e-6 * s.h.max()


def test_solver_rejects_bad_inputs():
    grid = Grid(0.1, 10)
    with pytest.raises(ValueError):
        solve_g(StepFunction.indicator(1.0, -1.0), ParetoTail(0.5), DiracOne(), grid)
    with pytest.raises(ValueError):
        solve_g(StepFunction.indicator(2.0), ParetoTail(0.5), DiracOne(), grid)


def test_solver_exact_mean_matches_resolvent(pareto_table):
    u = 50.0
    s = solve_g(StepFunction.indicator(u, 1e-9), ParetoTail(0.5), DiracOne(), Grid(0.05, 1000))
    assert s.exact_mean / 1e-9 == pytest.approx(exact_mean_N(pareto_table, 1.0, u), rel=2e-3)


def test_solver_matches_monte_carlo_laplace():
    k, c, a = ParetoTail(0.5), 0.3, 5.0
    s = solve_g(StepFunction.indicator(a, c), k, DiracOne(), Grid(0.005, 1000))
    n = simulate_counts(1.0, [a], k, DiracOne(), PoissonOfMark(), 40_000, seed=42)[:, 0]
    v = np.exp(-c * n)
    assert abs(v.mean() - s.laplace) < 3 * v.std() / math.sqrt(v.size)


def test_solver_grid_convergence():
    model = LimitModel(0.3, 0.6, 1.0, ParetoMean1(0.6).h_coef)
    T = 1e3
    vals = [
        scaled_w_integral(StepFunction.indicator(1.0), ParetoTail(0.3), ParetoMean1(0.6), T, model.norming(T), n)
        for n in (4000, 8000)
    ]
    assert abs(vals[0] / vals[1] - 1) < 0.01


def test_scaled_w_integral_errors_decrease_in_T():
    f = StepFunction.indicator(1.0)
    model = LimitModel(0.3, 0.6, 1.0, ParetoMean1(0.6).h_coef)
    errs = [
        abs(scaled_w_integral(f, ParetoTail(0.3), ParetoMean1(0.6), T, model.norming(T), 4000) / HEAVY_TARGET_03_06 - 1)
        for T in (1e2, 1e3, 1e4)
    ]
    assert errs[0] > errs[1] > errs[2]
