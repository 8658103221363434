"""Recompute the frozen oracle values in ``tests/oracles.py`` with mpmath.

Nothing here imports the package: every value comes from a definition
evaluated at 50 digits.

    python tools/make_oracles.py
"""

import mpmath as mp

mp.mp.dps = 50


def ml(a, b, z, terms=4000):
    """Mittag-Leffler series at extended precision."""
    with mp.workdps(int(abs(z) ** (1 / a) / 2.3) + 60):
        a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(z)
        return mp.nsum(lambda k: z**k / mp.gamma(b + a * k), [0, mp.inf]) if abs(z) < 1 else mp.fsum(
            z**k / mp.gamma(b + a * k) for k in range(terms)
        )


def ml_half(x):
    """E_{1/2,1/2}(-x) = 1/sqrt(pi) - x exp(x^2) erfc(x)."""
    x = mp.mpf(x)
    return 1 / mp.sqrt(mp.pi) - x * mp.exp(x * x) * mp.erfc(x)


def pareto_laplace(beta, z):
    xm = mp.mpf(beta) / (1 + beta)
    p = 1 + mp.mpf(beta)
    return mp.quad(lambda u: mp.exp(-u * z) * p * xm**p * u ** (-p - 1), [xm, 1, 10, mp.inf])


def pareto_H(beta, x):
    xm = mp.mpf(beta) / (1 + beta)
    p = 1 + mp.mpf(beta)
    return mp.quad(lambda u: (mp.expm1(-u * x) + u * x) * p * xm**p * u ** (-p - 1), [xm, 1, 10, 100, mp.inf])


def c_alpha(a):
    return 1 / (mp.gamma(1 + a) * mp.gamma(1 - a))


def heavy_target(a, b, mu=1):
    xm = mp.mpf(b) / (1 + b)
    cnu = xm ** (1 + b)
    K = cnu / b * mp.gamma(1 - b) * c_alpha(a) ** (2 + b) * a ** (1 + b)
    return mu * K * a ** (-(1 + b)) * mp.beta(a + 1, a * (1 + b) + 1), K


def ml_tail(a, theta, t):
    return ml(a, 1, -theta * mp.mpf(t) ** a)


def ml_density(a, theta, t):
    return theta * mp.mpf(t) ** (a - 1) * ml(a, a, -theta * mp.mpf(t) ** a)


def levy_half_tail(t):
    # P(X > t) for E exp(-lam X) = exp(-sqrt(lam)): X = 1/(4 Z^2) with Z standard normal
    return mp.erf(1 / (2 * mp.sqrt(t)))


if __name__ == "__main__":
    vals = {
        "ML_05_05_m1": ml(0.5, 0.5, -1),
        "ML_05_05_m100": ml_half(100),
        "ML_05_05_m1_erfc": ml_half(1),
        "ML_07_07_m10p85": ml(0.7, 0.7, -10.85),
        "ML_03_1_m5": ml(0.3, 1, -5),
        "ML_09_1_m30": ml(0.9, 1, -30),
        "PARETO_LAPLACE_06_1": pareto_laplace(0.6, 1),
        "PARETO_H_06_X0p1": pareto_H(0.6, mp.mpf("0.1")),
        "PARETO_H_06_X0p001": pareto_H(0.6, mp.mpf("0.001")),
        "PARETO_H_06_2": pareto_H(0.6, 2),
        "C_ALPHA_05": c_alpha(mp.mpf("0.5")),
        "C_ALPHA_03": c_alpha(mp.mpf("0.3")),
        "HEAVY_TARGET_03_06": heavy_target(mp.mpf("0.3"), mp.mpf("0.6"))[0],
        "HEAVY_K_03_06": heavy_target(mp.mpf("0.3"), mp.mpf("0.6"))[1],
        "ML_TAIL_05_1_at_3": ml_tail(0.5, 1, 3),
        "ML_DENSITY_05_1_at_3": ml_density(0.5, 1, 3),
        "ML_TAIL_07_2_at_0p5": ml_tail(0.7, 2, 0.5),
        "LEVY_TAIL_at_2": levy_half_tail(2),
        "LEVY_DENSITY_at_1": 1 / (2 * mp.sqrt(mp.pi)) * mp.exp(-mp.mpf(1) / 4),
    }
    for k, v in vals.items():
        print(f"{k} = {mp.nstr(v, 17)}")
