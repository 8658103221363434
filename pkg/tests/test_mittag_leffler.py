import math

import numpy as np
import pytest
from scipy.special import erfc

from hawkesclt.mittag_leffler import ASYMPTOTIC_MIN, SERIES_MAX, mittag_leffler

from oracles import ML_03_1_m5, ML_05_05_m1, ML_05_05_m100, ML_07_07_m10p85, ML_09_1_m30


def test_value_at_zero_is_first_series_term():
    assert mittag_leffler(0.5, 0.5, 0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_half_half_against_erfc_identity():
    x = np.linspace(0.0, 5.0, 41)
    expected = 1 / math.sqrt(math.pi) - x * np.exp(x * x) * erfc(x)
    assert np.allclose(mittag_leffler(0.5, 0.5, -x), expected, atol=1e-10)
    assert mittag_leffler(0.5, 0.5, -1.0) == pytest.approx(ML_05_05_m1, abs=1e-12)


def test_large_argument_matches_extended_precision():
    assert mittag_leffler(0.5, 0.5, -100.0) == pytest.approx(ML_05_05_m100, rel=1e-4)


@pytest.mark.parametrize(
    "a, b, z, ref",
    [(0.7, 0.7, -10.85, ML_07_07_m10p85), (0.3, 1.0, -5.0, ML_03_1_m5), (0.9, 1.0, -30.0, ML_09_1_m30)],
)
def test_reference_values_in_each_regime(a, b, z, ref):
    assert mittag_leffler(a, b, z) == pytest.approx(ref, abs=1e-10)


def test_exponential_case():
    z = -np.linspace(0, 30, 13)
    assert np.allclose(mittag_leffler(1.0, 1.0, z), np.exp(z), atol=1e-10)


@pytest.mark.parametrize("a", [0.3, 0.5, 0.8])
def test_continuity_across_regime_switches(a):
    for x in (SERIES_MAX, ASYMPTOTIC_MIN):
        z = -(x**a)
        lo, hi = mittag_leffler(a, 1.0, z * (1 - 1e-9)), mittag_leffler(a, 1.0, z * (1 + 1e-9))
        assert abs(lo - hi) < 1e-9


def test_array_shape_is_preserved():
    z = -np.arange(6.0).reshape(2, 3)
    assert mittag_leffler(0.5, 1.0, z).shape == (2, 3)


@pytest.mark.parametrize("a, b, z", [(0.0, 1.0, -1.0), (1.5, 1.0, -1.0), (0.5, 0.0, -1.0), (0.5, 1.0, 1.0), (0.5, 1.0, -np.inf)])
def test_out_of_range_rejected(a, b, z):
    with pytest.raises(ValueError):
        mittag_leffler(a, b, z)
