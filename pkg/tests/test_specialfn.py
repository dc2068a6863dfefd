import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_gap import specialfn as sf
from spectral_gap.specialfn import BesselKind, BesselOrder, BesselZeroIndex

# Frozen with mpmath at 40 digits: bisection on the ascending power series.
J01 = 2.4048255576957727686
J11 = 3.8317059702075123156
J02 = 5.5200781102863106496

# Frozen with mpmath besselj/bessely at 40 digits.
JY_REFERENCE = [
    (0.3, 1.0, 0.74022247928102045347, -0.24570419535649944185),
    (0.7, 0.01, 0.026970026342462419058, -16.878452285512892824),
    (2.5, 7.3, -0.30084943158749980838, 0.043400899825479541462),
    (12.0, 20.0, -0.11899062431039906511, -0.15975239491660578726),
    (0.0, 40.0, 0.0073668905842372895535, 0.12593641705826092925),
    (3.999999, 3.0, 0.13203431589859366788, -0.91668230752175816591),
]


def test_gamma_examples():
    assert sf.gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert sf.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert sf.gamma(5.0) == pytest.approx(24.0, rel=1e-13)


def test_gamma_against_math():
    for x in np.linspace(0.05, 50, 300):
        assert sf.gamma(float(x)) == pytest.approx(math.gamma(x), rel=1e-13)


def test_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        sf.gamma(0.0)
    with pytest.raises(ValueError):
        sf.gamma(-1.5)


def test_order_validation():
    with pytest.raises(ValueError):
        BesselOrder(-0.5)
    assert BesselOrder(3.0 + 1e-9).near_integer
    assert not BesselOrder(0.5).near_integer
    with pytest.raises(ValueError):
        BesselZeroIndex(BesselOrder(1.0), 0)


def test_j_small_argument_limit():
    assert sf.bessel_j(0.0, 0.0) == 1.0
    assert sf.bessel_j(0.0, 1e-12) == pytest.approx(1.0, abs=1e-15)
    assert sf.bessel_j(2.0, 0.0) == 0.0


def test_half_order_closed_forms():
    assert sf.bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-12)
    assert abs(sf.bessel_y(0.5, math.pi / 2)) < 1e-12
    assert sf.bessel_y(0.5, math.pi) == pytest.approx(math.sqrt(2) / math.pi, rel=1e-12)


def test_j0_vanishes_at_first_zero():
    assert abs(sf.bessel_j(0.0, 2.404825557695773)) < 1e-10


def test_y_blows_up_negative():
    y = sf.bessel_y(0.7, 0.01)
    assert y < 0 and abs(y) > 10


def test_y_requires_positive_argument():
    with pytest.raises(ValueError):
        sf.bessel_y(1.0, 0.0)


def test_j0_prime_small_x():
    assert sf.bessel_j_prime(0.0, 1e-4) == pytest.approx(-5e-5, abs=1e-12)


@pytest.mark.parametrize("alpha,x,j,y", JY_REFERENCE)
def test_values_against_high_precision(alpha, x, j, y):
    assert sf.bessel_j(alpha, x) == pytest.approx(j, rel=1e-10)
    assert sf.bessel_y(alpha, x) == pytest.approx(y, rel=1e-9)


def test_wronskian_example():
    a, x = 0.3, 1.0
    w = sf.bessel_j(a, x) * sf.bessel_y_prime(a, x) - sf.bessel_j_prime(a, x) * sf.bessel_y(a, x)
    assert w == pytest.approx(2 / math.pi, rel=1e-10)


def test_wronskian_random_points():
    rng = np.random.default_rng(7)
    for a, x in zip(rng.uniform(0, 8, 200), rng.uniform(0.1, 40, 200)):
        j, jp, y, yp = sf.bessel_jy(a, x)
        ref = 2 / (math.pi * x)
        assert abs(j * yp - jp * y - ref) <= 1e-8 * (1 + ref)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 12), st.floats(1e-3, 60))
def test_wronskian_property(a, x):
    j, jp, y, yp = sf.bessel_jy(a, x)
    ref = 2 / (math.pi * x)
    assert abs(j * yp - jp * y - ref) <= 1e-8 * (1 + ref)


@pytest.mark.parametrize("alpha", [0.0, 0.4, 1.0, 2.5, 7.0, 11.9])
def test_seam_agreement(alpha):
    for x in (sf.SERIES_CROSSOVER * 0.999, sf.SERIES_CROSSOVER * 1.001):
        lo = sf.bessel_j(alpha, x, crossover=100.0)
        hi = sf.bessel_j(alpha, x, crossover=1.0)
        assert abs(lo - hi) <= 1e-9
        lo = sf.bessel_y(alpha, x, crossover=100.0)
        hi = sf.bessel_y(alpha, x, crossover=1.0)
        assert abs(lo - hi) <= 1e-9 * max(1.0, abs(lo))


def test_near_integer_orders_are_continuous():
    for n in (1, 2, 5):
        for x in (0.3, 3.0, 9.0):
            a = sf.bessel_y(n, x)
            for d in (-1e-6, -3e-9, 3e-9, 1e-6):
                assert sf.bessel_y(n + d, x) == pytest.approx(a, rel=1e-5, abs=1e-9)


def test_recurrence_relation():
    x = np.linspace(0.5, 50, 97)
    a = 3.3
    lhs = sf.bessel_j(a - 1, x) + sf.bessel_j(a + 1, x)
    np.testing.assert_allclose(lhs, 2 * a / x * sf.bessel_j(a, x), atol=1e-11)
    lhs = sf.bessel_y(a - 1, x) + sf.bessel_y(a + 1, x)
    np.testing.assert_allclose(lhs, 2 * a / x * sf.bessel_y(a, x), rtol=1e-9, atol=1e-11)


def test_zero_examples():
    assert sf.bessel_zero(0.0, 1) == pytest.approx(J01, abs=1e-10)
    assert sf.bessel_zero(1.0, 1) == pytest.approx(J11, abs=1e-10)
    assert sf.bessel_zero(0.0, 2) == pytest.approx(J02, abs=1e-10)
    idx = BesselZeroIndex(BesselOrder(0.5), 3)
    assert sf.bessel_zero(idx) == pytest.approx(3 * math.pi, abs=1e-10)


def test_half_order_zeros():
    for k in range(1, 21):
        assert abs(sf.bessel_zero(0.5, k) - k * math.pi) <= 1e-10


def test_second_kind_zero():
    z = sf.bessel_zero(0.0, 1, BesselKind.SECOND)
    assert abs(sf.bessel_y(0.0, z)) < 1e-12
    assert z == pytest.approx(0.8935769662791675, abs=1e-12)


def test_zero_monotone_and_interlacing():
    alphas = np.round(np.arange(0, 5.0001, 0.1), 10)
    table = {(a, k): sf.bessel_zero(a, k) for a in alphas for k in (1, 2, 3, 4)}
    for k in (1, 2, 3):
        col = [table[(a, k)] for a in alphas]
        assert all(b > a for a, b in zip(col, col[1:]))
        for a in alphas:
            up = sf.bessel_zero(a + 1, k)
            assert table[(a, k)] < up < table[(a, k + 1)]


def test_sign_alternates_across_zero():
    for a in (0.0, 0.7, 3.0):
        for k in (1, 2, 3):
            z = sf.bessel_zero(a, k)
            left, right = sf.bessel_j(a, z - 1e-6), sf.bessel_j(a, z + 1e-6)
            assert left * right < 0


def test_large_order_zero():
    # mpmath besseljzero(100, 1)
    assert sf.bessel_zero(100.0, 1) == pytest.approx(108.836165898409774, rel=1e-12)
