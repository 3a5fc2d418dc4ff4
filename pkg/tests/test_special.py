import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfbm_asian.special import TruncationPolicy, normal_cdf, poisson_weights

mpmath.mp.dps = 40


def _phi_ref(x):
    return float(mpmath.ncdf(mpmath.mpf(x)))


class TestNormalCdf:
    def test_center(self):
        assert normal_cdf(0.0) == 0.5

    def test_known_value(self):
        assert normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-16)
        assert _phi_ref(1.0) == pytest.approx(0.8413447460685429, abs=1e-16)

    @pytest.mark.parametrize("x", [-37.5, -20.0, -8.3, -6.01, -3.0, -1e-3, 0.7, 2.5, 6.5, 9.0, 30.0])
    def test_against_high_precision(self, x):
        assert abs(normal_cdf(x) - _phi_ref(x)) <= 1e-15

    def test_lower_tail_relative_accuracy(self):
        for x in (-10.0, -20.0, -35.0):
            assert normal_cdf(x) == pytest.approx(_phi_ref(x), rel=1e-13)

    def test_infinities(self):
        assert normal_cdf(math.inf) == 1.0
        assert normal_cdf(-math.inf) == 0.0

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            normal_cdf(math.nan)
        with pytest.raises(ValueError):
            normal_cdf(np.array([0.0, np.nan]))

    @given(st.floats(-40, 40))
    def test_reflection(self, x):
        p = normal_cdf(x)
        assert abs(p + normal_cdf(-x) - 1.0) <= 2e-16

    def test_monotone_on_grid(self):
        grid = np.linspace(-40, 40, 20001)
        assert np.all(np.diff(normal_cdf(grid)) >= 0)


def _tail_by_recurrence(n, mean):
    """P(N > n) from the pmf recurrence in 60-digit arithmetic."""
    with mpmath.workdps(60):
        mean = mpmath.mpf(mean)
        p = mpmath.exp(-mean)
        total = p
        for k in range(1, n + 1):
            p = p * mean / k
            total += p
        return float(1 - total)


class TestPoissonWeights:
    def test_degenerate(self):
        w, tail = poisson_weights(0.0)
        assert list(w) == [1.0]
        assert tail == 0.0

    def test_two(self):
        w, _ = poisson_weights(2.0)
        assert w[2] == pytest.approx(2 * math.exp(-2), rel=1e-14)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            poisson_weights(-0.1)

    def test_large_mean_cutoff_matches_recurrence(self):
        w, tail = poisson_weights(50.0)
        n = len(w) - 1
        assert tail <= 1e-12
        assert _tail_by_recurrence(n, 50.0) <= 1e-12
        # one fewer term would not have met the tolerance
        assert _tail_by_recurrence(n - 1, 50.0) > 1e-12
        assert tail == pytest.approx(_tail_by_recurrence(n, 50.0), rel=1e-6)

    @pytest.mark.parametrize("lt", [1e-12, 0.3, 0.5, 2.0, 7.5, 50.0, 200.0])
    def test_mass_identity(self, lt):
        w, tail = poisson_weights(lt)
        assert abs(math.fsum(w) + tail - 1.0) <= 1e-14
        assert tail <= 1e-12

    @given(st.floats(0.01, 120.0))
    @settings(max_examples=60)
    def test_unimodal_nonnegative(self, lt):
        w, _ = poisson_weights(lt)
        assert np.all(w >= 0)
        mode = int(np.argmax(w))
        assert mode in (math.floor(lt), math.ceil(lt) - 1)
        assert np.all(np.diff(w[: mode + 1]) >= 0)
        assert np.all(np.diff(w[mode:]) <= 0)

    @given(st.floats(0.01, 80.0))
    @settings(max_examples=40)
    def test_tighter_tolerance_only_extends(self, lt):
        w1, _ = poisson_weights(lt, TruncationPolicy(mass_tol=1e-8))
        w2, _ = poisson_weights(lt, TruncationPolicy(mass_tol=0.5e-8))
        assert len(w2) >= len(w1)
        assert np.array_equal(w2[: len(w1)], w1)

    def test_cap(self):
        w, tail = poisson_weights(300.0, TruncationPolicy(n_cap=100))
        assert len(w) == 101
        assert tail > 0.99

    @pytest.mark.parametrize("kw", [{"mass_tol": 0}, {"term_tol": -1}, {"n_cap": 0}])
    def test_policy_validation(self, kw):
        with pytest.raises(ValueError):
            TruncationPolicy(**kw)
