"""Tests for the F-distribution module."""

import math

import pytest
from scipy import stats

from waterway_accidents.core.distributions import f_cdf, f_critical
from waterway_accidents.core.errors import DomainError


class TestFCdf:
    """Test cases for f_cdf."""

    def test_non_positive_x(self):
        """Test that the CDF is zero at and below zero."""
        assert f_cdf(0.0, 3, 10) == 0.0
        assert f_cdf(-1.0, 3, 10) == 0.0

    def test_infinity(self):
        """Test that the CDF is one at infinity."""
        assert f_cdf(math.inf, 3, 10) == 1.0

    @pytest.mark.parametrize(
        "x,df1,df2",
        [(0.5, 1, 1), (1.0, 2, 5), (2.7, 5, 19), (4.0, 3, 20), (10.0, 16, 8)],
    )
    def test_matches_scipy(self, x, df1, df2):
        """Test agreement with scipy's F distribution."""
        assert f_cdf(x, df1, df2) == pytest.approx(stats.f.cdf(x, df1, df2), abs=1e-12)

    def test_invalid_df(self):
        """Test that a non-positive degree of freedom raises DomainError."""
        with pytest.raises(DomainError) as exc_info:
            f_cdf(1.0, 0, 10)

        assert exc_info.value.exit_code == 4


class TestFCritical:
    """Test cases for f_critical."""

    def test_one_one(self):
        """Test the heavy-tailed F(1, 1) quantile."""
        assert f_critical(0.05, 1, 1) == pytest.approx(161.4476, abs=1e-3)

    def test_five_nineteen(self):
        """Test the quantile used for a five-predictor model over 25 years."""
        assert f_critical(0.05, 5, 19) == pytest.approx(2.7401, abs=1e-3)

    @pytest.mark.parametrize("alpha", [0.01, 0.05, 0.10])
    @pytest.mark.parametrize("df1", [1, 2, 5, 16])
    @pytest.mark.parametrize("df2", [1, 3, 8, 19, 100])
    def test_matches_scipy_ppf(self, alpha, df1, df2):
        """Test agreement with scipy's inverse survival function."""
        expected = stats.f.ppf(1 - alpha, df1, df2)

        assert f_critical(alpha, df1, df2) == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("alpha,df1,df2", [(0.05, 4, 20), (0.01, 2, 7), (0.2, 9, 3)])
    def test_cdf_at_quantile(self, alpha, df1, df2):
        """Test that the CDF evaluated at the quantile gives 1 - alpha."""
        assert f_cdf(f_critical(alpha, df1, df2), df1, df2) == pytest.approx(1 - alpha, abs=1e-9)

    def test_decreasing_in_alpha(self):
        """Test that a larger alpha gives a smaller critical value."""
        assert f_critical(0.01, 4, 20) > f_critical(0.05, 4, 20) > f_critical(0.10, 4, 20)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_alpha_out_of_range(self, alpha):
        """Test that alpha outside (0, 1) raises DomainError."""
        with pytest.raises(DomainError):
            f_critical(alpha, 2, 10)

    def test_zero_denominator_df(self):
        """Test that zero residual degrees of freedom raise DomainError."""
        with pytest.raises(DomainError):
            f_critical(0.05, 3, 0)
