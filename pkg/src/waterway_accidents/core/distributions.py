"""
F-distribution CDF and upper quantiles.

The CDF is expressed through the regularized incomplete beta function; the
quantile is found by bracketed bisection on that CDF.
"""

import math
from functools import lru_cache

from scipy import optimize, special

from waterway_accidents.core.errors import DomainError

QUANTILE_XTOL = 1e-12
MAX_BISECTIONS = 200


def _check_df(df1: float, df2: float) -> None:
    if not (df1 > 0 and df2 > 0) or not (math.isfinite(df1) and math.isfinite(df2)):
        raise DomainError(f"degrees of freedom must be positive, got ({df1}, {df2})")


def f_cdf(x: float, df1: float, df2: float) -> float:
    """Return P(F <= x) for F ~ F(df1, df2).

    Args:
        x: Evaluation point; values <= 0 give 0.
        df1: Numerator degrees of freedom.
        df2: Denominator degrees of freedom.

    Raises:
        DomainError: If a degree of freedom is not positive.
    """
    _check_df(df1, df2)
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return float(special.betainc(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2)))


@lru_cache(maxsize=1024)
def f_critical(alpha: float, df1: int, df2: int) -> float:
    """Return the upper-``alpha`` quantile of F(df1, df2).

    Solves ``f_cdf(q) = 1 - alpha`` by bisection on a bracket grown by
    doubling from 1.

    Args:
        alpha: Significance level in (0, 1).
        df1: Numerator degrees of freedom (k).
        df2: Denominator degrees of freedom (n - k - 1).

    Returns:
        The critical value q.

    Raises:
        DomainError: If alpha is outside (0, 1) or a df is not positive.

    Example:
        >>> round(f_critical(0.05, 5, 19), 2)
        2.74
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    _check_df(df1, df2)

    target = 1.0 - alpha
    upper = 1.0
    while f_cdf(upper, df1, df2) < target:
        upper *= 2.0
        if upper > 1e300:
            raise DomainError(f"cannot bracket the F quantile for ({alpha}, {df1}, {df2})")

    return float(
        optimize.bisect(
            lambda q: f_cdf(q, df1, df2) - target,
            0.0,
            upper,
            xtol=QUANTILE_XTOL,
            maxiter=MAX_BISECTIONS,
        )
    )
