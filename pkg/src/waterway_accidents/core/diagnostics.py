"""
Model-development gate computations.

VIF multicollinearity screening, Multiple-R relevancy checks with scatter
data, residual analysis with a sign-runs randomness screen, and the F
critical value used by the F gate.
"""

import math
from collections.abc import Sequence

import numpy as np

from waterway_accidents.core.distributions import f_cdf, f_critical
from waterway_accidents.core.errors import ConsistencyError, UndefinedCorrelationError
from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import (
    CauseYearMatrix,
    FitResult,
    RelevancyEntry,
    RelevancyReport,
    ResidualAnalysis,
    RunsSummary,
    SeriesPoint,
    VifReport,
)
from waterway_accidents.core.ols import variance_inflation

__all__ = [
    "VIF_THRESHOLD",
    "f_cdf",
    "f_critical",
    "multiple_r",
    "relevancy",
    "residual_analysis",
    "runs_screen",
    "vif",
]

logger = get_logger("diagnostics")

VIF_THRESHOLD = 5.0
RUNS_Z_LIMIT = 2.0
_RESIDUAL_TOLERANCE = 1e-9


def vif(
    matrix: CauseYearMatrix,
    labels: Sequence[str],
    threshold: float = VIF_THRESHOLD,
) -> VifReport:
    """Compute VIF for each label and flag those at or above ``threshold``.

    Args:
        matrix: Yearly predictor counts.
        labels: Predictor subset to screen.
        threshold: Flag level; predictors at or above it are dropped by selection.

    Returns:
        VIF per label with the flagged labels.
    """
    report = VifReport.from_values(variance_inflation(matrix, labels), threshold)
    for label in report.flagged:
        logger.warning("VIF at or above threshold", predictor=label, vif=report.values[label])
    return report


def multiple_r(matrix: CauseYearMatrix, label: str) -> RelevancyEntry:
    """Correlate one predictor with the response.

    Args:
        matrix: Yearly predictor counts and response.
        label: Predictor to check.

    Returns:
        Pearson correlation, simple-regression slope and its sign, and the
        (predictor, response) scatter series in year order.

    Raises:
        ConsistencyError: If the matrix has fewer than 3 years.
        UndefinedCorrelationError: If the predictor (or response) is constant.
    """
    if matrix.n_years < 3:
        raise ConsistencyError("multiple R needs at least 3 years")
    x = matrix.column(label)
    y = matrix.response_vector()
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0:
        raise UndefinedCorrelationError(f"predictor '{label}' is constant")
    if syy == 0.0:
        raise UndefinedCorrelationError("response is constant")

    r = float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))
    slope = float(dx @ dy) / sxx
    sign = int(np.sign(r))
    if sign <= 0:
        logger.warning("Non-positive relationship with response", predictor=label, r=r)
    return RelevancyEntry(
        label=label,
        multiple_r=r,
        slope=slope,
        slope_sign=sign,
        scatter=[
            SeriesPoint(x=float(xi), y=float(yi), year=year)
            for xi, yi, year in zip(x, y, matrix.years, strict=True)
        ],
    )


def relevancy(matrix: CauseYearMatrix, labels: Sequence[str]) -> RelevancyReport:
    """Run ``multiple_r`` over ``labels``; constant predictors are listed as undefined."""
    entries: list[RelevancyEntry] = []
    undefined: list[str] = []
    for label in labels:
        try:
            entries.append(multiple_r(matrix, label))
        except UndefinedCorrelationError:
            logger.warning("Correlation undefined", predictor=label)
            undefined.append(label)
    return RelevancyReport(entries=entries, undefined=undefined)


def runs_screen(residuals: Sequence[float], scale: float = 1.0) -> RunsSummary:
    """Screen the residual sign sequence for non-random structure.

    Residuals within ``1e-9 * scale`` of zero carry no sign and are skipped.
    The run count is compared with its expectation for random signs; the
    screen passes when ``|z| < 2``. Too many runs (alternation) gives a large
    positive z, too few (clustering) a large negative one.
    """
    tolerance = _RESIDUAL_TOLERANCE * max(1.0, scale)
    signs = [value > 0 for value in residuals if abs(value) > tolerance]
    n_zero = len(residuals) - len(signs)
    n1 = sum(signs)
    n2 = len(signs) - n1
    runs = 1 + sum(a != b for a, b in zip(signs, signs[1:], strict=False)) if signs else 0

    if n1 == 0 or n2 == 0:
        return RunsSummary(
            n_positive=n1, n_negative=n2, n_zero=n_zero, runs=runs, degenerate=True
        )

    n = n1 + n2
    expected = 2.0 * n1 * n2 / n + 1.0
    variance = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n**2 * (n - 1))
    if variance <= 0:
        return RunsSummary(
            n_positive=n1,
            n_negative=n2,
            n_zero=n_zero,
            runs=runs,
            expected_runs=expected,
            degenerate=True,
        )
    z = (runs - expected) / math.sqrt(variance)
    return RunsSummary(
        n_positive=n1,
        n_negative=n2,
        n_zero=n_zero,
        runs=runs,
        expected_runs=expected,
        z_score=z,
        passed=abs(z) < RUNS_Z_LIMIT,
    )


def residual_analysis(fit: FitResult, matrix: CauseYearMatrix) -> ResidualAnalysis:
    """Build residual-vs-fitted and residual-vs-predictor series for a fit.

    Raises:
        ConsistencyError: If ``fit`` was not produced from ``matrix``.
    """
    if fit.years != matrix.years:
        raise ConsistencyError("fit years do not match the matrix")
    missing = [label for label in fit.spec.predictor_labels if label not in matrix.columns]
    if missing:
        raise ConsistencyError(f"fit uses predictors missing from the matrix: {missing}")
    y = matrix.response_vector()
    if not np.allclose(np.add(fit.fitted, fit.residuals), y, rtol=1e-9, atol=1e-9):
        raise ConsistencyError("fit residuals do not reproduce the matrix response")

    by_fitted = [
        SeriesPoint(x=fitted, y=residual, year=year)
        for fitted, residual, year in zip(fit.fitted, fit.residuals, fit.years, strict=True)
    ]
    by_predictor = {
        label: [
            SeriesPoint(x=float(x), y=residual, year=year)
            for x, residual, year in zip(
                matrix.column(label), fit.residuals, fit.years, strict=True
            )
        ]
        for label in fit.spec.predictor_labels
    }
    summary = runs_screen(fit.residuals, scale=float(np.max(np.abs(y))) if y.size else 1.0)
    if summary.degenerate:
        logger.info("Residual pattern is degenerate", model=fit.spec.name)
    elif not summary.passed:
        logger.warning("Residual signs show structure", model=fit.spec.name, z=summary.z_score)
    return ResidualAnalysis(
        spec=fit.spec,
        residual_vs_fitted=by_fitted,
        residual_vs_predictor=by_predictor,
        runs=summary,
    )
