"""
Multiple linear regression by least squares.

Fits ``y = b0 + b1*x1 + ... + bk*xk`` through the normal equations
``(X'X) b = X'y`` and computes the fit statistics used for model selection:
R², adjusted R², standard error, MSE, F with its critical value, Mallows' Cp
and per-predictor VIF.
"""

import math
from collections.abc import Mapping, Sequence

import numpy as np

from waterway_accidents.core.distributions import f_critical
from waterway_accidents.core.errors import (
    CollinearityError,
    ConsistencyError,
    DegenerateResponseError,
    EmptyInputError,
    InsufficientDataError,
)
from waterway_accidents.core.linalg import SingularSystemError, matmul, solve_linear_system
from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import (
    Cause,
    CauseYearMatrix,
    FitResult,
    HoldoutEntry,
    HoldoutReport,
    LinearModel,
    ModelSpec,
    symbol,
)

logger = get_logger("ols")

INTERCEPT = "intercept"

# Term order of the published best-fit equation.
EQUATION_ORDER: tuple[str, ...] = (
    Cause.COLLISION,
    Cause.STORMY_WEATHER,
    Cause.GROUNDING,
    Cause.OVERLOADING,
    Cause.EXCESSIVE_CURRENT,
)

_ZERO_TOLERANCE = 1e-12


def adjusted_r2(r2: float, n: int, k: int) -> float:
    """Return ``1 - (1 - r2)(n - 1)/(n - k - 1)``."""
    return 1.0 - (1.0 - r2) * (n - 1) / (n - k - 1)


def f_statistic(ssr: float, sse: float, n: int, k: int) -> float:
    """Return ``(ssr/k) / (sse/(n - k - 1))``; infinite for a perfect fit."""
    mse = sse / (n - k - 1)
    if mse == 0.0:
        return math.inf
    return (ssr / k) / mse


def f_statistic_from_r2(r2: float, n: int, k: int) -> float:
    """Return F written in terms of R² (``SST`` cancels)."""
    return f_statistic(r2, 1.0 - r2, n, k)


def mallows_cp(sse: float, full_model_mse: float, n: int, k: int) -> float:
    """Return ``sse/full_model_mse + 2(k + 1) - n``."""
    return sse / full_model_mse + 2 * (k + 1) - n


def vif_from_r2(r2: float) -> float:
    """Return ``1/(1 - r2)``; infinite once the auxiliary fit is exact."""
    if r2 >= 1.0:
        return math.inf
    return 1.0 / (1.0 - r2)


def _check_labels(matrix: CauseYearMatrix, labels: Sequence[str]) -> None:
    unknown = [label for label in labels if label not in matrix.columns]
    if unknown:
        raise ConsistencyError(f"unknown predictors {unknown}; matrix has {matrix.columns}")


def fit(
    matrix: CauseYearMatrix,
    spec: ModelSpec,
    full_model_mse: float | None = None,
    alpha: float = 0.05,
    compute_vif: bool = True,
) -> FitResult:
    """Fit the model ``spec`` on ``matrix`` by least squares.

    Args:
        matrix: Yearly predictor counts and response.
        spec: Predictor subset; the intercept is always included.
        full_model_mse: MSE of the all-predictor model; when given, Cp is set.
        alpha: Significance level for ``f_critical``.
        compute_vif: Whether to run the auxiliary regressions for VIF.

    Returns:
        The fitted coefficients and statistics.

    Raises:
        InsufficientDataError: If ``n <= k + 1``.
        CollinearityError: If the normal matrix is singular; names the column.
        DegenerateResponseError: If the response is constant but SSE is not zero.
        ConsistencyError: If a label is not a matrix column.
    """
    labels = list(spec.predictor_labels)
    _check_labels(matrix, labels)
    n, k = matrix.n_years, spec.k
    if n <= k + 1:
        raise InsufficientDataError(f"{n} years cannot support {k} predictors (need n > k + 1)")

    design = np.column_stack([np.ones(n), matrix.design(labels)])
    y = matrix.response_vector()

    normal = matmul(design.T, design)
    moments = matmul(design.T, y[:, np.newaxis])[:, 0]
    try:
        beta = solve_linear_system(normal, moments)
    except SingularSystemError as exc:
        names = [INTERCEPT, *labels]
        raise CollinearityError(names[exc.pivot_index]) from exc

    fitted = design @ beta
    residuals = y - fitted
    y_mean = float(y.mean())
    sse = float(residuals @ residuals)
    ssr = float(np.sum((fitted - y_mean) ** 2))
    sst = float(np.sum((y - y_mean) ** 2))

    scale = max(1.0, float(y @ y))
    if sst <= _ZERO_TOLERANCE * scale:
        if sse > _ZERO_TOLERANCE * scale:
            raise DegenerateResponseError("response is constant but the fit leaves residual error")
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, ssr / sst))

    dof = n - k - 1
    mse = sse / dof
    cp = None
    if full_model_mse is not None:
        cp = mallows_cp(sse, full_model_mse, n, k)

    result = FitResult(
        spec=spec,
        intercept=float(beta[0]),
        coefficients={label: float(b) for label, b in zip(labels, beta[1:], strict=True)},
        years=list(matrix.years),
        n=n,
        k=k,
        sse=sse,
        ssr=ssr,
        sst=sst,
        r2=r2,
        r2_adj=adjusted_r2(r2, n, k),
        multiple_r=math.sqrt(r2),
        s=math.sqrt(mse),
        mse=mse,
        f_stat=f_statistic(ssr, sse, n, k),
        f_critical=f_critical(alpha, k, dof),
        alpha=alpha,
        cp=cp,
        vif=variance_inflation(matrix, labels) if compute_vif else {},
        residuals=residuals.tolist(),
        fitted=fitted.tolist(),
    )
    logger.debug("Fitted model", model=spec.name, n=n, r2=result.r2, f=result.f_stat)
    return result


def _auxiliary_r2(matrix: CauseYearMatrix, label: str, others: Sequence[str]) -> float:
    """R² of ``label`` regressed on ``others`` with an intercept.

    Least squares by projection, so a rank-deficient design (an all-zero or
    duplicated column among ``others``) still yields the regressand's own R².
    """
    y = matrix.column(label)
    design = np.column_stack([np.ones(matrix.n_years), matrix.design(others)])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ beta
    sse = float(residuals @ residuals)
    if sse <= _ZERO_TOLERANCE * max(1.0, float(y @ y)):
        return 1.0
    sst = float(np.sum((y - y.mean()) ** 2))
    return min(1.0, max(0.0, 1.0 - sse / sst))


def variance_inflation(matrix: CauseYearMatrix, labels: Sequence[str]) -> dict[str, float]:
    """Return VIF per label from auxiliary regressions on the other labels.

    A lone predictor has VIF 1. A label its companions explain exactly (or a
    constant label) gets an infinite VIF; a degenerate companion column does
    not inflate the others.

    Raises:
        InsufficientDataError: If there are not more years than labels + 1.
    """
    labels = list(labels)
    _check_labels(matrix, labels)
    if len(labels) == 1:
        return {labels[0]: 1.0}
    if matrix.n_years <= len(labels) + 1:
        raise InsufficientDataError(
            f"{matrix.n_years} years cannot support VIF over {len(labels)} predictors"
        )

    values: dict[str, float] = {}
    for label in labels:
        others = [other for other in labels if other != label]
        values[label] = vif_from_r2(_auxiliary_r2(matrix, label, others))
        if math.isinf(values[label]):
            logger.warning("Perfect collinearity in auxiliary regression", predictor=label)
    return values


def predict(model: LinearModel, predictor_values: Mapping[str, float]) -> float:
    """Return ``b0 + sum(bi * xi)`` for one set of predictor values.

    Negative predictions are returned as-is and logged.

    Raises:
        ConsistencyError: If a predictor of the model has no value.

    Example:
        >>> predict(model, {"collision": 3})
        7.0
    """
    missing = [label for label in model.spec.predictor_labels if label not in predictor_values]
    if missing:
        raise ConsistencyError(f"missing values for predictors {missing}")
    value = model.intercept + sum(
        model.coefficients[label] * float(predictor_values[label])
        for label in model.spec.predictor_labels
    )
    if value < 0:
        logger.warning("Negative prediction", value=value)
    return float(value)


def holdout_error(
    matrix: CauseYearMatrix,
    fit: LinearModel,
    holdout_years: Sequence[int],
) -> HoldoutReport:
    """Compare predictions with actual totals on ``holdout_years``.

    Percent error is ``100 * |predicted - actual| / actual``; a year with an
    actual total of zero gets no percent error and is left out of the maximum.

    Raises:
        EmptyInputError: If ``holdout_years`` is empty.
        ConsistencyError: If a year is not in the matrix.
    """
    if not holdout_years:
        raise EmptyInputError("holdout set is empty")

    entries: list[HoldoutEntry] = []
    for year in holdout_years:
        actual = matrix.actual(year)
        predicted = predict(fit, matrix.row(year))
        percent = None
        if actual > 0:
            percent = 100.0 * abs(predicted - actual) / actual
        else:
            logger.warning("Percent error undefined for zero actual", year=year)
        entries.append(
            HoldoutEntry(
                year=year,
                actual=actual,
                predicted=predicted,
                percent_error=percent,
                negative_prediction=predicted < 0,
            )
        )

    defined = [entry.percent_error for entry in entries if entry.percent_error is not None]
    return HoldoutReport(entries=entries, max_percent_error=max(defined) if defined else None)


def influence_ranking(model: LinearModel) -> list[tuple[str, float]]:
    """Return predictors ordered by coefficient, largest first."""
    return sorted(model.coefficients.items(), key=lambda item: (-item[1], item[0]))


def _format_number(value: float) -> str:
    text = f"{abs(value):.3f}".rstrip("0").rstrip(".")
    return text or "0"


def format_equation(model: LinearModel) -> str:
    """Render ``y = a + b1*C + ...`` with coefficients rounded to 3 decimals.

    Known causes follow the order of the published best-fit equation; other
    labels follow in spec order.

    Example:
        >>> format_equation(model)
        'y = 1 + 2*C'
    """
    labels = list(model.spec.predictor_labels)
    ordered = [label for label in EQUATION_ORDER if label in labels]
    ordered += [label for label in labels if label not in ordered]

    text = ("-" if round(model.intercept, 3) < 0 else "") + _format_number(model.intercept)
    for label in ordered:
        coefficient = model.coefficients[label]
        sign = "-" if round(coefficient, 3) < 0 else "+"
        text += f" {sign} {_format_number(coefficient)}*{symbol(label)}"
    return f"y = {text}"
