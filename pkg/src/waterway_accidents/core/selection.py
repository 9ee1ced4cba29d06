"""
Best-subset model selection.

Runs the model-development flow end to end: VIF gate, relevancy check,
full-model fit (for Cp), exhaustive subset fits, F gate, ranking, and
residual analysis of the winner.
"""

import itertools
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from waterway_accidents.core import diagnostics, ols
from waterway_accidents.core.config import settings
from waterway_accidents.core.errors import (
    CollinearityError,
    DegenerateInputError,
    DegenerateResponseError,
    EmptyInputError,
    InsufficientDataError,
    NoModelError,
    SubsetLimitError,
)
from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import (
    CauseYearMatrix,
    FitResult,
    FTestOutcome,
    ModelSpec,
    PipelineGates,
    Rejection,
    SelectionPolicy,
    SelectionReport,
    symbol,
)

logger = get_logger("selection")

MAX_PREDICTORS = 16


def enumerate_subsets(labels: Sequence[str]) -> list[ModelSpec]:
    """Return every non-empty subset of ``labels``.

    Subsets are ordered by size, then lexicographically by position in
    ``labels``.

    Raises:
        EmptyInputError: If ``labels`` is empty.
        SubsetLimitError: If there are more than 16 labels.

    Example:
        >>> [s.predictor_labels for s in enumerate_subsets(["a", "b"])]
        [('a',), ('b',), ('a', 'b')]
    """
    labels = list(labels)
    if not labels:
        raise EmptyInputError("no predictors to enumerate")
    if len(labels) > MAX_PREDICTORS:
        raise SubsetLimitError(f"{len(labels)} predictors exceed the cap of {MAX_PREDICTORS}")
    return [
        ModelSpec(predictor_labels=combo)
        for size in range(1, len(labels) + 1)
        for combo in itertools.combinations(labels, size)
    ]


def ranking_key(fit: FitResult, policy: SelectionPolicy) -> tuple[float, ...]:
    """Sort key of a fit under ``policy``; smaller sorts first.

    ``MAX_R2_FULL`` orders by R² alone. ``BALANCED`` orders by adjusted R²,
    then MSE, then distance of Cp from k + 1, then standard error. Both end
    with subset size.
    """
    if policy is SelectionPolicy.MAX_R2_FULL:
        return (-fit.r2, fit.k)
    cp_distance = abs(fit.cp - (fit.k + 1)) if fit.cp is not None else math.inf
    return (-fit.r2_adj, fit.mse, cp_distance, fit.s, fit.k)


def rank(fits: Sequence[FitResult], policy: SelectionPolicy) -> list[FitResult]:
    """Order ``fits`` by ``policy``; full ties keep their input order.

    Raises:
        EmptyInputError: If ``fits`` is empty.
    """
    if not fits:
        raise EmptyInputError("no fits to rank")
    return sorted(fits, key=lambda fit: ranking_key(fit, policy))


def best_by_size(ranked: Sequence[FitResult]) -> dict[int, ModelSpec]:
    """Return the first (best) spec of each subset size in ``ranked``."""
    best: dict[int, ModelSpec] = {}
    for fit in ranked:
        best.setdefault(fit.k, fit.spec)
    return dict(sorted(best.items()))


def _fit_candidate(
    matrix: CauseYearMatrix,
    spec: ModelSpec,
    full_model_mse: float | None,
    alpha: float,
) -> FitResult | Exception:
    try:
        return ols.fit(matrix, spec, full_model_mse=full_model_mse, alpha=alpha)
    except (CollinearityError, DegenerateResponseError) as exc:
        return exc


def run_pipeline(
    matrix: CauseYearMatrix,
    policy: SelectionPolicy = SelectionPolicy.MAX_R2_FULL,
    alpha: float = 0.05,
    vif_threshold: float = diagnostics.VIF_THRESHOLD,
    labels: Sequence[str] | None = None,
    max_workers: int | None = None,
) -> SelectionReport:
    """Run the full selection flow and return its report.

    Args:
        matrix: Yearly predictor counts and response.
        policy: Ranking policy; ``MAX_R2_FULL`` reproduces the published choice.
        alpha: Significance level of the F gate.
        vif_threshold: Predictors with VIF at or above this are excluded.
        labels: Predictors to consider (default: every matrix column).
        max_workers: Thread count for subset fits (default: settings).

    Returns:
        The selection report with every gate outcome.

    Raises:
        InsufficientDataError: If ``n <= k + 1`` for the offered predictors.
        DegenerateInputError: If the VIF gate removes every predictor.
        NoModelError: If the full model cannot be fitted or no candidate
            passes the F gate.
    """
    labels = list(labels) if labels is not None else list(matrix.columns)
    workers = max_workers or settings.max_workers
    n = matrix.n_years
    if n <= len(labels) + 1:
        raise InsufficientDataError(f"{n} years cannot support {len(labels)} predictors")
    log: list[str] = []

    vif_report = diagnostics.vif(matrix, labels, vif_threshold)
    retained = [label for label in labels if label not in vif_report.flagged]
    for label in labels:
        verdict = "excluded" if label in vif_report.flagged else "retained"
        log.append(f"vif: {label} = {vif_report.values[label]:.4f} ({verdict})")
    if not retained:
        raise DegenerateInputError("every predictor failed the VIF gate", diagnostics=log)

    relevancy = diagnostics.relevancy(matrix, retained)
    for entry in relevancy.entries:
        note = "positive" if entry.slope_sign > 0 else "non-positive (retained)"
        log.append(f"relevancy: {entry.label} R = {entry.multiple_r:.4f}, slope {note}")
    for label in relevancy.undefined:
        log.append(f"relevancy: {label} R undefined (constant predictor)")

    full_spec = ModelSpec(predictor_labels=tuple(retained))
    try:
        full_fit = ols.fit(matrix, full_spec, alpha=alpha, compute_vif=False)
    except (CollinearityError, DegenerateResponseError) as exc:
        log.append(f"full model: {exc}")
        raise NoModelError(f"full model {full_spec.name} cannot be fitted: {exc}", log) from exc
    full_model_mse = full_fit.mse if full_fit.mse > 0 else None
    if full_model_mse is None:
        logger.warning("Full model fits exactly; Cp is undefined")
    log.append(f"full model: {full_spec.name} MSE = {full_fit.mse:.6g}")

    specs = enumerate_subsets(retained)
    logger.info("Fitting candidate subsets", count=len(specs), workers=workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(lambda spec: _fit_candidate(matrix, spec, full_model_mse, alpha), specs)
            )
    else:
        outcomes = [_fit_candidate(matrix, spec, full_model_mse, alpha) for spec in specs]

    candidates: list[FitResult] = []
    passing: list[FitResult] = []
    rejected: list[Rejection] = []
    f_tests: list[FTestOutcome] = []
    for spec, outcome in zip(specs, outcomes, strict=True):
        if isinstance(outcome, Exception):
            rejected.append(Rejection(spec=spec, reason=str(outcome)))
            log.append(f"candidate {spec.name}: rejected ({outcome})")
            continue
        candidates.append(outcome)
        passed = outcome.passes_f_test
        f_tests.append(
            FTestOutcome(
                spec=spec,
                f_stat=outcome.f_stat,
                f_critical=outcome.f_critical,
                passed=passed,
            )
        )
        if passed:
            passing.append(outcome)
            log.append(f"candidate {spec.name}: F = {outcome.f_stat:.4f} passed")
        else:
            reason = f"F {outcome.f_stat:.4f} <= F critical {outcome.f_critical:.4f}"
            rejected.append(Rejection(spec=spec, reason=reason))
            log.append(f"candidate {spec.name}: rejected ({reason})")

    if not passing:
        raise NoModelError("no candidate model passes the F gate", diagnostics=log)

    ranked = rank(passing, policy)
    best = ranked[0]
    log.append(f"best fit ({policy.value}): {best.spec.name} R2 = {best.r2:.4f}")
    residuals = diagnostics.residual_analysis(best, matrix)
    log.append(
        "residuals: degenerate"
        if residuals.runs.degenerate
        else f"residuals: runs z = {residuals.runs.z_score:.4f} "
        f"({'passed' if residuals.runs.passed else 'structured'})"
    )
    logger.info("Selected model", model=best.spec.name, r2=best.r2, passing=len(passing))

    return SelectionReport(
        policy=policy,
        alpha=alpha,
        vif_threshold=vif_threshold,
        predictors=labels,
        retained=retained,
        excluded=list(vif_report.flagged),
        full_model_mse=full_fit.mse,
        candidate_fits=candidates,
        ranking=[fit.spec for fit in ranked],
        rejected=rejected,
        best_by_size=best_by_size(ranked),
        best_fit=best,
        gates=PipelineGates(vif=vif_report, relevancy=relevancy, f_tests=f_tests),
        residuals=residuals,
        pipeline_log=log,
    )


TABLE_ROWS_AFTER = ("s", "R2", "R2_adj", "MSE", "Cp", "f", "f_critical")


def selection_table(report: SelectionReport, include_all: bool = False) -> pd.DataFrame:
    """Lay the report out like the published model table.

    One column per model (best of each size, largest first; or every
    candidate in enumeration order), rows ``a``, one row per predictor
    symbol, then s, R², adjusted R², MSE, Cp, f and f critical. Coefficients
    a model does not use are NaN.
    """
    if include_all:
        fits = report.candidate_fits
    else:
        fits = [report.fit_for(spec) for _, spec in sorted(report.best_by_size.items(), reverse=True)]

    index = ["a", *(symbol(label) for label in report.retained), *TABLE_ROWS_AFTER]
    columns: dict[str, list[float]] = {}
    for fit in fits:
        coefficients = [fit.coefficients.get(label, np.nan) for label in report.retained]
        columns[fit.spec.name] = [
            fit.intercept,
            *coefficients,
            fit.s,
            fit.r2,
            fit.r2_adj,
            fit.mse,
            fit.cp if fit.cp is not None else np.nan,
            fit.f_stat,
            fit.f_critical,
        ]
    frame = pd.DataFrame(columns, index=index, dtype=float)
    frame.index.name = "parameter"
    return frame
