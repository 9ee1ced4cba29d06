"""
Published study figures and comparison against a selection run.

The study's raw yearly data is not public, so its printed tables serve as
golden targets: VIF and Multiple R per cause, the five best-by-size models
with their statistics, the best-fit equation and the maximum holdout error.
"""

from collections.abc import Mapping

from pydantic import BaseModel, Field

from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import (
    PREDICTOR_CAUSES,
    Cause,
    FitResult,
    LinearModel,
    ModelSpec,
    SelectionReport,
    symbol,
)
from waterway_accidents.core.ols import adjusted_r2, f_statistic_from_r2

logger = get_logger("published")

STUDY_YEARS = 25  # 1995-2019
MAX_HOLDOUT_ERROR = 9.45

VIF: dict[str, float] = {
    Cause.COLLISION: 1.130,
    Cause.STORMY_WEATHER: 1.159,
    Cause.EXCESSIVE_CURRENT: 1.077,
    Cause.GROUNDING: 1.035,
    Cause.OVERLOADING: 1.165,
}

MULTIPLE_R: dict[str, float] = {
    Cause.EXCESSIVE_CURRENT: 0.36565,
    Cause.OVERLOADING: 0.117473,
    Cause.GROUNDING: 0.109545,
    Cause.STORMY_WEATHER: 0.314643,
    Cause.COLLISION: 0.558,
}


class PublishedModel(BaseModel):
    """One column of the published best-subset table."""

    intercept: float
    coefficients: dict[str, float]
    s: float
    r2: float
    r2_adj: float
    mse: float
    cp: float
    f_stat: float

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(self.coefficients)


MODELS: tuple[PublishedModel, ...] = (
    PublishedModel(
        intercept=0.78,
        coefficients={
            Cause.COLLISION: 1.096,
            Cause.STORMY_WEATHER: 1.52,
            Cause.EXCESSIVE_CURRENT: 0.84,
            Cause.GROUNDING: 0.801,
            Cause.OVERLOADING: 2.10,
        },
        s=5.07,
        r2=0.74,
        r2_adj=0.67,
        mse=25.72,
        cp=6.0,
        f_stat=10.76,
    ),
    PublishedModel(
        intercept=2.86,
        coefficients={
            Cause.COLLISION: 1.04,
            Cause.STORMY_WEATHER: 1.62,
            Cause.EXCESSIVE_CURRENT: 2.19,
            Cause.GROUNDING: 0.81,
        },
        s=5.13,
        r2=0.72,
        r2_adj=0.66,
        mse=26.29,
        cp=5.4,
        f_stat=12.81,
    ),
    PublishedModel(
        intercept=6.01,
        coefficients={
            Cause.COLLISION: 1.03,
            Cause.STORMY_WEATHER: 1.64,
            Cause.EXCESSIVE_CURRENT: 2.046,
        },
        s=5.276,
        r2=0.688,
        r2_adj=0.643,
        mse=27.84,
        cp=5.7,
        f_stat=15.43,
    ),
    PublishedModel(
        intercept=12.371,
        coefficients={Cause.COLLISION: 1.06, Cause.STORMY_WEATHER: 1.45},
        s=6.323,
        r2=0.53,
        r2_adj=0.488,
        mse=39.983,
        cp=15.2,
        f_stat=12.42,
    ),
    PublishedModel(
        intercept=19.659,
        coefficients={Cause.COLLISION: 0.87},
        s=7.48,
        r2=0.31,
        r2_adj=0.28,
        mse=56.019,
        cp=29.1,
        f_stat=10.434,
    ),
)


def published_best_fit() -> LinearModel:
    """Return the published best-fit equation as a model.

    Example:
        >>> format_equation(published_best_fit())
        'y = 0.782 + 1.096*C + 1.52*SW + 0.801*G + 2.1*O + 0.84*EC'
    """
    return LinearModel(
        spec=ModelSpec(predictor_labels=tuple(PREDICTOR_CAUSES)),
        intercept=0.782,
        coefficients={
            Cause.COLLISION: 1.096,
            Cause.STORMY_WEATHER: 1.52,
            Cause.EXCESSIVE_CURRENT: 0.84,
            Cause.GROUNDING: 0.801,
            Cause.OVERLOADING: 2.1,
        },
    )


class TableStatistics(BaseModel):
    """Adjusted R² and F recomputed from a table's n, k and R²."""

    n: int
    k: int
    r2: float
    r2_adj: float
    f_stat: float
    full_model_cp: float = Field(..., description="Cp of the full model, always k + 1")


def table_statistics(n: int, k: int, r2: float) -> TableStatistics:
    """Recompute the derived columns of a published row from its R².

    Example:
        >>> round(table_statistics(25, 5, 0.74).f_stat, 2)
        10.82
    """
    return TableStatistics(
        n=n,
        k=k,
        r2=r2,
        r2_adj=adjusted_r2(r2, n, k),
        f_stat=f_statistic_from_r2(r2, n, k),
        full_model_cp=float(k + 1),
    )


class ComparisonRow(BaseModel):
    """One published-versus-computed figure."""

    table: str = Field(..., description="vif, relevancy or models")
    model: str = Field(..., description="Model name or predictor label")
    statistic: str
    published: float
    computed: float

    @property
    def difference(self) -> float:
        return self.computed - self.published


def _model_rows(published: PublishedModel, fit: FitResult) -> list[ComparisonRow]:
    pairs: list[tuple[str, float, float | None]] = [("a", published.intercept, fit.intercept)]
    pairs += [
        (symbol(label), published.coefficients[label], fit.coefficients[label])
        for label in fit.spec.predictor_labels
    ]
    pairs += [
        ("s", published.s, fit.s),
        ("R2", published.r2, fit.r2),
        ("R2_adj", published.r2_adj, fit.r2_adj),
        ("MSE", published.mse, fit.mse),
        ("Cp", published.cp, fit.cp),
        ("f", published.f_stat, fit.f_stat),
    ]
    return [
        ComparisonRow(
            table="models",
            model=fit.spec.name,
            statistic=statistic,
            published=expected,
            computed=computed,
        )
        for statistic, expected, computed in pairs
        if computed is not None
    ]


def _label_rows(table: str, expected: Mapping[str, float], computed: Mapping[str, float]) -> list[ComparisonRow]:
    return [
        ComparisonRow(
            table=table,
            model=symbol(label),
            statistic=table,
            published=value,
            computed=computed[label],
        )
        for label, value in expected.items()
        if label in computed
    ]


def compare_selection(report: SelectionReport) -> list[ComparisonRow]:
    """Line up a selection run with the published tables.

    VIF and Multiple R are compared per predictor present in the run; models
    are compared for every best-by-size subset whose predictor set matches a
    published column.
    """
    rows = _label_rows("vif", VIF, report.gates.vif.values)
    rows += _label_rows(
        "relevancy",
        MULTIPLE_R,
        {entry.label: entry.multiple_r for entry in report.gates.relevancy.entries},
    )
    by_labels = {model.labels: model for model in MODELS}
    matched = 0
    for _, spec in sorted(report.best_by_size.items(), reverse=True):
        published = by_labels.get(frozenset(spec.predictor_labels))
        if published is not None:
            rows += _model_rows(published, report.fit_for(spec))
            matched += 1
    logger.info("Compared with published tables", matched_models=matched, rows=len(rows))
    return rows
