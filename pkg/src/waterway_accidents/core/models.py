"""
Pydantic models for the analysis domain.

Defines accident records, the per-year cause matrix, regression specs and
results, diagnostic reports, selection reports and histograms. Value types
are frozen; infinities (the VIF sentinel, F of a perfect fit) serialize as
JSON constants.
"""

import math
from collections import Counter
from collections.abc import Mapping, Sequence
from enum import StrEnum

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from waterway_accidents.core.errors import ConsistencyError

PEAK_WINDOW: tuple[int, int] = (10, 16)
EVENING_WINDOW: tuple[int, int] = (18, 24)
RESPONSE_COLUMN = "total"


class Cause(StrEnum):
    """Accident cause categories; the first five are regression predictors."""

    COLLISION = "collision"
    STORMY_WEATHER = "stormy_weather"
    EXCESSIVE_CURRENT = "excessive_current"
    GROUNDING = "grounding"
    OVERLOADING = "overloading"
    OTHER = "other"


PREDICTOR_CAUSES: tuple[Cause, ...] = (
    Cause.COLLISION,
    Cause.STORMY_WEATHER,
    Cause.EXCESSIVE_CURRENT,
    Cause.GROUNDING,
    Cause.OVERLOADING,
)

SYMBOLS: dict[str, str] = {
    Cause.COLLISION: "C",
    Cause.STORMY_WEATHER: "SW",
    Cause.EXCESSIVE_CURRENT: "EC",
    Cause.GROUNDING: "G",
    Cause.OVERLOADING: "O",
}


def symbol(label: str) -> str:
    """Return the short symbol of a predictor label (the label itself if unknown)."""
    return SYMBOLS.get(label, label)


class _Value(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")


class AccidentRecord(_Value):
    """One accident event.

    Attributes:
        year: Calendar year of the accident.
        district: Trimmed, case-folded district name.
        hour: Hour of day 0-23, or None when the time is unknown.
        cause: Cause category.
        casualties: Casualty count, or None when unknown.
        line: Source line the record was parsed from (not serialized).
    """

    year: int = Field(..., ge=1995, le=2099, description="Calendar year")
    district: str = Field(..., min_length=1, description="Normalized district name")
    hour: int | None = Field(default=None, ge=0, le=23, description="Hour of day or unknown")
    cause: Cause = Field(..., description="Cause category")
    casualties: int | None = Field(default=None, ge=0, description="Casualties or unknown")
    line: int | None = Field(default=None, exclude=True, repr=False, description="Source line")

    @field_validator("district", mode="before")
    @classmethod
    def _normalize_district(cls, value: str) -> str:
        return str(value).strip().casefold()


class YearWindow(_Value):
    """Inclusive range of study years."""

    start: int = Field(..., description="First year (inclusive)")
    end: int = Field(..., description="Last year (inclusive)")

    @model_validator(mode="after")
    def _ordered(self) -> "YearWindow":
        if self.start > self.end:
            raise ValueError(f"window start {self.start} is after end {self.end}")
        return self

    @property
    def years(self) -> list[int]:
        return list(range(self.start, self.end + 1))

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def contains(self, year: int) -> bool:
        return self.start <= year <= self.end


class CauseYearMatrix(_Value):
    """Per-year predictor counts and the total-accident response.

    Rows are years in strictly ascending order. The model itself checks only
    shape and finiteness so that regression code can work on any real-valued
    design; count semantics (non-negative integers, cause count never above
    the yearly total) are checked by ``check_counts`` and hold by construction
    for aggregated matrices.

    Attributes:
        years: Distinct years in ascending order.
        columns: Ordered predictor labels.
        predictor_counts: One row per year, one value per predictor label.
        response: Total accidents per year.
    """

    years: list[int] = Field(..., min_length=1, description="Ascending distinct years")
    columns: list[str] = Field(..., min_length=1, description="Predictor labels")
    predictor_counts: list[list[float]] = Field(..., description="Per-year predictor rows")
    response: list[float] = Field(..., description="Per-year total accidents")

    @model_validator(mode="after")
    def _check_shape(self) -> "CauseYearMatrix":
        if any(b <= a for a, b in zip(self.years, self.years[1:], strict=False)):
            raise ValueError("years must be strictly ascending without duplicates")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("predictor labels must be distinct")
        if RESPONSE_COLUMN in self.columns or "year" in self.columns:
            raise ValueError("'year' and 'total' are reserved column names")
        n = len(self.years)
        if len(self.predictor_counts) != n or len(self.response) != n:
            raise ValueError("every year needs one predictor row and one response value")
        width = len(self.columns)
        for row in self.predictor_counts:
            if len(row) != width:
                raise ValueError(f"predictor rows must have {width} values")
            if not all(math.isfinite(v) for v in row):
                raise ValueError("predictor values must be finite")
        if not all(math.isfinite(v) for v in self.response):
            raise ValueError("response values must be finite")
        return self

    @classmethod
    def from_columns(
        cls,
        years: Sequence[int],
        columns: Mapping[str, Sequence[float]],
        response: Sequence[float],
    ) -> "CauseYearMatrix":
        """Build a matrix from column-oriented data."""
        labels = list(columns)
        rows = [[float(columns[label][i]) for label in labels] for i in range(len(years))]
        return cls(
            years=[int(y) for y in years],
            columns=labels,
            predictor_counts=rows,
            response=[float(v) for v in response],
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "CauseYearMatrix":
        """Build a matrix from a frame indexed by year with a ``total`` column."""
        labels = [c for c in frame.columns if c != RESPONSE_COLUMN]
        return cls(
            years=[int(y) for y in frame.index],
            columns=labels,
            predictor_counts=frame[labels].astype(float).values.tolist(),
            response=frame[RESPONSE_COLUMN].astype(float).tolist(),
        )

    @property
    def n_years(self) -> int:
        return len(self.years)

    def column(self, label: str) -> np.ndarray:
        """Return one predictor column as a float vector."""
        if label not in self.columns:
            raise ConsistencyError(f"unknown predictor '{label}'; matrix has {self.columns}")
        index = self.columns.index(label)
        return np.array([row[index] for row in self.predictor_counts], dtype=float)

    def design(self, labels: Sequence[str]) -> np.ndarray:
        """Return the n x k predictor block for ``labels`` (no intercept column)."""
        if not labels:
            return np.empty((self.n_years, 0))
        return np.column_stack([self.column(label) for label in labels])

    def response_vector(self) -> np.ndarray:
        return np.asarray(self.response, dtype=float)

    def row(self, year: int) -> dict[str, float]:
        """Return the predictor values of one year keyed by label."""
        if year not in self.years:
            raise ConsistencyError(f"year {year} is not in the matrix")
        return dict(zip(self.columns, self.predictor_counts[self.years.index(year)], strict=True))

    def actual(self, year: int) -> float:
        if year not in self.years:
            raise ConsistencyError(f"year {year} is not in the matrix")
        return self.response[self.years.index(year)]

    def select_years(self, years: Sequence[int]) -> "CauseYearMatrix":
        """Return the sub-matrix for ``years`` (kept in ascending order)."""
        wanted = set(years)
        missing = wanted.difference(self.years)
        if missing:
            raise ConsistencyError(f"years not in matrix: {sorted(missing)}")
        keep = [i for i, year in enumerate(self.years) if year in wanted]
        return CauseYearMatrix(
            years=[self.years[i] for i in keep],
            columns=list(self.columns),
            predictor_counts=[list(self.predictor_counts[i]) for i in keep],
            response=[self.response[i] for i in keep],
        )

    def to_frame(self) -> pd.DataFrame:
        """Return the matrix as a frame indexed by year, predictors then ``total``."""
        frame = pd.DataFrame(self.predictor_counts, columns=self.columns, index=self.years)
        frame[RESPONSE_COLUMN] = self.response
        frame.index.name = "year"
        return frame

    def check_counts(self) -> None:
        """Check count semantics: non-negative integers, cause count ≤ yearly total.

        Raises:
            ConsistencyError: If any cell violates the count invariants.
        """
        for year, row, total in zip(self.years, self.predictor_counts, self.response, strict=True):
            for label, value in zip(self.columns, row, strict=True):
                if value < 0 or not float(value).is_integer():
                    raise ConsistencyError(f"{label} in {year} is not a non-negative count")
                if value > total:
                    raise ConsistencyError(f"{label} in {year} exceeds the year's total")
            if total < 0 or not float(total).is_integer():
                raise ConsistencyError(f"total in {year} is not a non-negative count")


class ModelSpec(_Value):
    """A subset of predictor columns; the intercept is always implied."""

    predictor_labels: tuple[str, ...] = Field(..., min_length=1, description="Predictor labels")

    @field_validator("predictor_labels")
    @classmethod
    def _distinct(cls, labels: tuple[str, ...]) -> tuple[str, ...]:
        if len(set(labels)) != len(labels):
            raise ValueError("predictor labels must be distinct")
        return labels

    @property
    def k(self) -> int:
        return len(self.predictor_labels)

    @property
    def name(self) -> str:
        """Display name in the study's ``f(C, SW, ...)`` notation."""
        return "f(" + ", ".join(symbol(label) for label in self.predictor_labels) + ")"


class LinearModel(_Value):
    """Intercept and slopes of a fitted linear model; all ``predict`` needs.

    Attributes:
        spec: Predictor subset.
        intercept: Constant term b0.
        coefficients: Slope per predictor label.
    """

    spec: ModelSpec = Field(..., description="Predictor subset")
    intercept: float = Field(..., description="Intercept b0")
    coefficients: dict[str, float] = Field(..., description="Slope per predictor label")

    @model_validator(mode="after")
    def _coefficients_match_spec(self) -> "LinearModel":
        if set(self.coefficients) != set(self.spec.predictor_labels):
            raise ValueError("coefficients must be keyed by exactly the spec's predictor labels")
        return self


class FitResult(LinearModel):
    """Coefficients plus every fit statistic of one least-squares fit."""

    years: list[int] = Field(..., description="Years the model was fitted on")
    n: int = Field(..., description="Sample count")
    k: int = Field(..., description="Predictor count")
    sse: float = Field(..., ge=0, description="Residual sum of squares")
    ssr: float = Field(..., ge=0, description="Regression sum of squares")
    sst: float = Field(..., ge=0, description="Total sum of squares")
    r2: float = Field(..., ge=0, le=1, description="Coefficient of multiple determination")
    r2_adj: float = Field(..., description="Adjusted R²")
    multiple_r: float = Field(..., ge=0, le=1, description="Square root of R²")
    s: float = Field(..., ge=0, description="Standard error of the regression")
    mse: float = Field(..., ge=0, description="Residual mean square")
    f_stat: float = Field(..., ge=0, description="Overall F statistic")
    f_critical: float = Field(..., ge=0, description="Upper-alpha F quantile")
    alpha: float = Field(..., description="Significance level of f_critical")
    cp: float | None = Field(default=None, description="Mallows' Cp against the full model")
    vif: dict[str, float] = Field(default_factory=dict, description="VIF per predictor")
    residuals: list[float] = Field(..., description="Per-year residuals")
    fitted: list[float] = Field(..., description="Per-year fitted values")

    @property
    def passes_f_test(self) -> bool:
        return self.f_stat > self.f_critical


class HoldoutEntry(_Value):
    """Prediction error for one held-out year."""

    year: int
    actual: float
    predicted: float
    percent_error: float | None = Field(default=None, description="None when actual is 0")
    negative_prediction: bool = False


class HoldoutReport(_Value):
    """Per-year percent errors and their maximum over defined years."""

    entries: list[HoldoutEntry]
    max_percent_error: float | None = None


class VifReport(_Value):
    """Variance inflation factors of a predictor set."""

    values: dict[str, float] = Field(..., description="VIF per predictor label")
    threshold: float = Field(default=5.0, description="Flag at VIF >= threshold")
    flagged: list[str] = Field(default_factory=list, description="Labels at or above threshold")

    @classmethod
    def from_values(cls, values: Mapping[str, float], threshold: float = 5.0) -> "VifReport":
        flagged = [label for label, value in values.items() if value >= threshold]
        return cls(values=dict(values), threshold=threshold, flagged=flagged)


class SeriesPoint(_Value):
    """One plot point; ``year`` ties it back to the matrix row."""

    x: float
    y: float
    year: int | None = None


class RelevancyEntry(_Value):
    """Correlation of one predictor with the response, with its scatter data."""

    label: str
    multiple_r: float = Field(..., ge=-1, le=1)
    slope: float
    slope_sign: int = Field(..., ge=-1, le=1)
    scatter: list[SeriesPoint]


class RelevancyReport(_Value):
    """Relevancy (Multiple R) checks for a predictor set."""

    entries: list[RelevancyEntry]
    undefined: list[str] = Field(default_factory=list, description="Constant predictors")

    def get(self, label: str) -> RelevancyEntry:
        for entry in self.entries:
            if entry.label == label:
                return entry
        raise KeyError(label)


class RunsSummary(_Value):
    """Sign-run screen over residuals.

    ``passed`` is None when the screen is degenerate (all residuals of one
    sign or zero).
    """

    n_positive: int
    n_negative: int
    n_zero: int
    runs: int
    expected_runs: float | None = None
    z_score: float | None = None
    degenerate: bool = False
    passed: bool | None = None


class ResidualAnalysis(_Value):
    """Plot-ready residual series and the randomness screen for one fit."""

    spec: ModelSpec
    residual_vs_fitted: list[SeriesPoint]
    residual_vs_predictor: dict[str, list[SeriesPoint]]
    runs: RunsSummary


class SelectionPolicy(StrEnum):
    """How candidate models are ranked."""

    MAX_R2_FULL = "max-r2"
    BALANCED = "balanced"


class FTestOutcome(_Value):
    spec: ModelSpec
    f_stat: float
    f_critical: float
    passed: bool


class Rejection(_Value):
    spec: ModelSpec
    reason: str


class PipelineGates(_Value):
    """Outcomes of the screening gates that precede ranking."""

    vif: VifReport
    relevancy: RelevancyReport
    f_tests: list[FTestOutcome]


class SelectionReport(_Value):
    """Everything the best-subset pipeline produced, in gate order."""

    policy: SelectionPolicy
    alpha: float
    vif_threshold: float
    predictors: list[str] = Field(..., description="Predictors offered to the pipeline")
    retained: list[str] = Field(..., description="Predictors that passed the VIF gate")
    excluded: list[str] = Field(default_factory=list, description="Removed by the VIF gate")
    full_model_mse: float
    candidate_fits: list[FitResult]
    ranking: list[ModelSpec]
    rejected: list[Rejection]
    best_by_size: dict[int, ModelSpec]
    best_fit: FitResult
    gates: PipelineGates
    residuals: ResidualAnalysis
    pipeline_log: list[str]

    def fit_for(self, spec: ModelSpec) -> FitResult:
        for fit in self.candidate_fits:
            if fit.spec == spec:
                return fit
        raise KeyError(spec.name)


class DistrictHistogram(_Value):
    """Accident counts per district, descending, ties alphabetical."""

    bins: dict[str, int]
    total: int

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "DistrictHistogram":
        ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        return cls(bins=dict(ordered), total=sum(counts.values()))

    @property
    def district_count(self) -> int:
        return len(self.bins)

    def top(self, n: int) -> list[tuple[str, int]]:
        return list(self.bins.items())[:n]

    def __add__(self, other: "DistrictHistogram") -> "DistrictHistogram":
        return DistrictHistogram.from_counts(Counter(self.bins) + Counter(other.bins))


class HourlyHistogram(_Value):
    """Accident counts for hours 0-23 plus an unknown-time bucket."""

    bins: list[int] = Field(..., min_length=24, max_length=24)
    unknown: int = Field(default=0, ge=0)

    @computed_field
    @property
    def am_total(self) -> int:
        return sum(self.bins[:12])

    @computed_field
    @property
    def pm_total(self) -> int:
        return sum(self.bins[12:])

    @computed_field
    @property
    def peak_window_total(self) -> int:
        return self.window_total(*PEAK_WINDOW)

    @computed_field
    @property
    def evening_window_total(self) -> int:
        return self.window_total(*EVENING_WINDOW)

    @computed_field
    @property
    def total(self) -> int:
        return sum(self.bins) + self.unknown

    def window_total(self, start: int, end: int) -> int:
        """Sum of bins in the half-open hour window ``[start, end)``."""
        return sum(self.bins[start:end])

    def __add__(self, other: "HourlyHistogram") -> "HourlyHistogram":
        return HourlyHistogram(
            bins=[a + b for a, b in zip(self.bins, other.bins, strict=True)],
            unknown=self.unknown + other.unknown,
        )
