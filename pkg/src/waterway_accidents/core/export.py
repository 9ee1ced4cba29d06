"""
Tabular and JSON output.

Turns histograms, fits, diagnostics and reports into pandas frames and plot
data bundles, and writes them as CSV or JSON. Writers return a manifest entry
(path and row count) for the run summary. Output is byte-stable: fixed
column order, ``\\n`` line endings, full float precision.
"""

import json
from collections.abc import Mapping, Sequence
from enum import StrEnum
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel, ValidationError

from waterway_accidents.core.errors import ModelSchemaError
from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import (
    DistrictHistogram,
    FitResult,
    HoldoutReport,
    HourlyHistogram,
    LinearModel,
    RelevancyReport,
    ResidualAnalysis,
    SeriesPoint,
    VifReport,
)
from waterway_accidents.core.published import ComparisonRow

logger = get_logger("export")

MISSING = "NA"


class OutputFormat(StrEnum):
    CSV = "csv"
    JSON = "json"
    BOTH = "both"

    @property
    def wants_csv(self) -> bool:
        return self in (OutputFormat.CSV, OutputFormat.BOTH)

    @property
    def wants_json(self) -> bool:
        return self in (OutputFormat.JSON, OutputFormat.BOTH)


class ManifestEntry(BaseModel):
    """A written file and its row count."""

    path: Path
    rows: int

    def line(self) -> str:
        return f"wrote {self.path} ({self.rows} rows)"


def district_frame(histogram: DistrictHistogram) -> pd.DataFrame:
    return pd.DataFrame(list(histogram.bins.items()), columns=["district", "count"])


def hourly_frame(histogram: HourlyHistogram) -> pd.DataFrame:
    """Hours 0-23 then a literal ``unknown`` row."""
    hours: list[int | str] = [*range(24), "unknown"]
    return pd.DataFrame({"hour": hours, "count": [*histogram.bins, histogram.unknown]})


def series_frame(points: Sequence[SeriesPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "x": [point.x for point in points],
            "y": [point.y for point in points],
            "year": [point.year for point in points],
        }
    )


def relevancy_frame(report: RelevancyReport) -> pd.DataFrame:
    """Long-format predictor-vs-response scatter data, one block per predictor."""
    frames = [series_frame(entry.scatter).assign(predictor=entry.label) for entry in report.entries]
    if not frames:
        return pd.DataFrame(columns=["predictor", "year", "x", "y"])
    return pd.concat(frames, ignore_index=True)[["predictor", "year", "x", "y"]]


def residual_frame(analysis: ResidualAnalysis) -> pd.DataFrame:
    """Residual series keyed by ``against`` (``fitted`` or a predictor label)."""
    frames = [series_frame(analysis.residual_vs_fitted).assign(against="fitted")]
    frames += [
        series_frame(points).assign(against=label)
        for label, points in analysis.residual_vs_predictor.items()
    ]
    frame = pd.concat(frames, ignore_index=True).rename(columns={"y": "residual"})
    return frame[["against", "year", "x", "residual"]]


def vif_frame(report: VifReport) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "predictor": list(report.values),
            "vif": list(report.values.values()),
            "flagged": [label in report.flagged for label in report.values],
        }
    )


def fit_frame(fit: FitResult) -> pd.DataFrame:
    """Flat ``statistic,value`` listing of a fit."""
    rows: list[tuple[str, Any]] = [("intercept", fit.intercept)]
    rows += [(label, value) for label, value in fit.coefficients.items()]
    rows += [
        ("n", fit.n),
        ("k", fit.k),
        ("sse", fit.sse),
        ("ssr", fit.ssr),
        ("sst", fit.sst),
        ("r2", fit.r2),
        ("r2_adj", fit.r2_adj),
        ("multiple_r", fit.multiple_r),
        ("s", fit.s),
        ("mse", fit.mse),
        ("f", fit.f_stat),
        ("f_critical", fit.f_critical),
        ("cp", fit.cp),
    ]
    rows += [(f"vif_{label}", value) for label, value in fit.vif.items()]
    return pd.DataFrame(rows, columns=["statistic", "value"])


def holdout_frame(report: HoldoutReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (entry.year, entry.actual, entry.predicted, entry.percent_error)
            for entry in report.entries
        ],
        columns=["year", "actual", "predicted", "percent_error"],
    )


def comparison_frame(rows: Sequence[ComparisonRow]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (row.table, row.model, row.statistic, row.published, row.computed, row.difference)
            for row in rows
        ],
        columns=["table", "model", "statistic", "published", "computed", "difference"],
    )


def histogram_bundle(districts: DistrictHistogram, hours: HourlyHistogram) -> dict[str, Any]:
    """Plot data for the district bar chart and the hour-of-day chart."""
    return {
        "district": districts.model_dump(mode="json"),
        "hourly": hours.model_dump(mode="json"),
    }


def diagnostics_bundle(
    relevancy: RelevancyReport,
    residuals: ResidualAnalysis | None = None,
) -> dict[str, Any]:
    """Plot data for the linearity scatters and, when given, the residual plots."""
    bundle: dict[str, Any] = {
        "scatter": {
            entry.label: [point.model_dump(mode="json") for point in entry.scatter]
            for entry in relevancy.entries
        }
    }
    if residuals is not None:
        bundle["residuals"] = residuals.model_dump(mode="json")
    return bundle


def write_frame(frame: pd.DataFrame, path: Path, index: bool = False) -> ManifestEntry:
    """Write a frame as CSV; missing cells become ``NA``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=index, lineterminator="\n", na_rep=MISSING)
    logger.info("Wrote CSV", path=str(path), rows=len(frame))
    return ManifestEntry(path=path, rows=len(frame))


def read_model(path: Path) -> LinearModel:
    """Load a model file written by ``fit`` or ``select``.

    Any document with ``spec``, ``intercept`` and ``coefficients`` is accepted;
    other fields (a full fit's statistics) are ignored.

    Raises:
        ModelSchemaError: If the file is not JSON or does not describe a model.
    """
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelSchemaError(f"{path} is not valid JSON: {exc.msg}") from exc
    try:
        return LinearModel.model_validate(payload)
    except ValidationError as exc:
        raise ModelSchemaError(f"{path} is not a valid model file", exc.errors()) from exc


def write_document(payload: BaseModel | Mapping[str, Any] | list[Any], path: Path) -> ManifestEntry:
    """Write a model or plain payload as indented JSON.

    A list counts one row per item; anything else is a single row.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    path.write_text(text + "\n", encoding="utf-8")
    rows = len(payload) if isinstance(payload, list) else 1
    logger.info("Wrote JSON", path=str(path), rows=rows)
    return ManifestEntry(path=path, rows=rows)
