"""Tests for tabular and JSON output."""

import json
import math

import pytest

from waterway_accidents.core.diagnostics import relevancy, residual_analysis, vif
from waterway_accidents.core.errors import ModelSchemaError
from waterway_accidents.core.export import (
    OutputFormat,
    diagnostics_bundle,
    district_frame,
    fit_frame,
    histogram_bundle,
    holdout_frame,
    hourly_frame,
    read_model,
    relevancy_frame,
    residual_frame,
    vif_frame,
    write_document,
    write_frame,
)
from waterway_accidents.core.models import LinearModel, ModelSpec
from waterway_accidents.core.ols import fit, holdout_error
from waterway_accidents.core.spatiotemporal import district_distribution, hourly_distribution


class TestOutputFormat:
    """Test cases for OutputFormat."""

    @pytest.mark.parametrize(
        "fmt,csv,json_",
        [(OutputFormat.CSV, True, False), (OutputFormat.JSON, False, True), (OutputFormat.BOTH, True, True)],
    )
    def test_flags(self, fmt, csv, json_):
        """Test which writers each format enables."""
        assert fmt.wants_csv is csv
        assert fmt.wants_json is json_


class TestFrames:
    """Test cases for the frame builders."""

    def test_district_frame(self, sample_records):
        """Test district rows in histogram order."""
        frame = district_frame(district_distribution(sample_records))

        assert list(frame.columns) == ["district", "count"]
        assert frame["district"].tolist() == ["dhaka", "khulna", "barishal"]

    def test_hourly_frame(self, sample_records):
        """Test 24 hour rows plus the unknown row."""
        frame = hourly_frame(hourly_distribution(sample_records))

        assert len(frame) == 25
        assert frame["hour"].iloc[-1] == "unknown"
        assert frame["count"].sum() == len(sample_records)

    def test_fit_frame(self, exact_matrix):
        """Test the flat statistic listing of a fit."""
        result = fit(exact_matrix, ModelSpec(predictor_labels=("x1", "x2")))

        frame = fit_frame(result)

        statistics = frame["statistic"].tolist()
        assert statistics[:3] == ["intercept", "x1", "x2"]
        assert {"r2", "r2_adj", "s", "mse", "f", "f_critical", "cp"} <= set(statistics)
        assert "vif_x1" in statistics

    def test_diagnostic_frames(self, study_matrix):
        """Test VIF, scatter and residual frames."""
        labels = study_matrix.columns
        result = fit(study_matrix, ModelSpec(predictor_labels=tuple(labels[:2])))

        vifs = vif_frame(vif(study_matrix, labels))
        scatter = relevancy_frame(relevancy(study_matrix, labels))
        residuals = residual_frame(residual_analysis(result, study_matrix))

        assert vifs["predictor"].tolist() == labels
        assert not vifs["flagged"].any()
        assert list(scatter.columns) == ["predictor", "year", "x", "y"]
        assert len(scatter) == 25 * 5
        assert list(residuals.columns) == ["against", "year", "x", "residual"]
        assert residuals["against"].unique().tolist() == ["fitted", *labels[:2]]

    def test_holdout_frame(self, exact_matrix):
        """Test one row per held-out year."""
        model = LinearModel(
            spec=ModelSpec(predictor_labels=("x1",)), intercept=0.0, coefficients={"x1": 1.0}
        )

        frame = holdout_frame(holdout_error(exact_matrix, model, [2006, 2007]))

        assert frame["year"].tolist() == [2006, 2007]


class TestWriters:
    """Test cases for write_frame, write_document and read_model."""

    def test_write_frame_missing_values(self, tmp_path):
        """Test that missing values are written as NA with LF endings."""
        import pandas as pd

        path = tmp_path / "sub" / "table.csv"
        entry = write_frame(pd.DataFrame({"a": [1.0, None]}), path)

        assert path.read_bytes() == b"a\n1.0\nNA\n"
        assert entry.rows == 2
        assert entry.line() == f"wrote {path} (2 rows)"

    def test_write_document_counts(self, tmp_path):
        """Test row counts for lists and single documents."""
        assert write_document([1, 2, 3], tmp_path / "list.json").rows == 3
        assert write_document({"a": 1}, tmp_path / "one.json").rows == 1

    def test_fit_round_trips_as_model(self, exact_matrix, tmp_path):
        """Test that a written fit can be read back as a model."""
        result = fit(exact_matrix, ModelSpec(predictor_labels=("x1", "x2")))
        path = tmp_path / "model.json"
        write_document(result, path)

        model = read_model(path)

        assert model.spec == result.spec
        assert model.coefficients == result.coefficients

    def test_infinity_is_written_as_constant(self, tmp_path):
        """Test that an infinite value survives the JSON round trip."""
        path = tmp_path / "vif.json"
        write_document({"vif": math.inf}, path)

        assert math.isinf(json.loads(path.read_text())["vif"])

    def test_read_model_bad_json(self, tmp_path):
        """Test that a non-JSON model file raises ModelSchemaError."""
        path = tmp_path / "model.json"
        path.write_text("{not json")

        with pytest.raises(ModelSchemaError) as exc_info:
            read_model(path)

        assert exc_info.value.exit_code == 5

    def test_read_model_wrong_schema(self, tmp_path):
        """Test that a document without coefficients raises ModelSchemaError."""
        path = tmp_path / "model.json"
        path.write_text(json.dumps({"spec": {"predictor_labels": ["a"]}, "intercept": 1.0}))

        with pytest.raises(ModelSchemaError) as exc_info:
            read_model(path)

        assert exc_info.value.details

    def test_bundles(self, study_matrix, sample_records):
        """Test the plot data bundles are JSON-serializable."""
        labels = study_matrix.columns
        result = fit(study_matrix, ModelSpec(predictor_labels=tuple(labels)))
        bundle = diagnostics_bundle(
            relevancy(study_matrix, labels), residual_analysis(result, study_matrix)
        )
        histograms = histogram_bundle(
            district_distribution(sample_records), hourly_distribution(sample_records)
        )

        assert set(bundle) == {"scatter", "residuals"}
        assert histograms["hourly"]["am_total"] == 1
        json.dumps(bundle)
        json.dumps(histograms)
