"""Tests for record ingestion and aggregation."""

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waterway_accidents.core.errors import (
    ConsistencyError,
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    RecordParseError,
)
from waterway_accidents.core.ingest import (
    aggregate,
    is_matrix_file,
    load_matrix,
    normalize_label,
    parse_records,
    read_aliases,
    read_matrix_csv,
    read_records,
    resolve_cause,
    split_holdout,
    transform,
    write_matrix_csv,
)
from waterway_accidents.core.models import AccidentRecord, Cause, CauseYearMatrix, YearWindow

HEADER = "year,district,hour,cause,casualties\n"


class TestLabels:
    """Test cases for cause label resolution."""

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("Collision", Cause.COLLISION),
            ("stormy weather", Cause.STORMY_WEATHER),
            ("Stormy_Weather", Cause.STORMY_WEATHER),
            ("EXCESSIVE-CURRENT", Cause.EXCESSIVE_CURRENT),
            (" other ", Cause.OTHER),
        ],
    )
    def test_canonical_forms(self, text, expected):
        """Test that case, spacing and separators do not matter."""
        assert resolve_cause(text) is expected

    def test_unknown(self):
        """Test that an unmatched label resolves to None."""
        assert resolve_cause("capsize") is None

    def test_alias(self):
        """Test that aliases are consulted after canonical names."""
        assert resolve_cause("Nor'wester", {"norwester": Cause.STORMY_WEATHER}) is (
            Cause.STORMY_WEATHER
        )

    def test_normalize_label(self):
        """Test the normalized key form."""
        assert normalize_label("Stormy Weather") == "stormyweather"


class TestParseRecords:
    """Test cases for parse_records."""

    def test_fixture(self, record_csv):
        """Test parsing of a small file with unknown fields."""
        records = parse_records(record_csv)

        assert len(records) == 6
        assert records[0] == AccidentRecord(
            year=2015, district="dhaka", hour=14, cause=Cause.COLLISION, casualties=32, line=2
        )
        assert records[2].district == "dhaka"
        assert records[2].hour is None
        assert records[2].casualties is None
        assert records[3].cause is Cause.STORMY_WEATHER
        assert records[5].hour is None
        assert records[5].line == 7

    def test_text_and_stream_sources(self, record_csv):
        """Test that bytes, text and streams parse the same."""
        from_bytes = parse_records(record_csv)

        assert parse_records(record_csv.decode()) == from_bytes
        assert parse_records(io.BytesIO(record_csv)) == from_bytes
        assert parse_records(io.StringIO(record_csv.decode())) == from_bytes

    def test_bom_is_ignored(self, record_csv):
        """Test that a UTF-8 byte-order mark before the header is accepted."""
        assert len(parse_records(b"\xef\xbb\xbf" + record_csv)) == 6

    def test_blank_lines_are_skipped(self):
        """Test that blank rows are skipped and line numbers stay accurate."""
        text = HEADER + "\n2015,Dhaka,1,Collision,0\n\n2016,Dhaka,2,Grounding,x\n"

        with pytest.raises(RecordParseError) as exc_info:
            parse_records(text)

        assert exc_info.value.line == 5
        assert exc_info.value.column == "casualties"

    def test_header_case_insensitive(self):
        """Test that the header is matched case-insensitively."""
        records = parse_records("Year,District,Hour,Cause,Casualties\n2015,a,,Other,\n")

        assert records[0].cause is Cause.OTHER

    def test_bad_header(self):
        """Test that a wrong header fails on line 1."""
        with pytest.raises(RecordParseError) as exc_info:
            parse_records("year,place,hour,cause,casualties\n2015,a,,Other,\n")

        assert exc_info.value.line == 1

    @pytest.mark.parametrize(
        "row,message,column",
        [
            ("2015,Dhaka,1,Collision", "expected 5 fields, got 4", None),
            ("20x5,Dhaka,1,Collision,0", "is not an integer", "year"),
            ("1990,Dhaka,1,Collision,0", "year out of range", "year"),
            ("2015,  ,1,Collision,0", "district is empty", "district"),
            ("2015,Dhaka,noon,Collision,0", "is not an integer", "hour"),
            ("2015,Dhaka,24,Collision,0", "hour out of range", "hour"),
            ("2015,Dhaka,1,Capsize,0", "unrecognized cause 'Capsize'", "cause"),
            ("2015,Dhaka,1,Collision,-3", "must not be negative", "casualties"),
        ],
    )
    def test_malformed_rows(self, row, message, column):
        """Test that each malformed field is reported with its line."""
        with pytest.raises(RecordParseError) as exc_info:
            parse_records(HEADER + "2015,Dhaka,1,Collision,0\n" + row + "\n")

        assert message in str(exc_info.value)
        assert str(exc_info.value).endswith("at line 3")
        assert exc_info.value.column == column

    def test_quoted_district_with_comma(self):
        """Test that CSV quoting is honoured."""
        records = parse_records(HEADER + '2015,"Dhaka, Sadarghat",9,Collision,1\n')

        assert records[0].district == "dhaka, sadarghat"

    def test_invalid_utf8(self):
        """Test that undecodable bytes are a parse error on their line."""
        with pytest.raises(RecordParseError) as exc_info:
            parse_records(HEADER.encode() + b"2015,Dh\xffaka,1,Collision,0\n")

        assert exc_info.value.line == 2

    def test_empty(self):
        """Test that empty input raises EmptyInputError."""
        with pytest.raises(EmptyInputError):
            parse_records(b"")

    def test_header_only(self):
        """Test that a header without rows raises EmptyInputError."""
        with pytest.raises(EmptyInputError):
            parse_records(HEADER)

    def test_with_aliases(self):
        """Test that alias labels resolve through the alias map."""
        aliases = read_aliases(b"alias,canonical\nNor'wester,Stormy Weather\n")

        records = parse_records(HEADER + "2015,Bhola,3,Norwester,0\n", aliases)

        assert records[0].cause is Cause.STORMY_WEATHER

    def test_read_records(self, record_file):
        """Test reading from a path."""
        assert len(read_records(record_file)) == 6


class TestReadAliases:
    """Test cases for read_aliases."""

    def test_empty_file(self):
        """Test that an empty alias file gives no aliases."""
        assert read_aliases(b"") == {}

    def test_unknown_canonical(self):
        """Test that an alias to a non-cause fails with its line."""
        with pytest.raises(RecordParseError) as exc_info:
            read_aliases(b"alias,canonical\nfoo,Collision\nbar,Capsize\n")

        assert exc_info.value.line == 3

    def test_path_source(self, tmp_path):
        """Test reading aliases from a path."""
        path = tmp_path / "aliases.csv"
        path.write_text("alias,canonical\nCollided,collision\n")

        assert read_aliases(path) == {"collided": Cause.COLLISION}


class TestAggregate:
    """Test cases for aggregate."""

    def test_counts_and_zero_years(self, record_csv):
        """Test zero-filled years and that the total includes Other."""
        records = parse_records(record_csv)

        matrix = aggregate(records, YearWindow(start=2013, end=2019))

        assert matrix.years == list(range(2013, 2020))
        assert matrix.row(2015)["collision"] == 2
        assert matrix.actual(2015) == 3
        assert matrix.actual(2017) == 1
        assert matrix.row(2017) == dict.fromkeys(matrix.columns, 0.0)
        assert matrix.actual(2013) == 0
        assert sum(matrix.response) == len(records)

    def test_records_outside_window_are_dropped(self, record_csv):
        """Test that out-of-window records do not count."""
        records = parse_records(record_csv)

        matrix = aggregate(records, YearWindow(start=2016, end=2022))

        assert sum(matrix.response) == 3

    def test_column_order(self, record_csv):
        """Test that predictor columns follow the cause order."""
        matrix = aggregate(parse_records(record_csv), YearWindow(start=2013, end=2019))

        assert matrix.columns == [
            "collision",
            "stormy_weather",
            "excessive_current",
            "grounding",
            "overloading",
        ]

    def test_short_window(self, record_csv):
        """Test that fewer than k + 2 years raise InsufficientDataError."""
        with pytest.raises(InsufficientDataError):
            aggregate(parse_records(record_csv))

    def test_custom_labels(self, record_csv):
        """Test aggregation over a smaller predictor set."""
        matrix = aggregate(parse_records(record_csv), labels=[Cause.COLLISION])

        assert matrix.columns == ["collision"]
        assert matrix.response == [3.0, 2.0, 1.0]

    def test_empty(self):
        """Test that no records raise EmptyInputError."""
        with pytest.raises(EmptyInputError):
            aggregate([])

    def test_no_records_in_window(self, sample_records):
        """Test that a window missing every record raises EmptyInputError."""
        with pytest.raises(EmptyInputError):
            aggregate(sample_records, YearWindow(start=2030, end=2040))


class TestMatrixCsv:
    """Test cases for matrix CSV reading and writing."""

    def test_write_then_read(self, record_csv, tmp_path):
        """Test that a written matrix reads back unchanged."""
        matrix = aggregate(parse_records(record_csv), YearWindow(start=2013, end=2019))
        path = tmp_path / "matrix.csv"

        assert write_matrix_csv(matrix, path) == 7

        assert path.read_text().splitlines()[0] == (
            "year,collision,stormy_weather,excessive_current,grounding,overloading,total"
        )
        assert path.read_text().splitlines()[3] == "2015,2,0,0,1,0,3"
        assert read_matrix_csv(path) == matrix
        assert is_matrix_file(path)

    def test_float_matrix_keeps_precision(self, study_matrix, tmp_path):
        """Test that non-integral values survive a write and read."""
        path = tmp_path / "matrix.csv"
        write_matrix_csv(study_matrix, path)

        assert read_matrix_csv(path, check_counts=False) == study_matrix

    def test_counts_are_checked(self, study_matrix, tmp_path):
        """Test that non-count values fail the count check."""
        path = tmp_path / "matrix.csv"
        write_matrix_csv(study_matrix, path)

        with pytest.raises(ConsistencyError):
            read_matrix_csv(path)

    def test_cause_above_total(self):
        """Test that a cause count above the total is inconsistent."""
        text = "year,a,total\n2000,5,3\n2001,1,2\n"

        with pytest.raises(ConsistencyError):
            read_matrix_csv(io.StringIO(text))

    def test_bad_header(self):
        """Test that a matrix without a total column is rejected."""
        with pytest.raises(RecordParseError):
            read_matrix_csv(io.StringIO("year,a,b\n2000,1,2\n"))

    def test_non_numeric(self):
        """Test that a non-numeric cell is rejected."""
        with pytest.raises(RecordParseError):
            read_matrix_csv(io.StringIO("year,a,total\n2000,x,3\n"))

    def test_unordered_years(self):
        """Test that descending years are inconsistent."""
        with pytest.raises(ConsistencyError):
            read_matrix_csv(io.StringIO("year,a,total\n2001,1,2\n2000,1,2\n"))

    def test_empty(self):
        """Test that an empty matrix file raises EmptyInputError."""
        with pytest.raises(EmptyInputError):
            read_matrix_csv(io.StringIO(""))


class TestLoadMatrix:
    """Test cases for load_matrix."""

    def test_records_file(self, record_file):
        """Test that a record file is aggregated over the window."""
        matrix = load_matrix(record_file, YearWindow(start=2013, end=2019))

        assert matrix.n_years == 7
        assert not is_matrix_file(record_file)

    def test_matrix_file_window(self, record_file, tmp_path):
        """Test that a matrix file is cut to the window."""
        path = tmp_path / "matrix.csv"
        write_matrix_csv(load_matrix(record_file, YearWindow(start=2013, end=2019)), path)

        matrix = load_matrix(path, YearWindow(start=2015, end=2016))

        assert matrix.years == [2015, 2016]

    def test_matrix_file_outside_window(self, record_file, tmp_path):
        """Test that a window missing every matrix year raises EmptyInputError."""
        path = tmp_path / "matrix.csv"
        write_matrix_csv(load_matrix(record_file, YearWindow(start=2013, end=2019)), path)

        with pytest.raises(EmptyInputError):
            load_matrix(path, YearWindow(start=2030, end=2031))


class TestTransform:
    """Test cases for transform and split_holdout."""

    def test_sqrt(self):
        """Test that sqrt touches predictors only."""
        matrix = CauseYearMatrix.from_columns([2000, 2001], {"a": [4, 9]}, [10, 20])

        result = transform(matrix, "sqrt")

        assert result.column("a").tolist() == [2.0, 3.0]
        assert result.response == [10.0, 20.0]

    def test_none_is_identity(self, exact_matrix):
        """Test that the identity transform returns the matrix."""
        assert transform(exact_matrix, "none") is exact_matrix

    def test_log1p_domain(self):
        """Test that log1p of values at or below -1 raises DomainError."""
        matrix = CauseYearMatrix.from_columns([2000, 2001], {"a": [-1, 2]}, [1, 2])

        with pytest.raises(DomainError):
            transform(matrix, "log1p")

    def test_split_holdout(self, exact_matrix):
        """Test that the last years are held out."""
        training, holdout = split_holdout(exact_matrix, 3)

        assert holdout == [2005, 2006, 2007]
        assert training.years == list(range(2000, 2005))

    @pytest.mark.parametrize("count", [0, 8])
    def test_split_holdout_bounds(self, exact_matrix, count):
        """Test that a holdout of zero or of every year is inconsistent."""
        with pytest.raises(ConsistencyError):
            split_holdout(exact_matrix, count)


record_strategy = st.builds(
    AccidentRecord,
    year=st.integers(min_value=2010, max_value=2019),
    district=st.sampled_from(["Dhaka", "Barishal", "Bhola"]),
    hour=st.none() | st.integers(min_value=0, max_value=23),
    cause=st.sampled_from(list(Cause)),
    casualties=st.none() | st.integers(min_value=0, max_value=50),
)
WINDOW = YearWindow(start=2010, end=2019)


class TestAggregateProperties:
    """Properties of aggregate and the matrix CSV over random record sets."""

    @settings(max_examples=100, deadline=None)
    @given(
        inside=st.lists(record_strategy, min_size=1, max_size=80),
        outside_years=st.lists(
            st.integers(min_value=1995, max_value=2009) | st.integers(min_value=2020, max_value=2024),
            max_size=10,
        ),
    )
    def test_conservation(self, inside, outside_years):
        """Test that the response column sums to the in-window record count."""
        outside = [
            AccidentRecord(year=year, district="dhaka", cause=Cause.COLLISION)
            for year in outside_years
        ]

        matrix = aggregate(inside + outside, WINDOW)

        assert sum(matrix.response) == len(inside)
        assert matrix.years == WINDOW.years

    @settings(max_examples=100, deadline=None)
    @given(records=st.lists(record_strategy, min_size=1, max_size=60), extra=record_strategy)
    def test_one_more_record(self, records, extra):
        """Test that one extra record adds 1 to its year's total and at most one cause cell."""
        before = aggregate(records, WINDOW)
        after = aggregate([*records, extra], WINDOW)

        for index, year in enumerate(WINDOW.years):
            expected_total = before.response[index] + (1 if year == extra.year else 0)
            assert after.response[index] == expected_total
            changes = [
                new - old
                for old, new in zip(
                    before.predictor_counts[index], after.predictor_counts[index], strict=True
                )
            ]
            if year != extra.year:
                assert changes == [0] * len(changes)
            else:
                assert sorted(changes)[-1] <= 1
                assert sum(changes) == (0 if extra.cause is Cause.OTHER else 1)

    @settings(max_examples=50, deadline=None)
    @given(records=st.lists(record_strategy, min_size=1, max_size=60))
    def test_matrix_csv_round_trip(self, records):
        """Test that a written matrix reads back identical."""
        matrix = aggregate(records, WINDOW)
        sink = io.StringIO()
        write_matrix_csv(matrix, sink)

        assert read_matrix_csv(io.StringIO(sink.getvalue())) == matrix
