"""
Accident-record ingestion and per-year aggregation.

Parses record CSVs (``year,district,hour,cause,casualties``) with line-accurate
error reporting, resolves cause labels and aliases, and aggregates records into
the per-year cause matrix. Also reads and writes the matrix CSV format, so a
ready-made yearly table can stand in for raw records.
"""

import csv
import io
import re
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import BinaryIO, Literal, TextIO

import numpy as np
import pandas as pd
from pydantic import ValidationError

from waterway_accidents.core.errors import (
    ConsistencyError,
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    RecordParseError,
)
from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import (
    PREDICTOR_CAUSES,
    RESPONSE_COLUMN,
    AccidentRecord,
    Cause,
    CauseYearMatrix,
    YearWindow,
)

logger = get_logger("ingest")

RECORD_HEADER: tuple[str, ...] = ("year", "district", "hour", "cause", "casualties")
ALIAS_HEADER: tuple[str, ...] = ("alias", "canonical")
MATRIX_HEADER: tuple[str, ...] = ("year", *PREDICTOR_CAUSES, RESPONSE_COLUMN)
UNKNOWN_MARKERS = frozenset({"", "unknown"})

TransformKind = Literal["none", "log1p", "sqrt"]

Source = bytes | str | BinaryIO | TextIO


def normalize_label(text: str) -> str:
    """Case-fold and drop everything but letters and digits.

    Example:
        >>> normalize_label("Stormy Weather")
        'stormyweather'
    """
    return re.sub(r"[^0-9a-z]", "", text.casefold())


_CANONICAL: dict[str, Cause] = {normalize_label(cause.value): cause for cause in Cause}


def resolve_cause(text: str, aliases: Mapping[str, Cause] | None = None) -> Cause | None:
    """Map free text to a cause, or None when it matches nothing."""
    key = normalize_label(text)
    if key in _CANONICAL:
        return _CANONICAL[key]
    if aliases:
        return aliases.get(key)
    return None


def _read_text(source: Source) -> str:
    if isinstance(source, str):
        return source.removeprefix("\ufeff")
    raw = source if isinstance(source, bytes) else source.read()
    if isinstance(raw, str):
        return raw.removeprefix("\ufeff")
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise RecordParseError("input is not valid UTF-8", line=line) from exc


def _rows(text: str) -> Iterable[tuple[int, list[str]]]:
    """Yield ``(line, cells)`` for every non-blank CSV row."""
    reader = csv.reader(io.StringIO(text))
    for cells in reader:
        if not any(cell.strip() for cell in cells):
            continue
        yield reader.line_num, cells


def _check_header(cells: list[str], expected: Sequence[str], line: int) -> None:
    found = tuple(cell.strip().casefold() for cell in cells)
    if found != tuple(expected):
        raise RecordParseError(
            f"expected header '{','.join(expected)}', got '{','.join(cells)}'", line=line
        )


def _optional_int(text: str) -> int | None:
    value = text.strip()
    if value.casefold() in UNKNOWN_MARKERS:
        return None
    return int(value)


def _parse_row(cells: list[str], line: int, aliases: Mapping[str, Cause] | None) -> AccidentRecord:
    if len(cells) != len(RECORD_HEADER):
        raise RecordParseError(f"expected {len(RECORD_HEADER)} fields, got {len(cells)}", line=line)
    year_text, district, hour_text, cause_text, casualties_text = cells

    try:
        year = int(year_text.strip())
    except ValueError as exc:
        raise RecordParseError(f"year '{year_text}' is not an integer", line, "year") from exc
    if not 1995 <= year <= 2099:
        raise RecordParseError("year out of range", line, "year")

    if not district.strip():
        raise RecordParseError("district is empty", line, "district")

    try:
        hour = _optional_int(hour_text)
    except ValueError as exc:
        raise RecordParseError(f"hour '{hour_text}' is not an integer", line, "hour") from exc
    if hour is not None and not 0 <= hour <= 23:
        raise RecordParseError("hour out of range", line, "hour")

    cause = resolve_cause(cause_text, aliases)
    if cause is None:
        raise RecordParseError(f"unrecognized cause '{cause_text.strip()}'", line, "cause")

    try:
        casualties = _optional_int(casualties_text)
    except ValueError as exc:
        raise RecordParseError(
            f"casualties '{casualties_text}' is not an integer", line, "casualties"
        ) from exc
    if casualties is not None and casualties < 0:
        raise RecordParseError("casualties must not be negative", line, "casualties")

    return AccidentRecord(
        year=year,
        district=district,
        hour=hour,
        cause=cause,
        casualties=casualties,
        line=line,
    )


def parse_records(
    source: Source,
    aliases: Mapping[str, Cause] | None = None,
) -> list[AccidentRecord]:
    """Parse an accident-record CSV.

    Args:
        source: CSV bytes, text, or an open binary/text stream (UTF-8,
            optional BOM).
        aliases: Normalized alias -> cause map from ``read_aliases``.

    Returns:
        One record per non-blank data row, in file order.

    Raises:
        EmptyInputError: If the input has no header or no data rows.
        RecordParseError: For a bad header or malformed row; names the line.

    Example:
        >>> records = parse_records(b"year,district,hour,cause,casualties\\n2019,Barishal,,Overloading,\\n")
        >>> records[0].district, records[0].hour
        ('barishal', None)
    """
    rows = iter(_rows(_read_text(source)))
    first = next(rows, None)
    if first is None:
        raise EmptyInputError("record input is empty")
    _check_header(first[1], RECORD_HEADER, first[0])

    records = [_parse_row(cells, line, aliases) for line, cells in rows]
    if not records:
        raise EmptyInputError("record input has a header but no data rows")
    logger.info("Parsed accident records", count=len(records))
    return records


def read_records(path: str | Path, aliases: Mapping[str, Cause] | None = None) -> list[AccidentRecord]:
    """Read and parse a record CSV file."""
    return parse_records(Path(path).read_bytes(), aliases)


def read_aliases(source: Source | Path) -> dict[str, Cause]:
    """Read an ``alias,canonical`` CSV into a normalized alias -> cause map.

    Raises:
        RecordParseError: For a bad header, wrong arity, empty alias or a
            canonical label that is not a cause.
    """
    if isinstance(source, Path):
        source = source.read_bytes()
    rows = iter(_rows(_read_text(source)))
    first = next(rows, None)
    if first is None:
        return {}
    _check_header(first[1], ALIAS_HEADER, first[0])

    aliases: dict[str, Cause] = {}
    for line, cells in rows:
        if len(cells) != 2:
            raise RecordParseError(f"expected 2 fields, got {len(cells)}", line=line)
        alias, canonical = (cell.strip() for cell in cells)
        if not normalize_label(alias):
            raise RecordParseError("alias is empty", line, "alias")
        cause = _CANONICAL.get(normalize_label(canonical))
        if cause is None:
            raise RecordParseError(f"unknown canonical cause '{canonical}'", line, "canonical")
        aliases[normalize_label(alias)] = cause
    logger.debug("Loaded cause aliases", count=len(aliases))
    return aliases


def aggregate(
    records: Sequence[AccidentRecord],
    window: YearWindow | None = None,
    labels: Sequence[str] = PREDICTOR_CAUSES,
) -> CauseYearMatrix:
    """Build the per-year cause matrix from records.

    Every year of the window gets a row, zero-filled when it has no records.
    The response counts all in-window records, ``Other`` included; predictor
    columns count records of their cause.

    Args:
        records: Parsed accident records.
        window: Study years (default: first to last record year).
        labels: Predictor causes, in column order.

    Raises:
        EmptyInputError: If there are no records (or none in the window).
        InsufficientDataError: If the window has fewer than ``len(labels) + 2`` years.
    """
    if not records:
        raise EmptyInputError("no records to aggregate")
    if window is None:
        years = [record.year for record in records]
        window = YearWindow(start=min(years), end=max(years))
    if window.length < len(labels) + 2:
        raise InsufficientDataError(
            f"window {window.start}-{window.end} has {window.length} years; "
            f"{len(labels)} predictors need at least {len(labels) + 2}"
        )

    inside = [record for record in records if window.contains(record.year)]
    if not inside:
        raise EmptyInputError(f"no records inside {window.start}-{window.end}")
    dropped = len(records) - len(inside)
    if dropped:
        logger.info("Records outside window dropped", dropped=dropped)

    frame = pd.DataFrame(
        {
            "year": [record.year for record in inside],
            "cause": [record.cause.value for record in inside],
        }
    )
    counts = pd.crosstab(frame["year"], frame["cause"]).reindex(
        index=window.years, columns=[cause.value for cause in Cause], fill_value=0
    )
    table = counts[[str(label) for label in labels]].copy()
    table[RESPONSE_COLUMN] = counts.sum(axis=1)
    table.index.name = "year"

    matrix = CauseYearMatrix.from_frame(table)
    logger.info(
        "Aggregated cause matrix",
        years=matrix.n_years,
        records=len(inside),
        window=f"{window.start}-{window.end}",
    )
    return matrix


def write_matrix_csv(matrix: CauseYearMatrix, sink: str | Path | TextIO) -> int:
    """Write the matrix CSV (``year,<predictors>,total``); returns the row count.

    Integral matrices are written as integers; anything else keeps full float
    precision so that reading back reproduces the matrix.
    """
    frame = matrix.to_frame()
    values = frame.to_numpy()
    if np.all(np.equal(np.mod(values, 1), 0)):
        frame = frame.astype(np.int64)
    frame.to_csv(sink, lineterminator="\n")
    return matrix.n_years


def read_matrix_csv(source: str | Path | TextIO, check_counts: bool = True) -> CauseYearMatrix:
    """Read a matrix CSV written by ``write_matrix_csv`` (or by hand).

    Args:
        source: Path or open text stream.
        check_counts: Validate count semantics (non-negative integers, no
            cause count above the yearly total).

    Raises:
        EmptyInputError: If the file has no rows.
        RecordParseError: If the header lacks ``year``/``total`` or a value is
            not numeric.
        ConsistencyError: If years are unordered or counts are inconsistent.
    """
    try:
        frame = pd.read_csv(source, float_precision="round_trip")
    except pd.errors.EmptyDataError as exc:
        raise EmptyInputError("matrix input is empty") from exc
    frame.columns = [str(column).strip() for column in frame.columns]
    if frame.empty:
        raise EmptyInputError("matrix input has a header but no rows")
    if frame.columns[0] != "year" or frame.columns[-1] != RESPONSE_COLUMN:
        raise RecordParseError(
            f"matrix header must start with 'year' and end with '{RESPONSE_COLUMN}'", line=1
        )
    for column in frame.columns:
        if not pd.api.types.is_numeric_dtype(frame[column]) or frame[column].isna().any():
            raise RecordParseError(f"column '{column}' has missing or non-numeric values", 1, column)

    try:
        matrix = CauseYearMatrix.from_frame(frame.set_index("year"))
    except ValidationError as exc:
        raise ConsistencyError(f"invalid matrix: {exc.errors()[0]['msg']}") from exc
    if check_counts:
        matrix.check_counts()
    logger.info("Read cause matrix", years=matrix.n_years, columns=matrix.columns)
    return matrix


def is_matrix_file(path: str | Path) -> bool:
    """Whether the first non-blank row is a matrix header (``year,...,total``)."""
    for _, cells in _rows(_read_text(Path(path).read_bytes())):
        header = [cell.strip().casefold() for cell in cells]
        return header[0] == "year" and header[-1] == RESPONSE_COLUMN
    return False


def load_matrix(
    path: str | Path,
    window: YearWindow | None = None,
    aliases: Mapping[str, Cause] | None = None,
) -> CauseYearMatrix:
    """Load a cause matrix from a record CSV or a ready matrix CSV.

    The file kind is recognised by its header: one starting with ``year`` and
    ending with ``total`` is a matrix; anything else is parsed as records.

    Raises:
        EmptyInputError: If no years remain inside ``window``.
    """
    path = Path(path)
    if not is_matrix_file(path):
        return aggregate(read_records(path, aliases), window)

    matrix = read_matrix_csv(path)
    if window is None:
        return matrix
    years = [year for year in matrix.years if window.contains(year)]
    if not years:
        raise EmptyInputError(f"matrix has no years inside {window.start}-{window.end}")
    return matrix.select_years(years)


def transform(
    matrix: CauseYearMatrix,
    kind: TransformKind,
    labels: Sequence[str] | None = None,
) -> CauseYearMatrix:
    """Apply ``log1p`` or ``sqrt`` to predictor columns; the response is untouched.

    Raises:
        DomainError: If a transformed value would be undefined.
    """
    if kind == "none":
        return matrix
    targets = set(labels) if labels is not None else set(matrix.columns)
    columns: dict[str, np.ndarray] = {}
    for label in matrix.columns:
        values = matrix.column(label)
        if label in targets:
            if kind == "sqrt" and np.any(values < 0):
                raise DomainError(f"sqrt of negative values in '{label}'")
            if kind == "log1p" and np.any(values <= -1):
                raise DomainError(f"log1p of values <= -1 in '{label}'")
            values = np.sqrt(values) if kind == "sqrt" else np.log1p(values)
        columns[label] = values
    logger.info("Transformed predictors", kind=kind, labels=sorted(targets))
    return CauseYearMatrix.from_columns(matrix.years, columns, matrix.response)


def split_holdout(matrix: CauseYearMatrix, count: int) -> tuple[CauseYearMatrix, list[int]]:
    """Split off the last ``count`` years.

    Returns:
        The matrix without those years, and the held-out years.

    Raises:
        ConsistencyError: If ``count`` is not in ``[1, n_years)``.
    """
    if not 1 <= count < matrix.n_years:
        raise ConsistencyError(f"holdout of {count} years does not fit {matrix.n_years} years")
    holdout = matrix.years[-count:]
    return matrix.select_years(matrix.years[:-count]), holdout
