"""
Pytest fixtures and configuration for the test suite.

Provides shared fixtures for accident records, cause matrices with known
generating coefficients, and record files on disk.
"""

from pathlib import Path

import pytest

from waterway_accidents.core.models import AccidentRecord, Cause, CauseYearMatrix

RECORD_CSV = b"""year,district,hour,cause,casualties
2015,Dhaka,14,Collision,32
2015,Barishal,10,Grounding,0
2015, dhaka ,,Collision,
2016,Chattogram,20,Stormy Weather,4
2016,Barishal,11,Overloading,12
2017,Khulna,unknown,Other,unknown
"""


@pytest.fixture
def record_csv() -> bytes:
    """Six records over 2015-2017 in the input CSV format.

    Returns:
        Raw CSV bytes.
    """
    return RECORD_CSV


@pytest.fixture
def record_file(tmp_path: Path) -> Path:
    """Write the sample record CSV to a temporary file.

    Returns:
        Path to the CSV file.
    """
    path = tmp_path / "records.csv"
    path.write_bytes(RECORD_CSV)
    return path


@pytest.fixture
def sample_records() -> list[AccidentRecord]:
    """Build a small record list spanning two years and three districts.

    Returns:
        List of accident records.
    """
    return [
        AccidentRecord(year=2015, district="Dhaka", hour=14, cause=Cause.COLLISION, casualties=32),
        AccidentRecord(year=2015, district="dhaka", hour=10, cause=Cause.COLLISION),
        AccidentRecord(year=2015, district="Khulna", hour=None, cause=Cause.GROUNDING),
        AccidentRecord(year=2016, district="Barishal", hour=15, cause=Cause.OTHER),
        AccidentRecord(year=2016, district="khulna", hour=22, cause=Cause.OVERLOADING),
    ]


@pytest.fixture
def exact_matrix() -> CauseYearMatrix:
    """Matrix whose response is exactly ``1 + 2*x1 + 3*x2``.

    Returns:
        Cause matrix with predictors ``x1`` and ``x2`` over 8 years.
    """
    x1 = [1.0, 3.0, 2.0, 5.0, 4.0, 6.0, 8.0, 7.0]
    x2 = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0, 5.0, 9.0]
    response = [1 + 2 * a + 3 * b for a, b in zip(x1, x2, strict=True)]
    return CauseYearMatrix.from_columns(range(2000, 2008), {"x1": x1, "x2": x2}, response)


@pytest.fixture
def study_matrix() -> CauseYearMatrix:
    """A 25-year, five-cause matrix with noise, shaped like the study period.

    Returns:
        Cause matrix over 1995-2019 with the five predictor causes.
    """
    from waterway_accidents.core.synthetic import linear_matrix

    return linear_matrix(
        n=25,
        coefficients={
            Cause.COLLISION.value: 1.1,
            Cause.STORMY_WEATHER.value: 1.5,
            Cause.EXCESSIVE_CURRENT.value: 0.8,
            Cause.GROUNDING.value: 0.8,
            Cause.OVERLOADING.value: 2.1,
        },
        intercept=0.8,
        noise_sd=2.0,
        seed=7,
    )
