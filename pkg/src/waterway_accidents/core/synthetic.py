"""
Reproducible synthetic data.

Stand-in accident records with a realistic district, hour and cause mix, and
controlled linear matrices for regression checks. Everything is driven by a
seeded ``numpy.random.Generator``; the same seed gives the same output.
"""

import csv
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import TextIO

import numpy as np

from waterway_accidents.core.errors import EmptyInputError
from waterway_accidents.core.ingest import RECORD_HEADER
from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import AccidentRecord, Cause, CauseYearMatrix

logger = get_logger("synthetic")

# Mean accidents per year by cause.
DEFAULT_CAUSE_RATES: dict[Cause, float] = {
    Cause.COLLISION: 9.0,
    Cause.STORMY_WEATHER: 3.0,
    Cause.EXCESSIVE_CURRENT: 2.0,
    Cause.GROUNDING: 1.5,
    Cause.OVERLOADING: 1.5,
    Cause.OTHER: 4.0,
}

# Busiest routes first; weights fall off with rank.
DEFAULT_DISTRICTS: tuple[str, ...] = (
    "barishal",
    "chattogram",
    "dhaka",
    "chandpur",
    "bhola",
    "patuakhali",
    "munshiganj",
    "narayanganj",
    "khulna",
    "pirojpur",
    "sylhet",
    "sunamganj",
)

YEAR_EFFECT_SIGMA = 0.35


def hour_profile() -> np.ndarray:
    """Return hour-of-day probabilities: daytime peak 10-16, evening secondary mass."""
    weights = np.ones(24)
    weights[0:6] = 0.4
    weights[10:16] = 3.0
    weights[18:24] = 1.8
    return weights / weights.sum()


def generate_records(
    years: Sequence[int],
    seed: int = 0,
    cause_rates: Mapping[Cause, float] | None = None,
    districts: Sequence[str] = DEFAULT_DISTRICTS,
    unknown_hour_share: float = 0.3,
    unknown_casualty_share: float = 0.2,
) -> list[AccidentRecord]:
    """Draw accident records for ``years``.

    Per year and cause the count is Poisson with the cause rate scaled by a
    log-normal year effect, so each cause column varies on its own.

    Args:
        years: Years to generate, in output order.
        seed: Generator seed.
        cause_rates: Mean yearly count per cause (default ``DEFAULT_CAUSE_RATES``).
        districts: District names, busiest first.
        unknown_hour_share: Probability a record has no time of day.
        unknown_casualty_share: Probability a record has no casualty count.

    Raises:
        EmptyInputError: If ``years`` or ``districts`` is empty.
    """
    if not years:
        raise EmptyInputError("no years to generate records for")
    if not districts:
        raise EmptyInputError("no districts to draw from")
    rates = dict(cause_rates or DEFAULT_CAUSE_RATES)
    rng = np.random.default_rng(seed)

    district_weights = 1.0 / np.arange(1, len(districts) + 1)
    district_weights /= district_weights.sum()
    hours = hour_profile()

    records: list[AccidentRecord] = []
    for year in years:
        for cause, rate in rates.items():
            effect = rng.lognormal(mean=0.0, sigma=YEAR_EFFECT_SIGMA)
            count = int(rng.poisson(rate * effect))
            for _ in range(count):
                hour = None
                if rng.random() >= unknown_hour_share:
                    hour = int(rng.choice(24, p=hours))
                casualties = None
                if rng.random() >= unknown_casualty_share:
                    casualties = int(rng.poisson(3.0))
                records.append(
                    AccidentRecord(
                        year=year,
                        district=districts[int(rng.choice(len(districts), p=district_weights))],
                        hour=hour,
                        cause=cause,
                        casualties=casualties,
                    )
                )
    logger.info("Generated synthetic records", count=len(records), years=len(years), seed=seed)
    return records


def linear_matrix(
    n: int,
    coefficients: Mapping[str, float],
    intercept: float = 0.0,
    noise_sd: float = 0.0,
    seed: int = 0,
    noise_predictors: int = 0,
    first_year: int = 1995,
) -> CauseYearMatrix:
    """Build a matrix whose response is a known linear function of its predictors.

    Predictors named in ``coefficients`` are uniform on [0, 10]; each extra
    ``noise_<i>`` predictor is uniform on [0, 1] and absent from the response.
    The response is ``intercept + sum(b_i * x_i)`` plus N(0, noise_sd) noise.
    """
    rng = np.random.default_rng(seed)
    columns: dict[str, np.ndarray] = {
        label: rng.uniform(0.0, 10.0, size=n) for label in coefficients
    }
    for index in range(noise_predictors):
        columns[f"noise_{index + 1}"] = rng.uniform(0.0, 1.0, size=n)

    response = np.full(n, float(intercept))
    for label, coefficient in coefficients.items():
        response += coefficient * columns[label]
    if noise_sd > 0:
        response += rng.normal(0.0, noise_sd, size=n)

    return CauseYearMatrix.from_columns(range(first_year, first_year + n), columns, response)


def write_records_csv(records: Sequence[AccidentRecord], sink: str | Path | TextIO) -> int:
    """Write records in the input CSV format; unknown fields are left empty.

    Returns:
        Number of data rows written.
    """
    if isinstance(sink, str | Path):
        with Path(sink).open("w", encoding="utf-8", newline="") as handle:
            return write_records_csv(records, handle)

    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(RECORD_HEADER)
    for record in records:
        writer.writerow(
            [
                record.year,
                record.district,
                "" if record.hour is None else record.hour,
                record.cause.value,
                "" if record.casualties is None else record.casualties,
            ]
        )
    return len(records)
