"""
District-wise and hourly accident distributions.
"""

from collections import Counter
from collections.abc import Sequence

from waterway_accidents.core.errors import EmptyInputError
from waterway_accidents.core.logging import get_logger
from waterway_accidents.core.models import AccidentRecord, DistrictHistogram, HourlyHistogram

logger = get_logger("spatiotemporal")


def district_distribution(records: Sequence[AccidentRecord]) -> DistrictHistogram:
    """Count accidents per normalized district, busiest first.

    Raises:
        EmptyInputError: If ``records`` is empty.
    """
    if not records:
        raise EmptyInputError("no records to distribute by district")
    histogram = DistrictHistogram.from_counts(Counter(record.district for record in records))
    logger.info(
        "District distribution",
        districts=histogram.district_count,
        busiest=histogram.top(2),
    )
    return histogram


def hourly_distribution(records: Sequence[AccidentRecord]) -> HourlyHistogram:
    """Count accidents per hour of day; records without a time go to ``unknown``.

    Raises:
        EmptyInputError: If ``records`` is empty.
    """
    if not records:
        raise EmptyInputError("no records to distribute by hour")
    bins = [0] * 24
    unknown = 0
    for record in records:
        if record.hour is None:
            unknown += 1
        else:
            bins[record.hour] += 1
    histogram = HourlyHistogram(bins=bins, unknown=unknown)
    if unknown:
        logger.info("Records without time of day", unknown=unknown, total=histogram.total)
    return histogram
