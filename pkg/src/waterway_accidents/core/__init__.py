"""
Analysis core for Waterway Accidents.

Record ingestion, per-year aggregation, least-squares regression, model
diagnostics, best-subset selection and accident distributions.
"""

from waterway_accidents.core.config import settings
from waterway_accidents.core.logging import get_logger, setup_logging

__all__ = ["settings", "setup_logging", "get_logger"]
