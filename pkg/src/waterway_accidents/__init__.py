"""
Waterway Accidents.

Inland waterway accident analysis: cause matrices, best-subset regression
and distribution reports.
"""

__version__ = "0.1.0"
