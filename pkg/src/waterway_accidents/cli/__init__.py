"""
Command-line front end for Waterway Accidents.

Validates run flags and dispatches the analysis subcommands.
"""

from waterway_accidents.cli.config import Command, RunConfig
from waterway_accidents.cli.main import cli, main

__all__ = ["Command", "RunConfig", "cli", "main"]
