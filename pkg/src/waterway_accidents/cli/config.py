"""
Run configuration for the command line.

Analysis parameters come from flags only; ``RunConfig`` validates them once
so command handlers can trust every field.
"""

import argparse
from enum import StrEnum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from waterway_accidents.core.export import OutputFormat
from waterway_accidents.core.ingest import TransformKind
from waterway_accidents.core.models import SelectionPolicy, YearWindow

DEFAULT_SYNTHETIC_YEARS = (1995, 2019)


class Command(StrEnum):
    HISTOGRAM = "histogram"
    FIT = "fit"
    DIAGNOSE = "diagnose"
    SELECT = "select"
    PREDICT = "predict"
    REPORT = "report"
    SYNTHESIZE = "synthesize"


INPUT_COMMANDS = frozenset(
    {Command.HISTOGRAM, Command.FIT, Command.DIAGNOSE, Command.SELECT, Command.REPORT}
)


class RunConfig(BaseModel):
    """Validated parameters of one command invocation.

    Attributes:
        command: Subcommand to run.
        input: Record CSV or matrix CSV.
        from_year: First study year (default: first year in the data).
        to_year: Last study year (default: last year in the data).
        alpha: Significance level of the F gate.
        vif_threshold: Multicollinearity cut-off.
        policy: Ranking policy for model selection.
        holdout: Number of trailing years used for the prediction-error check.
        out: Output directory.
        format: Which file formats to write.
    """

    model_config = ConfigDict(frozen=True)

    command: Command
    input: Path | None = None
    from_year: int | None = None
    to_year: int | None = None
    alpha: float = Field(default=0.05, gt=0, lt=1)
    vif_threshold: float = Field(default=5.0, gt=1)
    policy: SelectionPolicy = SelectionPolicy.MAX_R2_FULL
    holdout: int = Field(default=3, ge=0)
    out: Path = Path("out")
    format: OutputFormat = OutputFormat.BOTH

    aliases: Path | None = None
    predictors: tuple[str, ...] | None = None
    transform: TransformKind = "none"
    in_sample_holdout: bool = False
    model: Path | None = None
    values: dict[str, float] = Field(default_factory=dict)
    compare_published: bool = False
    seed: int = 0
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] | None = None

    @field_validator("predictors")
    @classmethod
    def _non_empty_predictors(cls, predictors: tuple[str, ...] | None) -> tuple[str, ...] | None:
        if predictors is not None and not predictors:
            raise ValueError("--predictors needs at least one label")
        return predictors

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper_level(cls, level: str | None) -> str | None:
        return level.upper() if isinstance(level, str) else level

    @model_validator(mode="after")
    def _check_combination(self) -> "RunConfig":
        if self.command is Command.SYNTHESIZE:
            start, end = self._synthetic_bounds()
            if start > end:
                raise ValueError(f"synthetic years run backwards: {start} to {end}")
        if self.from_year is not None and self.to_year is not None:
            if self.from_year > self.to_year:
                raise ValueError("--from-year must not be after --to-year")
            uses_holdout = self.command not in (Command.HISTOGRAM, Command.SYNTHESIZE)
            if uses_holdout and self.holdout >= self.to_year - self.from_year + 1:
                raise ValueError("--holdout must be shorter than the year window")
        if self.command in INPUT_COMMANDS and self.input is None:
            raise ValueError(f"'{self.command}' needs --input")
        if self.command is Command.PREDICT:
            if self.model is None:
                raise ValueError("'predict' needs --model")
            if not self.values and self.input is None:
                raise ValueError("'predict' needs --set values or --input actuals")
        return self

    @property
    def window(self) -> YearWindow | None:
        """The year window when both bounds are given."""
        if self.from_year is None or self.to_year is None:
            return None
        return YearWindow(start=self.from_year, end=self.to_year)

    def _synthetic_bounds(self) -> tuple[int, int]:
        start, end = DEFAULT_SYNTHETIC_YEARS
        return (
            self.from_year if self.from_year is not None else start,
            self.to_year if self.to_year is not None else end,
        )

    @property
    def synthetic_window(self) -> YearWindow:
        start, end = self._synthetic_bounds()
        return YearWindow(start=start, end=end)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Build a config from parsed arguments; absent flags keep their defaults."""
        fields = {
            name: value
            for name, value in vars(args).items()
            if name in cls.model_fields and value is not None
        }
        if getattr(args, "predictors", None) is not None:
            fields["predictors"] = tuple(
                label.strip() for label in args.predictors.split(",") if label.strip()
            )
        if getattr(args, "set", None):
            fields["values"] = parse_assignments(args.set)
        return cls.model_validate(fields)


def parse_assignments(assignments: list[str]) -> dict[str, float]:
    """Parse ``LABEL=VALUE`` pairs.

    Raises:
        ValueError: If a pair has no ``=`` or a non-numeric value.

    Example:
        >>> parse_assignments(["C=10", "SW=2"])
        {'C': 10.0, 'SW': 2.0}
    """
    values: dict[str, float] = {}
    for item in assignments:
        label, sep, text = item.partition("=")
        if not sep or not label.strip():
            raise ValueError(f"expected LABEL=VALUE, got '{item}'")
        try:
            values[label.strip()] = float(text)
        except ValueError as exc:
            raise ValueError(f"value of '{label.strip()}' is not a number: '{text}'") from exc
    return values
