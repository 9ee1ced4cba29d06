"""
Command-line entry point for Waterway Accidents.

Subcommands ingest records (or a ready yearly matrix), fit and diagnose
regression models, run best-subset selection, predict, and write histogram,
report and plot-data files. Every written file is listed in the summary with
its row count.

Exit codes: 0 success, 2 I/O or invalid flags, 3 parse, 4 no model, 5 schema.
"""

import argparse
import sys
from collections.abc import Callable, Sequence

from waterway_accidents import __version__
from waterway_accidents.cli.config import Command, RunConfig
from waterway_accidents.core import diagnostics, ols, selection
from waterway_accidents.core.config import settings
from waterway_accidents.core.errors import (
    AnalysisError,
    CollinearityError,
    ConsistencyError,
    DegenerateResponseError,
    EmptyInputError,
    InsufficientDataError,
)
from waterway_accidents.core.export import (
    ManifestEntry,
    OutputFormat,
    comparison_frame,
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
from waterway_accidents.core.ingest import (
    is_matrix_file,
    load_matrix,
    read_aliases,
    read_records,
    split_holdout,
    transform,
    write_matrix_csv,
)
from waterway_accidents.core.logging import get_logger, setup_logging
from waterway_accidents.core.models import (
    SYMBOLS,
    AccidentRecord,
    CauseYearMatrix,
    FitResult,
    HoldoutReport,
    LinearModel,
    ModelSpec,
    SelectionPolicy,
    SelectionReport,
)
from waterway_accidents.core.published import compare_selection
from waterway_accidents.core.spatiotemporal import district_distribution, hourly_distribution
from waterway_accidents.core.synthetic import generate_records, write_records_csv

logger = get_logger("cli")

Handler = Callable[[RunConfig], list[ManifestEntry]]


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="waterway-accidents",
        description="Inland waterway accident analysis: distributions, regression and model selection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="record CSV or yearly matrix CSV")
    common.add_argument("--from-year", type=int, help="first study year")
    common.add_argument("--to-year", type=int, help="last study year")
    common.add_argument("--aliases", help="alias,canonical CSV mapping extra cause labels")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="output formats")
    common.add_argument("--log-level", help="override WATERWAY_LOG_LEVEL for this run")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--alpha", type=float, help="significance level of the F gate")
    model.add_argument("--vif-threshold", type=float, help="VIF cut-off (default 5.0)")
    model.add_argument(
        "--transform", choices=["none", "log1p", "sqrt"], help="predictor transformation"
    )
    model.add_argument("--holdout", type=int, help="trailing years for the error check")
    model.add_argument(
        "--in-sample-holdout",
        action="store_true",
        default=None,
        help="fit on every year and compare the holdout years in-sample",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser(
        Command.HISTOGRAM, parents=[common], help="district and hourly distributions"
    )
    fit = subparsers.add_parser(Command.FIT, parents=[common, model], help="fit one model")
    fit.add_argument("--predictors", help="comma-separated labels or symbols (default: all)")
    diagnose = subparsers.add_parser(
        Command.DIAGNOSE, parents=[common, model], help="VIF, relevancy and residual checks"
    )
    diagnose.add_argument("--predictors", help="comma-separated labels or symbols (default: all)")
    for name, help_text in (
        (Command.SELECT, "best-subset model selection"),
        (Command.REPORT, "every output into one directory"),
    ):
        sub = subparsers.add_parser(name, parents=[common, model], help=help_text)
        sub.add_argument("--policy", choices=[p.value for p in SelectionPolicy])
        sub.add_argument(
            "--compare-published",
            action="store_true",
            default=None,
            help="compare the run with the published tables",
        )
    predict = subparsers.add_parser(
        Command.PREDICT, parents=[common, model], help="predict from a model file"
    )
    predict.add_argument("--model", help="model JSON written by fit or select")
    predict.add_argument(
        "--set", action="append", metavar="LABEL=VALUE", help="predictor value (repeatable)"
    )
    synthesize = subparsers.add_parser(
        Command.SYNTHESIZE, parents=[common], help="write a synthetic record CSV"
    )
    synthesize.add_argument("--seed", type=int, help="generator seed (default 0)")
    return parser


def _load_matrix(config: RunConfig) -> CauseYearMatrix:
    aliases = read_aliases(config.aliases) if config.aliases else None
    matrix = load_matrix(config.input, config.window, aliases)
    if config.window is None and (config.from_year is not None or config.to_year is not None):
        start = config.from_year if config.from_year is not None else matrix.years[0]
        end = config.to_year if config.to_year is not None else matrix.years[-1]
        years = [year for year in matrix.years if start <= year <= end]
        if not years:
            raise EmptyInputError(f"no data between {start} and {end}")
        matrix = matrix.select_years(years)
    return transform(matrix, config.transform)


def _load_records(config: RunConfig) -> list[AccidentRecord]:
    aliases = read_aliases(config.aliases) if config.aliases else None
    records = read_records(config.input, aliases)
    start = config.from_year if config.from_year is not None else min(r.year for r in records)
    end = config.to_year if config.to_year is not None else max(r.year for r in records)
    inside = [record for record in records if start <= record.year <= end]
    if not inside:
        raise EmptyInputError(f"no records between {start} and {end}")
    return inside


def _resolve_label(text: str, labels: Sequence[str]) -> str:
    """Accept a label or its symbol (``C``, ``SW``, ...)."""
    if text in labels:
        return text
    for label in labels:
        if SYMBOLS.get(label, "").casefold() == text.casefold() or label.casefold() == text.casefold():
            return label
    raise ConsistencyError(f"unknown predictor '{text}'; expected one of {list(labels)}")


def _predictor_labels(config: RunConfig, matrix: CauseYearMatrix) -> list[str]:
    if config.predictors is None:
        return list(matrix.columns)
    return [_resolve_label(text, matrix.columns) for text in config.predictors]


def _split(config: RunConfig, matrix: CauseYearMatrix) -> tuple[CauseYearMatrix, list[int]]:
    """Return the fitting matrix and the holdout years."""
    if config.holdout == 0:
        return matrix, []
    if not config.in_sample_holdout:
        return split_holdout(matrix, config.holdout)
    if config.holdout >= matrix.n_years:
        raise ConsistencyError(
            f"holdout of {config.holdout} years does not fit {matrix.n_years} years"
        )
    return matrix, matrix.years[-config.holdout :]


def _write_holdout(config: RunConfig, report: HoldoutReport) -> list[ManifestEntry]:
    written: list[ManifestEntry] = []
    if config.format.wants_csv:
        written.append(write_frame(holdout_frame(report), config.out / "holdout.csv"))
    if config.format.wants_json:
        written.append(write_document(report, config.out / "holdout.json"))
    return written


def _print_holdout(report: HoldoutReport) -> None:
    for entry in report.entries:
        error = "undefined" if entry.percent_error is None else f"{entry.percent_error:.2f}%"
        print(f"{entry.year}: actual {entry.actual:g}, predicted {entry.predicted:.3f}, error {error}")
    if report.max_percent_error is not None:
        print(f"max error: {report.max_percent_error:.2f}%")


def cmd_histogram(config: RunConfig) -> list[ManifestEntry]:
    """Write district and hourly distributions and their plot bundle."""
    records = _load_records(config)
    districts = district_distribution(records)
    hours = hourly_distribution(records)

    written: list[ManifestEntry] = []
    if config.format.wants_csv:
        written.append(write_frame(district_frame(districts), config.out / "district.csv"))
        written.append(write_frame(hourly_frame(hours), config.out / "hourly.csv"))
    if config.format.wants_json:
        written.append(
            write_document(histogram_bundle(districts, hours), config.out / "histograms.json")
        )

    busiest = ", ".join(f"{name} ({count})" for name, count in districts.top(3))
    print(f"records: {districts.total}, districts: {districts.district_count}")
    print(f"busiest: {busiest}")
    print(
        f"am: {hours.am_total}, pm: {hours.pm_total}, 10-16: {hours.peak_window_total}, "
        f"18-24: {hours.evening_window_total}, unknown time: {hours.unknown}"
    )
    return written


def _fit(config: RunConfig, matrix: CauseYearMatrix, labels: Sequence[str]) -> FitResult:
    """Fit ``labels`` with Cp taken against the model on every matrix column.

    Cp is left unset when that reference model cannot be fitted.
    """
    full_model_mse = None
    try:
        full = ols.fit(
            matrix,
            ModelSpec(predictor_labels=tuple(matrix.columns)),
            alpha=config.alpha,
            compute_vif=False,
        )
        full_model_mse = full.mse if full.mse > 0 else None
    except (CollinearityError, DegenerateResponseError, InsufficientDataError) as exc:
        logger.warning("No reference model for Cp", error=str(exc))
    return ols.fit(
        matrix,
        ModelSpec(predictor_labels=tuple(labels)),
        full_model_mse=full_model_mse,
        alpha=config.alpha,
    )


def cmd_fit(config: RunConfig) -> list[ManifestEntry]:
    """Fit one model and report its statistics."""
    matrix = _load_matrix(config)
    training, holdout_years = _split(config, matrix)
    fit = _fit(config, training, _predictor_labels(config, matrix))

    written: list[ManifestEntry] = []
    if config.format.wants_csv:
        written.append(write_frame(fit_frame(fit), config.out / "fit.csv"))
    if config.format.wants_json:
        written.append(write_document(fit, config.out / "fit.json"))

    print(ols.format_equation(fit))
    print(
        f"R2 = {fit.r2:.4f}, adj R2 = {fit.r2_adj:.4f}, s = {fit.s:.4f}, MSE = {fit.mse:.4f}, "
        f"F = {fit.f_stat:.4f} (critical {fit.f_critical:.4f}), "
        f"Cp = {'NA' if fit.cp is None else f'{fit.cp:.4f}'}"
    )
    if holdout_years:
        report = ols.holdout_error(matrix, fit, holdout_years)
        _print_holdout(report)
        written += _write_holdout(config, report)
    return written


def cmd_diagnose(config: RunConfig) -> list[ManifestEntry]:
    """Run the VIF, relevancy and residual checks on the full model."""
    matrix = _load_matrix(config)
    labels = _predictor_labels(config, matrix)
    vif_report = diagnostics.vif(matrix, labels, config.vif_threshold)
    relevancy = diagnostics.relevancy(matrix, labels)
    fit = ols.fit(matrix, ModelSpec(predictor_labels=tuple(labels)), alpha=config.alpha)
    residuals = diagnostics.residual_analysis(fit, matrix)

    written: list[ManifestEntry] = []
    if config.format.wants_csv:
        written.append(write_frame(vif_frame(vif_report), config.out / "vif.csv"))
        written.append(write_frame(relevancy_frame(relevancy), config.out / "relevancy.csv"))
        written.append(write_frame(residual_frame(residuals), config.out / "residuals.csv"))
    if config.format.wants_json:
        bundle = diagnostics_bundle(relevancy, residuals)
        bundle["vif"] = vif_report.model_dump(mode="json")
        written.append(write_document(bundle, config.out / "diagnostics.json"))

    for label in labels:
        flag = " (flagged)" if label in vif_report.flagged else ""
        print(f"VIF {label}: {vif_report.values[label]:.4f}{flag}")
    for entry in relevancy.entries:
        print(f"R {entry.label}: {entry.multiple_r:.4f}")
    for label in relevancy.undefined:
        print(f"R {label}: undefined")
    runs = residuals.runs
    if runs.degenerate:
        print("residual runs: degenerate")
    else:
        verdict = "random" if runs.passed else "structured"
        print(f"residual runs: {runs.runs} (expected {runs.expected_runs:.2f}, z = {runs.z_score:.4f}, {verdict})")
    return written


def _write_selection(config: RunConfig, report: SelectionReport) -> list[ManifestEntry]:
    best = report.best_fit
    model = LinearModel(spec=best.spec, intercept=best.intercept, coefficients=best.coefficients)
    written: list[ManifestEntry] = []
    if config.format.wants_csv:
        written.append(
            write_frame(selection.selection_table(report), config.out / "selection.csv", index=True)
        )
        written.append(
            write_frame(
                selection.selection_table(report, include_all=True),
                config.out / "candidates.csv",
                index=True,
            )
        )
    if config.format.wants_json:
        written.append(write_document(report, config.out / "selection.json"))
    written.append(write_document(model, config.out / "model.json"))
    if config.compare_published:
        written.append(
            write_frame(comparison_frame(compare_selection(report)), config.out / "published.csv")
        )
    return written


def _print_selection(report: SelectionReport) -> None:
    best = report.best_fit
    if report.excluded:
        print(f"excluded by VIF: {', '.join(report.excluded)}")
    for size, spec in sorted(report.best_by_size.items(), reverse=True):
        fit = report.fit_for(spec)
        print(f"{size} variables: {spec.name} R2 = {fit.r2:.4f}, adj R2 = {fit.r2_adj:.4f}")
    print(f"best fit ({report.policy.value}): {ols.format_equation(best)}")


def cmd_select(config: RunConfig) -> list[ManifestEntry]:
    """Run best-subset selection and write the report."""
    matrix = _load_matrix(config)
    training, holdout_years = _split(config, matrix)
    report = selection.run_pipeline(
        training,
        policy=config.policy,
        alpha=config.alpha,
        vif_threshold=config.vif_threshold,
    )
    _print_selection(report)
    written = _write_selection(config, report)
    if holdout_years:
        holdout = ols.holdout_error(matrix, report.best_fit, holdout_years)
        _print_holdout(holdout)
        written += _write_holdout(config, holdout)
    return written


def _resolve_values(model: LinearModel, values: dict[str, float]) -> dict[str, float]:
    labels = list(model.spec.predictor_labels)
    return {_resolve_label(text, labels): value for text, value in values.items()}


def cmd_predict(config: RunConfig) -> list[ManifestEntry]:
    """Predict from a model file, and check it against actual totals when given."""
    model = read_model(config.model)
    written: list[ManifestEntry] = []
    if config.values:
        print(f"{ols.predict(model, _resolve_values(model, config.values)):.3f}")
    if config.input is not None:
        matrix = _load_matrix(config)
        years = matrix.years[-config.holdout :] if config.holdout else list(matrix.years)
        report = ols.holdout_error(matrix, model, years)
        _print_holdout(report)
        written += _write_holdout(config, report)
    return written


def cmd_report(config: RunConfig) -> list[ManifestEntry]:
    """Write every analysis output into one directory."""
    written: list[ManifestEntry] = []
    matrix = _load_matrix(config)
    if not is_matrix_file(config.input):
        written += cmd_histogram(config)
    config.out.mkdir(parents=True, exist_ok=True)
    path = config.out / "matrix.csv"
    written.append(ManifestEntry(path=path, rows=write_matrix_csv(matrix, path)))
    written += cmd_diagnose(config)
    written += cmd_select(config)
    return written


def cmd_synthesize(config: RunConfig) -> list[ManifestEntry]:
    """Write a synthetic record CSV for the requested years."""
    window = config.synthetic_window
    records = generate_records(window.years, seed=config.seed)
    config.out.mkdir(parents=True, exist_ok=True)
    path = config.out / "records.csv"
    rows = write_records_csv(records, path)
    print(f"synthetic records: {rows} over {window.start}-{window.end} (seed {config.seed})")
    return [ManifestEntry(path=path, rows=rows)]


COMMANDS: dict[Command, Handler] = {
    Command.HISTOGRAM: cmd_histogram,
    Command.FIT: cmd_fit,
    Command.DIAGNOSE: cmd_diagnose,
    Command.SELECT: cmd_select,
    Command.PREDICT: cmd_predict,
    Command.REPORT: cmd_report,
    Command.SYNTHESIZE: cmd_synthesize,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = RunConfig.from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    setup_logging(
        level=config.log_level or settings.log_level,
        json_output=settings.log_json,
        log_file=settings.log_file,
    )
    logger.info("Running command", command=config.command.value)
    try:
        written = COMMANDS[config.command](config)
    except AnalysisError as exc:
        logger.error("Command failed", command=config.command.value, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        for line in getattr(exc, "diagnostics", []):
            print(f"  {line}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O failure", command=config.command.value, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for entry in written:
        print(entry.line())
    return 0


def cli() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    cli()
