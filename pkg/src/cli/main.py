"""Command-line interface of the lab.

    wgm-lab cqed     [--config prysoA] [--out DIR] [--format json|text]
    wgm-lab modevol  [--profile-out FILE]
    wgm-lab echo     [--seed N]
    wgm-lab bistab
    wgm-lab run      {table1,cavity_qed_numbers,mode_volume,echo_suite,bistab_suite,heating}
    wgm-lab fit      DATA [--model {amp_2pe,int_2pe,pop_3pe,hole,hole_two_stage,pi_pulse,heating}]

Scenario commands write traces and ``report.json`` under ``--out`` (default
``WGM_LAB_OUTPUT_DIR``/<scenario>) and exit with 0 when every step ran and every
acceptance check passed, 1 otherwise and 2 on unusable input.

``fit`` reads the model from a ``# model: <name>`` header line of the data file;
``--model`` overrides it.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from src.config.settings import settings
from src.fitkit import fit_decay, fit_heating_quadratic, fit_pi_pulse, fit_two_stage_hole
from src.fitkit.schemas import FitResult
from src.model.config import ExperimentConfig
from src.model.errors import ConfigError, LabError
from src.model.loader import bundled_config, load_config
from src.scenarios import SCENARIOS, OutputStore, ScenarioReport, run_scenario
from src.scenarios.nodes import PROFILE_FILE
from src.scenarios.traces import read_header

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SHORTCUTS = {
    "cqed": "cavity_qed_numbers",
    "modevol": "mode_volume",
    "echo": "echo_suite",
    "bistab": "bistab_suite",
}
FIT_MODELS = ("amp_2pe", "int_2pe", "pop_3pe", "hole", "hole_two_stage", "pi_pulse", "heating")


def resolve_config(value: str | None) -> ExperimentConfig:
    """Load ``--config``: a YAML path or the name of a bundled config."""
    if value is None:
        return load_config(settings.default_config)
    path = Path(value)
    if path.exists() or path.suffix:
        return load_config(path)
    return load_config(bundled_config(value))


def format_report_text(report: ScenarioReport) -> str:
    """Human-readable summary of a scenario report."""
    lines = [f"scenario {report.scenario} (config {report.config_name}, seed {report.seed})"]
    for step in report.steps:
        lines.append(f"  [{step.status}] {step.name}" + (f": {step.note}" if step.note else ""))
        for key, value in step.outputs.items():
            shown = f"{value:.6g}" if isinstance(value, float) else value
            lines.append(f"      {key} = {shown}")
    if report.checks:
        lines.append("checks:")
        for check in report.checks:
            verdict = {True: "PASS", False: "FAIL", None: "----"}[check.passed]
            lines.append(f"  {verdict} {check.key} = {check.value!r} ({check.criterion})")
    for note in report.provenance:
        lines.append(f"note: {note}")
    lines.append(f"traces: {len(report.traces)} file(s); passed: {report.passed}")
    return "\n".join(lines)


def format_fit_text(fit: FitResult) -> str:
    lines = [f"model {fit.model_name}: converged={fit.converged}, residual={fit.residual_norm:.4g}"]
    for name, value in fit.parameters.items():
        error = (fit.standard_errors or {}).get(name)
        spread = "" if error is None else f" ± {error:.3g}"
        lines.append(f"  {name} = {value:.6g}{spread} {fit.units.get(name, '')}".rstrip())
    lines += [f"  flag: {flag}" for flag in fit.flags]
    return "\n".join(lines)


def run_fit(
    data: np.ndarray,
    model: str,
    hole_mode: str = "piecewise",
    positioner: bool = False,
    step_size: float | None = None,
) -> FitResult:
    """Fit a two-column series (x, y) with one of ``FIT_MODELS``."""
    x, y = data[:, 0], data[:, 1]
    if model == "pi_pulse":
        return fit_pi_pulse(x, y)
    if model == "hole_two_stage":
        return fit_two_stage_hole(x, y, mode=hole_mode)
    if model == "heating":
        if positioner:
            kwargs = {} if step_size is None else {"step_size": step_size}
            return fit_heating_quadratic(y, positioner_steps=x, **kwargs)
        return fit_heating_quadratic(y, distances=x)
    return fit_decay(x, y, model)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config path or bundled name (prysoA, prysoB, erYSO)")
    common.add_argument("--out", help="Output directory (default: WGM_LAB_OUTPUT_DIR/<scenario>)")
    common.add_argument("--seed", type=int, help="Seed for synthetic measurement noise")
    common.add_argument("--format", choices=("json", "text"), help="Report printed to stdout")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")

    parser = argparse.ArgumentParser(
        prog="wgm-lab",
        description="Cavity QED, photon echoes and bistability of rare-earth-doped WGM resonators.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("cqed", parents=[common], help="Cavity-QED rates and critical numbers")
    modevol = commands.add_parser("modevol", parents=[common], help="Fundamental-mode volume")
    modevol.add_argument("--profile-out", help="Also copy the radial ε|E|² profile here")
    commands.add_parser("echo", parents=[common], help="Simulated echo sweeps and fits")
    commands.add_parser("bistab", parents=[common], help="Bistability sweeps and g fit")

    run = commands.add_parser("run", parents=[common], help="Run a named scenario")
    run.add_argument("scenario", choices=sorted(SCENARIOS))

    fit = commands.add_parser("fit", parents=[common], help="Fit a two-column data file")
    fit.add_argument("data", help="Whitespace-delimited x and y columns, # header lines")
    fit.add_argument(
        "--model", choices=FIT_MODELS, help="Overrides the file's '# model: <name>' header"
    )
    fit.add_argument("--hole-mode", choices=("piecewise", "sum"), default="piecewise")
    fit.add_argument(
        "--positioner", action="store_true", help="heating: x column holds positioner steps"
    )
    fit.add_argument("--step-size", type=float, help="heating: metres per positioner step")
    return parser


def fit_model(args: argparse.Namespace, header: dict[str, str]) -> str:
    """Model named by ``--model``, else by the data file's ``model`` header.

    Raises:
        ConfigError: If neither names a model, or the header names an unknown one
    """
    model = args.model or header.get("model")
    if model is None:
        raise ConfigError(
            f"{args.data}: no fit model; add a '# model: <name>' header or pass --model"
        )
    if model not in FIT_MODELS:
        choices = ", ".join(FIT_MODELS)
        raise ConfigError(f"{args.data}: unknown fit model '{model}' (one of {choices})")
    return model


def _fit_command(args: argparse.Namespace, output_format: str) -> int:
    try:
        header = read_header(args.data)
        data = np.loadtxt(args.data, comments="#", ndmin=2)
    except (OSError, ValueError) as e:
        print(f"error: cannot read {args.data}: {e}", file=sys.stderr)
        return EXIT_USAGE
    if data.shape[1] < 2:
        print(f"error: {args.data} needs two columns", file=sys.stderr)
        return EXIT_USAGE

    model = fit_model(args, header)
    fit = run_fit(data, model, args.hole_mode, args.positioner, args.step_size)
    text = fit.model_dump_json(indent=2)
    if args.out:
        OutputStore(args.out).write_text(f"fit_{model}.json", text + "\n")
    print(text if output_format == "json" else format_fit_text(fit))
    return EXIT_OK if fit.converged else EXIT_FAILED


def _scenario_command(args: argparse.Namespace, output_format: str) -> int:
    scenario = args.scenario if args.command == "run" else SHORTCUTS[args.command]
    config = resolve_config(args.config)
    out = Path(args.out) if args.out else settings.output_path / scenario
    report = run_scenario(scenario, config, output_dir=out, seed=args.seed)

    solved = report.step("mode_volume")
    if getattr(args, "profile_out", None) and solved is not None and solved.status == "ok":
        OutputStore(out).copy_to(PROFILE_FILE, args.profile_out)
    text = report.to_json() if output_format == "json" else format_report_text(report) + "\n"
    sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, dispatch the subcommand and return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format=settings.log_format,
        stream=sys.stderr,
    )
    output_format = args.format or settings.report_format

    try:
        if args.command == "fit":
            return _fit_command(args, output_format)
        return _scenario_command(args, output_format)
    except LabError as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
