"""Command-line front end: ``run``, ``validate`` and ``list-presets``.

Exit codes: 0 success, 1 unexpected failure, 2 invalid config or sweep,
3 unknown preset.
"""

import argparse
import sys
from typing import List, Optional, Sequence, Tuple

from app.config import Settings
from app.exceptions import (
    ConfigValidationError,
    PolaritonError,
    SweepSpecError,
    UnknownPresetError,
)
from app.physics.polariton import DarkModeConvention
from app.sweeps.presets import PresetRegistry
from app.sweeps.runner import SweepRunner
from app.sweeps.schemas import (
    GridSpec,
    SweepKind,
    SweepSpec,
    build_sweep_spec,
    load_config,
    parse_quantity,
    resolved_summary,
)
from app.sweeps.writer import dump_json, write_outputs
from app.utils.logging import get_logger, setup_logging
from app.utils.metrics import config_validation_errors_total, export_metrics

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_UNKNOWN_PRESET = 3

PAPER_L_M = 3.77e-6
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        type=str.upper,
        choices=LOG_LEVELS,
        default="INFO",
        help="log level (default: INFO)",
    )
    common.add_argument("--metrics-file", default=None, help="write Prometheus metrics here")

    parser = argparse.ArgumentParser(
        prog="polariton-sweep",
        description="Cavity-polariton branches and polarization-mixed linear spectra.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser(
        "run", parents=[common], help="run a figure preset or a custom sweep"
    )
    run.add_argument("config", help="JSON config (or a sidecar from an earlier run)")
    run.add_argument(
        "target",
        help="preset name (see list-presets) or sweep kind: "
        + ", ".join(kind.value for kind in SweepKind),
    )
    run.add_argument("outdir", help="output directory")
    run.add_argument("--k", help="wavenumber grid START:STOP:COUNT[:UNIT], default unit 1/m")
    run.add_argument("--theta", help="angle grid START:STOP:COUNT[:UNIT], default unit rad")
    run.add_argument("--omega", help="frequency grid START:STOP:COUNT[:UNIT], default unit Hz")
    run.add_argument("--at-k", help="fixed wavenumber VALUE[:UNIT], default unit 1/m")
    run.add_argument(
        "--at-theta", help="fixed angle(s) V1[,V2,...][:UNIT], default unit rad"
    )
    run.add_argument("--branch", help="comma-separated branches: upper, middle, lower")
    run.add_argument("--drive", help="incident polarization: s, p or a_s,a_p")
    run.add_argument("--observables", help="comma-separated observables to emit")
    run.add_argument(
        "--convention",
        choices=[c.value for c in DarkModeConvention],
        help="dark-mode convention (presets for the angle series emit both by default)",
    )
    run.add_argument(
        "--unwrap-phases", action="store_true", help="add unwrapped phase columns"
    )
    run.add_argument(
        "--paper-L",
        type=float,
        default=None,
        metavar="METERS",
        help=f"override the mirror spacing (the published value is {PAPER_L_M:g} m)",
    )
    run.add_argument(
        "--workers", type=_positive_int, default=None, help="worker threads per sweep"
    )

    validate = commands.add_parser(
        "validate", parents=[common], help="validate a config and print it resolved"
    )
    validate.add_argument("config")
    validate.add_argument("--paper-L", type=float, default=None, metavar="METERS")

    commands.add_parser("list-presets", parents=[common], help="list figure presets")
    return parser


def _grid_overrides(args, kind: SweepKind) -> Optional[GridSpec]:
    grids = {
        "wavenumber": ("--k", args.k, "1/m"),
        "angle": ("--theta", args.theta, "rad"),
        "frequency": ("--omega", args.omega, "Hz"),
    }
    chosen = None
    for quantity, (flag, text, default_unit) in grids.items():
        if text is None:
            continue
        if quantity != kind.quantity:
            raise SweepSpecError(f"{flag} does not apply to {kind.value} sweeps")
        chosen = GridSpec.parse(text, default_unit)
    return chosen


def _parse_thetas(text: str) -> List[float]:
    values, _, unit = text.partition(":")
    suffix = f":{unit}" if unit else ""
    return [parse_quantity(value + suffix, "rad", "angle") for value in values.split(",")]


def _split(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [item.strip() for item in text.split(",") if item.strip()]


def resolve_target(args) -> Tuple[str, SweepSpec]:
    """The output name and the sweep a ``run`` invocation asks for.

    Raises:
        UnknownPresetError: If ``target`` is neither a preset nor a sweep kind
    """
    kinds = {kind.value: kind for kind in SweepKind}
    if args.target in kinds:
        kind = kinds[args.target]
        base = build_sweep_spec(kind=kind, grid=_grid_overrides(args, kind))
        name = args.target
    else:
        preset = PresetRegistry.get(args.target)
        base = preset.spec
        name = preset.name

    spec = base.with_overrides(
        grid=_grid_overrides(args, base.kind),
        k_per_m=parse_quantity(args.at_k, "1/m", "wavenumber") if args.at_k else None,
        thetas_rad=_parse_thetas(args.at_theta) if args.at_theta else None,
        branches=_split(args.branch),
        drive=args.drive,
        observables=_split(args.observables),
        conventions=[DarkModeConvention(args.convention)] if args.convention else None,
        unwrap_phases=True if args.unwrap_phases else None,
    )
    return name, spec


def cmd_run(args, settings: Settings) -> int:
    document = load_config(args.config)
    name, spec = resolve_target(args)

    runner = SweepRunner(
        document,
        paper_L=args.paper_L,
        worker_count=settings.worker_count,
        chunk_size=settings.chunk_size,
    )
    tables = runner.run(spec, name)
    write_outputs(
        args.outdir,
        name,
        tables,
        config=runner.effective_config,
        resolved=runner.resolved,
        spec=spec,
    )
    return EXIT_OK


def cmd_validate(args, settings: Settings) -> int:
    document = load_config(args.config)
    model = document.model(args.paper_L)
    damping = document.damping()
    payload = {
        "config": document.materialized(model).model_dump(mode="json"),
        "resolved": resolved_summary(model, damping),
    }
    sys.stdout.write(dump_json(payload))
    logger.info("config_validated", config=args.config, L_derived=model.L_derived)
    return EXIT_OK


def cmd_list_presets(args, settings: Settings) -> int:
    for preset in PresetRegistry.all():
        sys.stdout.write(f"{preset.name}\t{preset.spec.kind.value}\t{preset.description}\n")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "validate": cmd_validate,
    "list-presets": cmd_list_presets,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = Settings(
        log_level=args.log_level,
        worker_count=getattr(args, "workers", None) or 1,
        metrics_file=args.metrics_file,
    )
    setup_logging(settings.log_level)

    try:
        return COMMANDS[args.command](args, settings)
    except UnknownPresetError as e:
        logger.error("preset_unknown", target=getattr(args, "target", None), error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNKNOWN_PRESET
    except ConfigValidationError as e:
        config_validation_errors_total.inc()
        logger.error("config_validation_failed", config=args.config, problems=e.problems)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except PolaritonError as e:
        logger.error("run_rejected", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        logger.error("run_failed", command=args.command, error=str(e), exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        if settings.metrics_file:
            export_metrics(settings.metrics_file)
