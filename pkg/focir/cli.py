"""
Command-line front end.

    focir simulate  --model <json> --input <csv> [--out <csv>]
    focir coeffs    --model <json> [--horizon T] [--out <json>]
    focir identify  --coeffs <json> [--tol <real>] [--out <json>]
    focir roundtrip --model <json> [--horizon T] [--tol <real>] [--out <json>]
    focir serve

Exit codes: 0 success, 1 round-trip tolerance failure, 2 input error, 3 inversion failure.
"""
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from focir import __version__
from focir.config import Settings, settings
from focir.errors import (
    DimensionError,
    DomainError,
    InconsistentCoefficientsError,
    InputError,
    SingularStructureError,
    UnsupportedStructureError,
)
from focir.models import CoefficientFileSchema, IdentifyReport, RoundtripReport
from focir.services.ecm_models import to_state_space
from focir.services.ident_engine import IdentificationService
from focir.services.ss_sim import simulate
from focir.services.tf_builder import coefficient_map
from focir.utils.signals import (
    dump_json,
    format_trace,
    load_coefficients,
    load_model,
    load_run_config,
    read_signal,
    trace_frame,
    write_text,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_INPUT = 2
EXIT_INVERSION = 3

LOG_LEVELS: Dict[str, int] = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def configure_logging(level_name: str) -> None:
    """Send diagnostics to standard error at the FOCIR_LOG level."""
    level = LOG_LEVELS.get(level_name.strip().lower())
    logging.basicConfig(
        level=level or logging.ERROR,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if level is None:
        logger.warning(f"Unknown log level '{level_name}', using 'error'. Options: {', '.join(LOG_LEVELS)}")


def cmd_simulate(args: argparse.Namespace, cfg: Settings) -> int:
    params = load_model(args.model).to_params()
    frame = read_signal(args.input, params.ts, cfg.sampling_rtol)
    current = frame["current"].to_numpy()
    system = to_state_space(params, max(current.size - 1, 1))
    trace = simulate(system, current, window=cfg.window)
    output_format = args.format or cfg.output_format
    write_text(format_trace(trace_frame(frame["time"].to_numpy(), trace), output_format), args.out)
    return EXIT_OK


def cmd_coeffs(args: argparse.Namespace, cfg: Settings) -> int:
    params = load_model(args.model).to_params()
    T = args.horizon or cfg.horizon
    c = coefficient_map(params, T)
    write_text(dump_json(CoefficientFileSchema.from_vector(c)), args.out)
    return EXIT_OK


def cmd_identify(args: argparse.Namespace, cfg: Settings) -> int:
    if args.tol is not None:
        cfg = cfg.model_copy(update={"residual_tol": args.tol})
    c = load_coefficients(args.coeffs).to_vector()
    result = IdentificationService(cfg).identify(c)
    write_text(dump_json(IdentifyReport.from_result(result, c)), args.out)
    return EXIT_OK


def cmd_roundtrip(args: argparse.Namespace, cfg: Settings) -> int:
    params = load_model(args.model).to_params()
    T = args.horizon or cfg.horizon
    tol = cfg.roundtrip_tol if args.tol is None else args.tol
    audit = IdentificationService(cfg).roundtrip(params, T, tol=tol)
    report = RoundtripReport.from_audit(audit, tol)
    write_text(dump_json(report), args.out)
    if not report.passed:
        print(
            f"Round trip failed: max relative parameter error {report.max_rel_error:.3e} exceeds {tol:g}",
            file=sys.stderr,
        )
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, cfg: Settings) -> int:
    import uvicorn

    uvicorn.run("focir.main:app", host=args.host or cfg.host, port=args.port or cfg.port, reload=cfg.debug)
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"horizon must be at least 2, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="focir",
        description="Fractional-order circuit simulation and structural identifiability",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON run configuration (horizon, tolerances, output_format, window)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Simulate the terminal voltage for a current signal")
    p.add_argument("--model", required=True, help="Model JSON file")
    p.add_argument("--input", required=True, help="CSV with header time,current")
    p.add_argument("--out", help="Output file (standard output when omitted)")
    p.add_argument("--format", choices=["csv", "json"], help="Trace format")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("coeffs", help="Transfer-function coefficients of a model")
    p.add_argument("--model", required=True, help="Model JSON file")
    p.add_argument("--horizon", type=_positive_int, help="Horizon T (data length)")
    p.add_argument("--out", help="Output JSON file (standard output when omitted)")
    p.set_defaults(handler=cmd_coeffs)

    p = sub.add_parser("identify", help="Recover parameters from transfer-function coefficients")
    p.add_argument("--coeffs", required=True, help="Coefficient JSON file")
    p.add_argument("--tol", type=_positive_float, help="Residual tolerance for accepting a solution")
    p.add_argument("--out", help="Output JSON file (standard output when omitted)")
    p.set_defaults(handler=cmd_identify)

    p = sub.add_parser("roundtrip", help="Coefficient map followed by inversion, checked against the model")
    p.add_argument("--model", required=True, help="Model JSON file")
    p.add_argument("--horizon", type=_positive_int, help="Horizon T (data length)")
    p.add_argument("--tol", type=_positive_float, help="Allowed max relative parameter error")
    p.add_argument("--out", help="Output JSON report (standard output when omitted)")
    p.set_defaults(handler=cmd_roundtrip)

    p = sub.add_parser("serve", help="Run the HTTP API")
    p.add_argument("--host", help="Bind address")
    p.add_argument("--port", type=int, help="Port")
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(settings.log)
    handler: Callable[[argparse.Namespace, Settings], int] = args.handler

    try:
        cfg = settings if args.config is None else load_run_config(args.config).apply(settings)
        return handler(args, cfg)
    except (InputError, ValidationError, DomainError, DimensionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InconsistentCoefficientsError, SingularStructureError, UnsupportedStructureError) as e:
        print(f"inversion failed ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_INVERSION


if __name__ == "__main__":
    sys.exit(main())
