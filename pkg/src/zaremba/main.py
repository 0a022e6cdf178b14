import argparse
import logging
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from zaremba.bie.operator import SingularOperatorError
from zaremba.checks import DEFAULT_NODES
from zaremba.commands.eig_scan import cmd_eig_scan
from zaremba.commands.field_grid import cmd_field_grid
from zaremba.commands.optimize import cmd_optimize
from zaremba.commands.validate import cmd_validate
from zaremba.commands.zaremba_eval import cmd_zaremba_eval
from zaremba.config import ConfigError, RunConfig, load_config
from zaremba.field.green import NearResonanceError
from zaremba.geometry import PartitionError
from zaremba.optimize.algorithm import OptimizeError
from zaremba.optimize.site import SiteError
from zaremba.spectral.contour import ContourError
from zaremba.spectral.scan import ScanError
from zaremba.validation import ValidationError

LOG_LEVEL_ENV = "ZAREMBA_LOG_LEVEL"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

NUMERICAL_ERRORS = (
    SingularOperatorError,
    NearResonanceError,
    ContourError,
    OptimizeError,
    ScanError,
    SiteError,
    PartitionError,
)

COMMANDS: dict[str, Callable[[RunConfig, Path], str]] = {
    "eig-scan": cmd_eig_scan,
    "field-grid": cmd_field_grid,
    "zaremba-eval": cmd_zaremba_eval,
    "optimize": cmd_optimize,
}

HELP = {
    "eig-scan": "locate characteristic values of a partition in [k_lo, k_hi]",
    "field-grid": "sample the mixed Green's function on a grid for plotting",
    "zaremba-eval": "evaluate the mixed Green's function at one receiver",
    "optimize": "tune the Neumann arcs until a characteristic value reaches k_star",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zaremba",
        description="Mixed Dirichlet/Neumann Helmholtz problems on smooth planar curves.",
        epilog=f"Environment: {LOG_LEVEL_ENV} sets the log level (default INFO); "
        "ZAREMBA_THREADS sets the worker thread count.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in HELP.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument(
            "config",
            nargs="?",
            type=Path,
            default=Path("config.toml"),
            help=f"run config (TOML) with command = \"{name}\" (default: %(default)s)",
        )
        p.add_argument("--output-dir", type=Path, help="overrides output_dir from the config")
    p = sub.add_parser("validate", help="run the property suite", description="run the property suite")
    p.add_argument(
        "--nodes", type=int, default=DEFAULT_NODES, help="nodes per arc (default: %(default)s)"
    )
    p.add_argument("--output-dir", type=Path, default=Path("out"), help="where checks.csv goes")
    return parser


def configure_logging():
    level = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    logging.basicConfig(
        level=level if level in logging.getLevelNamesMapping() else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(message)s",
        handlers=[logging.StreamHandler()],
    )


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "validate":
        passed, summary = cmd_validate(args.nodes, args.output_dir)
        print(summary)
        return EXIT_OK if passed else EXIT_NUMERICAL

    config = load_config(args.config)
    if config.command != args.command:
        raise ConfigError([f"{args.config} is a {config.command} config, not {args.command}"])
    output_dir = args.output_dir or Path(config.output_dir)
    logging.info(f"🚀 {args.command} with {args.config}")
    print(COMMANDS[args.command](config, output_dir))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        return dispatch(args)
    except (ConfigError, ValidationError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
