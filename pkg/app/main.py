import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from .core.config import load_settings
from .core.errors import TreeShapeError
from .core.output import open_output
from .models.run import RunConfig
from .routers import chains, coalescent, enumeration, lattice, shapes, statistics

log = logging.getLogger(__name__)

ROUTERS = (enumeration.router, shapes.router, lattice.router, chains.router, coalescent.router, statistics.router)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeshapes",
        description="Ranked multifurcating tree shapes: encodings, counting, lattice, Markov chains, coalescent sampling.",
    )
    parser.add_argument("--config", default=None, help="TOML settings file (default: ./treeshapes.toml if present)")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="override the configured log level",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for router in ROUTERS:
        router.include(subparsers)
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand. 0 on success, 1 on a domain error, 2 on a usage error."""
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if getattr(namespace, "handler", None) is None:
        parser.print_help(sys.stderr)
        return 2

    try:
        settings = load_settings(namespace.config)
        _configure_logging(namespace.log_level or settings.log_level)
        config = RunConfig.from_namespace(namespace)
        with open_output(config.output) as out:
            return namespace.handler(config, settings, out)
    except (TreeShapeError, ValidationError) as exc:
        log.debug("Command %s failed", namespace.command, exc_info=True)
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
