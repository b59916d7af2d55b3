import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

Handler = Callable[..., int]


def option(*flags: str, **kwargs: Any) -> Tuple[Tuple[str, ...], Dict[str, Any]]:
    return flags, kwargs


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


@dataclass
class Command:
    name: str
    help: str
    handler: Handler
    options: Sequence[Tuple[Tuple[str, ...], Dict[str, Any]]] = field(default_factory=list)
    formats: Sequence[str] = ("text", "json")


class CommandRouter:
    """Collects subcommands declared with ``@router.command(...)`` and mounts them on a parser."""

    def __init__(self) -> None:
        self.commands: List[Command] = []

    def command(
        self,
        name: str,
        help: str,
        options: Sequence[Tuple[Tuple[str, ...], Dict[str, Any]]] = (),
        formats: Sequence[str] = ("text", "json"),
    ) -> Callable[[Handler], Handler]:
        def decorator(func: Handler) -> Handler:
            self.commands.append(Command(name, help, func, list(options), tuple(formats)))
            return func

        return decorator

    def include(self, subparsers: "argparse._SubParsersAction") -> None:
        for command in self.commands:
            parser = subparsers.add_parser(command.name, help=command.help, description=command.help)
            for flags, kwargs in command.options:
                parser.add_argument(*flags, **kwargs)
            parser.add_argument(
                "--format",
                dest="fmt",
                choices=list(command.formats),
                default=command.formats[0],
                help="output format (default: %(default)s)",
            )
            parser.add_argument("--output", "-o", default=None, help="write data here instead of stdout")
            parser.set_defaults(handler=command.handler, subcommand=command.name)
