import json
from pathlib import Path
from typing import List, TextIO

from ..core.commands import CommandRouter, option
from ..core.config import Settings
from ..core.errors import ConstraintViolation, ParseError, StructuralError, TreeShapeError
from ..core.output import read_lines, write_json, write_lines
from ..models.run import RunConfig
from ..models.shape import TreeShape, ValidationResult
from ..services.shape_service import (
    as_fmatrix,
    deserialize,
    fmatrix_to_string,
    make_shape,
    serialize,
    shape_fmatrix,
    string_to_dmatrix,
    to_json,
    validate_fmatrix,
)

router = CommandRouter()

_TREE = option("--tree", help="shape as 't1,...,tK|l1,...,lK' or JSON")
_FMATRIX = option("--fmatrix", help="F-matrix as JSON rows, e.g. '[[2],[1,3]]'")


def load_shape_arg(value: str) -> TreeShape:
    """A shape given inline, or the first shape in a file of one shape per line."""
    path = Path(value)
    if path.is_file():
        for line in read_lines(str(path)):
            if line.strip():
                return deserialize(line)
        raise ParseError(f"no shape found in {path}")
    return deserialize(value)


def load_shape_file(path: str) -> List[TreeShape]:
    return [deserialize(line) for line in read_lines(path) if line.strip()]


def _parse_rows(text: str) -> List[List[int]]:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed matrix JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise StructuralError("matrix must be a JSON list of rows")
    return rows


@router.command("validate", help="check a string representation or an F-matrix", options=[_TREE, _FMATRIX])
def validate_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    if config.fmatrix is not None:
        result = validate_fmatrix(_parse_rows(config.fmatrix))
    elif config.tree is not None:
        try:
            deserialize(config.tree)
            result = ValidationResult(ok=True)
        except ConstraintViolation as exc:
            result = ValidationResult(ok=False, constraint=exc.constraint, detail=exc.detail)
    else:
        raise TreeShapeError("validate needs --tree or --fmatrix")

    if config.fmt == "json":
        write_json(out, result)
    elif result.ok:
        write_lines(out, ["ok"])
    if not result.ok:
        raise TreeShapeError(f"{result.constraint}: {result.detail}")
    return 0


@router.command(
    "convert",
    help="convert between the string form, JSON and the F/D matrices",
    options=[
        _TREE,
        _FMATRIX,
        option("--to", choices=["fmatrix", "dmatrix", "string", "json"], default="fmatrix"),
    ],
)
def convert_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    if config.fmatrix is not None:
        s = fmatrix_to_string(as_fmatrix(_parse_rows(config.fmatrix)))
        shape = make_shape(s.t, s.l)
    elif config.tree is not None:
        shape = load_shape_arg(config.tree)
    else:
        raise TreeShapeError("convert needs --tree or --fmatrix")

    target = config.to or "fmatrix"
    if target == "fmatrix":
        rows = [list(r) for r in shape_fmatrix(shape).rows()]
    elif target == "dmatrix":
        rows = [list(r) for r in string_to_dmatrix(shape.canonical).rows()]
    else:
        rows = None

    if config.fmt == "json":
        payload = {"tree": serialize(shape), "t": list(shape.t), "l": list(shape.l)}
        if rows is not None:
            payload[target] = rows
        write_json(out, payload)
    elif rows is not None:
        write_lines(out, (" ".join(str(v) for v in row) for row in rows))
    elif target == "json":
        write_lines(out, [to_json(shape)])
    else:
        write_lines(out, [serialize(shape)])
    return 0
