import csv
import json
import os
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Optional, Sequence, TextIO

from pydantic import BaseModel


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
        return
    # the target only appears once the command has finished writing
    target = Path(path)
    fd, staging = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            yield handle
        os.replace(staging, target)
    except BaseException:
        Path(staging).unlink(missing_ok=True)
        raise


def read_lines(path: str) -> List[str]:
    if path == "-":
        return [line.rstrip("\r\n") for line in sys.stdin]
    return Path(path).read_text(encoding="utf-8").splitlines()


def _jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    return payload


def write_json(out: TextIO, payload: Any) -> None:
    out.write(json.dumps(_jsonable(payload), indent=2))
    out.write("\n")


def write_jsonl(out: TextIO, records: Iterable[Any]) -> None:
    for record in records:
        out.write(json.dumps(_jsonable(record), separators=(",", ":")))
        out.write("\n")


def write_csv(out: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    # csv default dialect is RFC-4180 (CRLF, minimal quoting)
    writer = csv.writer(out)
    writer.writerow(header)
    writer.writerows(rows)


def write_table(out: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    body = [[str(cell) for cell in row] for row in rows]
    widths = [len(h) for h in header]
    for row in body:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for row in body:
        out.write("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def write_lines(out: TextIO, lines: Iterable[str]) -> None:
    for line in lines:
        out.write(line)
        out.write("\n")
