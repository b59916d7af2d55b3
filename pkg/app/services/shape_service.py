import json
import logging
from collections import Counter
from itertools import accumulate
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from ..core.errors import (
    ConstraintViolation,
    EdgeNotPresent,
    ParseError,
    StructuralError,
    TreeShapeError,
)
from ..models.shape import DMatrix, FMatrix, StringRepr, TreeShape, ValidationResult

log = logging.getLogger(__name__)

Rows = Sequence[Sequence[int]]


def _ok() -> ValidationResult:
    return ValidationResult(ok=True)


def _violation(constraint: str, detail: str) -> ValidationResult:
    return ValidationResult(ok=False, constraint=constraint, detail=detail)


def trusted_shape(t: Sequence[int], l: Sequence[int]) -> TreeShape:
    """Build a TreeShape without validation; only for vectors produced by this package."""
    canonical = StringRepr.model_construct(t=tuple(t), l=tuple(l))
    return TreeShape.model_construct(canonical=canonical, n_tips=sum(l), n_internal=len(t))


def make_shape(t: Sequence[int], l: Sequence[int]) -> TreeShape:
    result = validate_string(t, l)
    if not result.ok:
        raise ConstraintViolation(result.constraint or "", result.detail or "")
    return trusted_shape([int(x) for x in t], [int(x) for x in l])


def star_tree(n_tips: int) -> TreeShape:
    return make_shape((0,), (n_tips,))


def is_binary(shape: TreeShape) -> bool:
    return shape.n_internal == shape.n_tips - 1


def child_counts(t: Sequence[int]) -> List[int]:
    """Number of internal children of each node, indexed by rank - 1."""
    counts = Counter(t[1:])
    return [counts.get(j, 0) for j in range(1, len(t) + 1)]


def node_children(shape: TreeShape) -> List[Tuple[int, int]]:
    return list(zip(child_counts(shape.t), shape.l))


def validate_string(t: Sequence[int], l: Sequence[int]) -> ValidationResult:
    if len(t) != len(l):
        raise StructuralError(f"t has length {len(t)} but l has length {len(l)}")
    if len(t) == 0:
        raise StructuralError("t and l must be nonempty")

    if t[0] != 0:
        return _violation("S1", "t_1 must be 0")
    for i in range(2, len(t) + 1):
        if not 1 <= t[i - 1] <= i - 1:
            return _violation("S1", f"t_{i}={t[i - 1]} must lie in 1..{i - 1}")

    for j, value in enumerate(l, start=1):
        if value < 0:
            return _violation("S2", f"l_{j}={value} is negative")

    counts = child_counts(t)
    for j, (k, value) in enumerate(zip(counts, l), start=1):
        if k == 0 and value < 2:
            return _violation("S3", f"node {j} has no internal children but l_{j}={value} < 2")
    for j, (k, value) in enumerate(zip(counts, l), start=1):
        if k == 1 and value < 1:
            return _violation("S4", f"node {j} has one internal child but l_{j}={value} < 1")
    return _ok()


def _square(rows: Rows) -> List[List[int]]:
    size = len(rows)
    if size == 0:
        raise StructuralError("matrix must have at least one row")
    lengths = [len(row) for row in rows]
    if lengths == list(range(1, size + 1)):
        return [list(row) + [0] * (size - i - 1) for i, row in enumerate(rows)]
    if any(n != size for n in lengths):
        raise StructuralError(f"matrix rows have lengths {lengths}; expected a square or lower-triangular layout")
    for i, row in enumerate(rows):
        if any(row[j] != 0 for j in range(i + 1, size)):
            raise StructuralError(f"row {i + 1} has nonzero entries above the diagonal")
    return [list(row) for row in rows]


def as_fmatrix(rows: Rows) -> FMatrix:
    return FMatrix(entries=tuple(tuple(row) for row in _square(rows)))


def validate_fmatrix(rows: Rows) -> ValidationResult:
    if isinstance(rows, FMatrix):
        rows = rows.entries
    F = _square(rows)
    K = len(F)

    if F[0][0] < 2:
        return _violation("F1", f"F_11={F[0][0]} must be at least 2")
    for i in range(1, K):
        if F[i][i] <= F[i - 1][i - 1]:
            return _violation("F1", f"diagonal must increase strictly at row {i + 1}")
        if F[i][i - 1] != F[i - 1][i - 1] - 1:
            return _violation("F1", f"F_{i + 1},{i}={F[i][i - 1]} must equal F_{i},{i} - 1")

    for i in range(1, K):
        if not max(0, F[i - 1][0] - 1) <= F[i][0] <= F[i - 1][0]:
            return _violation("F2", f"first column steps badly at row {i + 1}")

    for i in range(K):
        for j in range(1, i + 1):
            if F[i][j] < F[i][j - 1]:
                return _violation("F3a", f"row {i + 1} decreases at column {j + 1}")

    for i in range(1, K):
        for j in range(i):
            if F[i - 1][j] - F[i][j] not in (0, 1):
                return _violation("F3b", f"column {j + 1} steps by {F[i - 1][j] - F[i][j]} at row {i + 1}")

    for i in range(2, K):
        for j in range(1, i):
            grid = (F[i - 1][j] - F[i][j]) - (F[i - 1][j - 1] - F[i][j - 1])
            if not 0 <= grid <= 1:
                return _violation("F3c", f"grid condition fails at row {i + 1}, column {j + 1}")
    return _ok()


def string_to_dmatrix(s: StringRepr) -> DMatrix:
    K = len(s.t)
    rows: List[List[int]] = [[] for _ in range(K)]
    # Row K holds the pendant leaves; each earlier row adds back the child born at the next event.
    current = list(s.l)
    for i in range(K, 0, -1):
        rows[i - 1] = current[:i] + [0] * (K - i)
        if i >= 2:
            current[s.t[i - 1] - 1] += 1
    return DMatrix(entries=tuple(tuple(row) for row in rows))


def validate_dmatrix(rows: Rows, n_tips: Optional[int] = None) -> ValidationResult:
    if isinstance(rows, DMatrix):
        rows = rows.entries
    D = _square(rows)
    K = len(D)
    if n_tips is not None and sum(D[K - 1]) != n_tips:
        return _violation("D1", f"row {K} sums to {sum(D[K - 1])}, not {n_tips}")
    for i in range(K):
        if D[i][i] < 2:
            return _violation("D2", f"D_{i + 1},{i + 1}={D[i][i]} must be at least 2")
    for i in range(1, K):
        steps = [D[i - 1][j] - D[i][j] for j in range(i)]
        if any(step not in (0, 1) for step in steps):
            return _violation("D3", f"a column steps outside {{0,1}} at row {i + 1}")
        if sum(steps) != 1:
            return _violation("D4", f"row {i + 1} must decrease in exactly one column")
    return _ok()


def dmatrix_to_fmatrix(D: DMatrix) -> FMatrix:
    K = D.size
    rows = [tuple(accumulate(row[: i + 1])) + (0,) * (K - i - 1) for i, row in enumerate(D.entries)]
    return FMatrix(entries=tuple(rows))


def fmatrix_to_dmatrix(F: FMatrix) -> DMatrix:
    K = F.size
    rows = []
    for i, row in enumerate(F.entries):
        diffs = [row[0]] + [row[j] - row[j - 1] for j in range(1, i + 1)]
        rows.append(tuple(diffs) + (0,) * (K - i - 1))
    return DMatrix(entries=tuple(rows))


def string_to_fmatrix(s: StringRepr) -> FMatrix:
    return dmatrix_to_fmatrix(string_to_dmatrix(s))


def fmatrix_to_string(F: FMatrix) -> StringRepr:
    result = validate_fmatrix(F.entries)
    if not result.ok:
        raise ConstraintViolation(result.constraint or "", result.detail or "")
    D = fmatrix_to_dmatrix(F).entries
    K = len(D)
    t = [0]
    for i in range(1, K):
        parents = [j for j in range(i) if D[i - 1][j] - D[i][j] == 1]
        if len(parents) != 1:
            raise StructuralError(f"invalid F-matrix: row {i + 1} has {len(parents)} decreasing columns")
        t.append(parents[0] + 1)
    l = list(D[K - 1])
    return StringRepr(t=tuple(t), l=tuple(l))


def shape_fmatrix(shape: TreeShape) -> FMatrix:
    return string_to_fmatrix(shape.canonical)


def shape_from_fmatrix(F: FMatrix) -> TreeShape:
    s = fmatrix_to_string(F)
    return trusted_shape(s.t, s.l)


def _check_edge_index(e: int, K: int) -> None:
    if not 1 <= e <= K - 1:
        raise TreeShapeError(f"edge index {e} out of range 1..{K - 1}")


def collapse_edge_f(F: FMatrix, e: int) -> FMatrix:
    K = F.size
    _check_edge_index(e, K)
    rows = F.entries
    # Edge (e, e+1) exists iff rows e and e+1 agree before column e
    if e > 1 and any(rows[e - 1][j] != rows[e][j] for j in range(e - 1)):
        raise EdgeNotPresent(e)
    return delete_index(F, e)


def delete_index(F: FMatrix, e: int) -> FMatrix:
    """Delete row e and column e (1-based) with no edge check."""
    keep = [i for i in range(F.size) if i != e - 1]
    return FMatrix(entries=tuple(tuple(F.entries[i][j] for j in keep) for i in keep))


def collapse_edge_s(s: StringRepr, e: int) -> StringRepr:
    K = len(s.t)
    _check_edge_index(e, K)
    if s.t[e] != e:
        raise EdgeNotPresent(e)
    t = list(s.t[:e])
    for parent in s.t[e + 1:]:
        t.append(parent - 1 if parent > e else parent)
    l = list(s.l[: e - 1]) + [s.l[e - 1] + s.l[e]] + list(s.l[e + 1:])
    return StringRepr.model_construct(t=tuple(t), l=tuple(l))


def collapse_edge(shape: TreeShape, e: int) -> TreeShape:
    s = collapse_edge_s(shape.canonical, e)
    return trusted_shape(s.t, s.l)


def serialize(shape: TreeShape) -> str:
    return str(shape)


def to_json(shape: TreeShape) -> str:
    return json.dumps({"t": list(shape.t), "l": list(shape.l)}, separators=(",", ":"))


def _parse_vector(text: str, start: int) -> List[int]:
    values: List[int] = []
    pos = start
    for token in text.split(","):
        if not token:
            raise ParseError("expected a nonnegative integer", pos)
        for offset, char in enumerate(token):
            if not char.isdigit() or not char.isascii():
                raise ParseError(f"unexpected character {char!r}", pos + offset)
        values.append(int(token))
        pos += len(token) + 1
    return values


def deserialize(text: str) -> TreeShape:
    """Parse the compact form ``t1,...,tK|l1,...,lK`` or the JSON form ``{"t": [...], "l": [...]}``."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return from_json(stripped)
    lead = len(text) - len(text.lstrip())
    bar = stripped.find("|")
    if bar < 0:
        raise ParseError("missing '|' separator", lead + len(stripped))
    second = stripped.find("|", bar + 1)
    if second >= 0:
        raise ParseError("unexpected second '|'", lead + second)
    t = _parse_vector(stripped[:bar], lead)
    l = _parse_vector(stripped[bar + 1:], lead + bar + 1)
    return make_shape(t, l)


def from_json(text: str) -> TreeShape:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.pos) from exc
    try:
        s = StringRepr.model_validate(payload)
    except ValidationError as exc:
        raise ParseError(f"JSON shape must carry integer lists 't' and 'l': {exc.errors()[0]['msg']}") from exc
    return make_shape(s.t, s.l)
