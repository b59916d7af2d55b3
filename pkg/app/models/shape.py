from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict


class StringRepr(BaseModel):
    """Parent ranks ``t`` and pendant-leaf counts ``l`` of the internal nodes, rank order."""

    model_config = ConfigDict(frozen=True)

    t: Tuple[int, ...]
    l: Tuple[int, ...]

    @property
    def n_tips(self) -> int:
        return sum(self.l)

    @property
    def n_internal(self) -> int:
        return len(self.t)


class FMatrix(BaseModel):
    """Square K x K lower-triangular matrix; entries above the diagonal are zero."""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[Tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(self.size))

    def rows(self) -> List[Tuple[int, ...]]:
        return [row[: i + 1] for i, row in enumerate(self.entries)]


class DMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: Tuple[Tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def rows(self) -> List[Tuple[int, ...]]:
        return [row[: i + 1] for i, row in enumerate(self.entries)]


class TreeShape(BaseModel):
    """Immutable ranked tree shape; equality and hashing go through the canonical string form."""

    model_config = ConfigDict(frozen=True)

    canonical: StringRepr
    n_tips: int
    n_internal: int

    @property
    def t(self) -> Tuple[int, ...]:
        return self.canonical.t

    @property
    def l(self) -> Tuple[int, ...]:
        return self.canonical.l

    def __lt__(self, other: "TreeShape") -> bool:
        return (self.t, self.l) < (other.t, other.l)

    def __str__(self) -> str:
        return ",".join(map(str, self.t)) + "|" + ",".join(map(str, self.l))


class ValidationResult(BaseModel):
    ok: bool
    constraint: Optional[str] = None
    detail: Optional[str] = None
