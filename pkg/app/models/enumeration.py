from typing import Dict, List, Tuple

from pydantic import BaseModel


class PairTable(BaseModel):
    """A_K(k0, k1): number of rank vectors t of length K with K0(t)=k0 and K1(t)=k1."""

    K: int
    entries: Dict[Tuple[int, int], int]

    def pairs(self) -> List[Tuple[int, int]]:
        return sorted(self.entries)

    def values(self) -> List[int]:
        return [self.entries[p] for p in self.pairs()]


class CountResult(BaseModel):
    N: int
    K: int
    value: int
    in_range: bool = True


class CountRow(BaseModel):
    N: int
    by_k: Dict[int, int]
    total: int


class GrowthRow(BaseModel):
    N: int
    total: int
    log_total: float
    n_log_n: float
    labeled_ranked: int
    labeled_binary: int
