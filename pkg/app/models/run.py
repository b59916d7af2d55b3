import argparse
from typing import Optional

from pydantic import BaseModel, ConfigDict


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="ignore")

    subcommand: str
    fmt: str = "text"
    output: Optional[str] = None

    n: Optional[int] = None
    n_from: Optional[int] = None
    k: Optional[int] = None
    seed: Optional[int] = None

    tree: Optional[str] = None
    fmatrix: Optional[str] = None
    to: Optional[str] = None
    tree_a: Optional[str] = None
    tree_b: Optional[str] = None
    input: Optional[str] = None
    summary: Optional[str] = None
    trace: bool = False
    exact: bool = False
    max_tree: bool = False

    chain: Optional[str] = None
    lazy: bool = False
    chains: Optional[int] = None
    steps: Optional[int] = None
    thin: Optional[int] = None
    threads: Optional[int] = None
    init: Optional[str] = None

    a: float = 1.0
    b: float = 1.0
    alpha: Optional[float] = None
    count: Optional[int] = None
    pairwise: bool = False

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> "RunConfig":
        return cls.model_validate(vars(namespace))
