from typing import Dict, List, Tuple

from pydantic import BaseModel

from .shape import TreeShape


class LatticeGraph(BaseModel):
    """Covering relations of MT_N. ``up_edges[i]`` lists the vertices that cover vertex ``i``."""

    n_tips: int
    vertices: List[TreeShape]
    up_edges: Dict[int, List[int]]
    degrees: List[Tuple[int, int]]

    def index(self) -> Dict[TreeShape, int]:
        return {shape: i for i, shape in enumerate(self.vertices)}

    @property
    def edge_count(self) -> int:
        return sum(len(targets) for targets in self.up_edges.values())


class DegreeProfile(BaseModel):
    children: List[Tuple[int, int]]
    u_values: List[int]
    deg_plus: int
    deg_minus: int

    @property
    def total(self) -> int:
        return self.deg_plus + self.deg_minus
