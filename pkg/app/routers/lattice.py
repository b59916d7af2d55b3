from typing import TextIO

from ..core.commands import CommandRouter, option
from ..core.config import Settings
from ..core.errors import TreeShapeError
from ..core.output import write_json, write_lines, write_table
from ..models.run import RunConfig
from ..services.lattice_service import (
    build_hasse,
    degree_profile,
    glb,
    hasse_edges,
    lattice_distance,
    lub,
    lub_trace,
    max_degree_tree,
)
from ..services.shape_service import serialize, shape_fmatrix
from .shapes import load_shape_arg

router = CommandRouter()

_PAIR = [
    option("--a", dest="tree_a", required=True, help="first shape, inline or a file"),
    option("--b", dest="tree_b", required=True, help="second shape, inline or a file"),
]


@router.command(
    "lub",
    help="least upper bound of two shapes",
    options=_PAIR + [option("--trace", action="store_true", help="include the intermediate matrices")],
)
def lub_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    a, b = load_shape_arg(config.tree_a), load_shape_arg(config.tree_b)
    join = lub(a, b)
    fmatrix = [list(r) for r in shape_fmatrix(join).rows()]
    if config.fmt == "json":
        payload = {"lub": serialize(join), "fmatrix": fmatrix}
        if config.trace:
            payload["trace"] = [[list(r) for r in m.rows()] for m in lub_trace(a, b)]
        write_json(out, payload)
        return 0
    write_lines(out, [serialize(join)])
    if config.trace:
        for step in lub_trace(a, b):
            write_lines(out, [""] + [" ".join(map(str, row)) for row in step.rows()])
    return 0


@router.command("distance", help="lattice distance between two shapes", options=_PAIR)
def distance_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    a, b = load_shape_arg(config.tree_a), load_shape_arg(config.tree_b)
    value = lattice_distance(a, b)
    if config.fmt == "json":
        write_json(out, {"a": serialize(a), "b": serialize(b), "distance": value})
    else:
        write_lines(out, [str(value)])
    return 0


@router.command(
    "degree",
    help="forward and backward degrees of a shape, or the maximum-degree tree of MT_N",
    options=[
        option("--tree", help="shape, inline or a file"),
        option("--max", dest="max_tree", action="store_true", help="report the maximum-degree tree for --n"),
        option("--n", type=int),
    ],
)
def degree_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    if config.max_tree:
        if config.n is None:
            raise TreeShapeError("--max needs --n")
        shape, m_n = max_degree_tree(config.n)
    elif config.tree is not None:
        shape, m_n = load_shape_arg(config.tree), None
    else:
        raise TreeShapeError("degree needs --tree or --max --n")

    profile = degree_profile(shape)
    if config.fmt == "json":
        payload = {"tree": serialize(shape), **profile.model_dump(), "total": profile.total}
        if m_n is not None:
            payload["m_n"] = m_n
        write_json(out, payload)
        return 0
    rows = [["tree", serialize(shape)], ["deg_plus", profile.deg_plus], ["deg_minus", profile.deg_minus], ["total", profile.total]]
    if m_n is not None:
        rows.append(["m_n", m_n])
    write_table(out, ["field", "value"], rows)
    return 0


@router.command(
    "hasse",
    help="covering relations of MT_N as an edge list",
    options=[option("--n", type=int, required=True)],
)
def hasse_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    graph = build_hasse(config.n, cap=settings.exhaustive_cap)
    edges = hasse_edges(graph)
    if config.fmt == "json":
        write_json(
            out,
            {
                "n": graph.n_tips,
                "vertices": [serialize(v) for v in graph.vertices],
                "degrees": graph.degrees,
                "edges": [list(e) for e in edges],
            },
        )
    else:
        write_lines(out, (f"{parent}\t{child}" for parent, child in edges))
    return 0


@router.command("glb", help="greatest lower bound of two shapes (small N)", options=_PAIR)
def glb_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    a, b = load_shape_arg(config.tree_a), load_shape_arg(config.tree_b)
    graph = build_hasse(a.n_tips, cap=settings.exhaustive_cap)
    meet = glb(graph, a, b)
    text = serialize(meet) if meet is not None else "empty"
    if config.fmt == "json":
        write_json(out, {"glb": serialize(meet) if meet is not None else None})
    else:
        write_lines(out, [text])
    return 0
