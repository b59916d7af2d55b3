from typing import TextIO

from ..core.commands import CommandRouter, option
from ..core.config import Settings
from ..core.errors import TreeShapeError
from ..core.output import write_csv, write_json, write_table
from ..models.run import RunConfig
from ..services.enumeration_service import count_table, growth_table

router = CommandRouter()


@router.command(
    "enumerate",
    help="G(N, K) for each K plus the total, one row per N",
    options=[
        option("--n", type=int, required=True, help="largest N"),
        option("--from", dest="n_from", type=int, help="smallest N (default: --n)"),
    ],
    formats=("csv", "json", "text"),
)
def enumerate_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    first = config.n_from if config.n_from is not None else config.n
    if first < 2 or first > config.n:
        raise TreeShapeError(f"need 2 <= --from <= --n, got {first} and {config.n}")
    rows = count_table(range(first, config.n + 1))
    if config.fmt == "json":
        write_json(out, [row.model_dump() for row in rows])
        return 0
    columns = list(range(1, config.n))
    header = ["N"] + [f"K={k}" for k in columns] + ["Total"]
    body = [[row.N] + [row.by_k.get(k, "") for k in columns] + [row.total] for row in rows]
    if config.fmt == "csv":
        write_csv(out, header, body)
    else:
        write_table(out, header, body)
    return 0


@router.command(
    "growth",
    help="G(N), log G(N) and labeled counts for N = 2..n",
    options=[option("--n", type=int, required=True)],
    formats=("csv", "json", "text"),
)
def growth_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    if config.n < 2:
        raise TreeShapeError(f"--n must be at least 2, got {config.n}")
    rows = growth_table(range(2, config.n + 1))
    if config.fmt == "json":
        write_json(out, [row.model_dump() for row in rows])
        return 0
    header = ["N", "G", "log_G", "N_log_N", "labeled_ranked", "labeled_binary"]
    body = [
        [r.N, r.total, f"{r.log_total:.6f}", f"{r.n_log_n:.6f}", r.labeled_ranked, r.labeled_binary]
        for r in rows
    ]
    if config.fmt == "csv":
        write_csv(out, header, body)
    else:
        write_table(out, header, body)
    return 0
