from typing import TextIO

from ..core.commands import CommandRouter, option
from ..core.config import Settings
from ..core.output import write_json, write_lines
from ..models.coalescent import LambdaBeta
from ..models.run import RunConfig
from ..services.coalescent_service import sample_batch
from ..services.shape_service import serialize

router = CommandRouter()


@router.command(
    "sample-coalescent",
    help="ranked shapes from the Beta(a, b) multiple-merger coalescent",
    options=[
        option("--n", type=int, required=True),
        option("--seed", type=int, required=True),
        option("--a", type=float, default=1.0),
        option("--b", type=float, default=1.0),
        option("--alpha", type=float, help="use Beta(2 - alpha, alpha) instead of --a/--b"),
        option("--count", type=int, help="number of shapes (default 2000N)"),
        option("--threads", type=int),
        option("--pairwise", action="store_true", help="restrict to binary mergers"),
    ],
    formats=("text", "json"),
)
def sample_coalescent_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    measure = LambdaBeta.from_alpha(config.alpha) if config.alpha is not None else LambdaBeta(a=config.a, b=config.b)
    shapes = sample_batch(
        config.n,
        measure,
        count=config.count if config.count is not None else 2000 * config.n,
        seed=config.seed,
        threads=config.threads or settings.threads,
        pairwise_only=config.pairwise,
        chunk=settings.coalescent_chunk,
    )
    if config.fmt == "json":
        write_json(out, {"n": config.n, "a": measure.a, "b": measure.b, "samples": [serialize(s) for s in shapes]})
    else:
        write_lines(out, (serialize(s) for s in shapes))
    return 0
