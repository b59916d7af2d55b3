from typing import TextIO

from ..core.commands import CommandRouter, option
from ..core.config import Settings
from ..core.output import open_output, write_csv, write_json, write_table
from ..models.run import RunConfig
from ..services.statistics_service import aggregate, shape_stats, stats_header, stats_rows
from .shapes import load_shape_file

router = CommandRouter()


@router.command(
    "stats",
    help="per-shape statistics (K, max/avg block size, cherries) and a sample summary",
    options=[
        option("--in", dest="input", required=True, help="file of shapes, one per line ('-' for stdin)"),
        option("--summary", help="also write the JSON summary to this path"),
    ],
    formats=("csv", "json", "text"),
)
def stats_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    stats = [shape_stats(s) for s in load_shape_file(config.input)]
    summary = aggregate(stats, settings.cherry_max)
    if config.fmt == "csv":
        write_csv(out, stats_header(settings.cherry_max), stats_rows(stats, settings.cherry_max))
    elif config.fmt == "json":
        write_json(out, summary)
    else:
        rows = [
            ["count", summary.count],
            ["mean K", f"{summary.mean_k:.4f}"],
            ["median K", summary.median_k],
            ["mean M", f"{summary.mean_m:.4f}"],
            ["median M", summary.median_m],
            ["mean A", f"{summary.mean_a:.4f}"],
            ["median A", f"{summary.median_a:.4f}"],
        ]
        rows += [[f"mean {m}-cherries / N", f"{v:.4f}"] for m, v in summary.cherry_scaled.items()]
        write_table(out, ["statistic", "value"], rows)
    if config.summary:
        with open_output(config.summary) as handle:
            write_json(handle, summary)
    return 0
