import sys
from typing import TextIO

from ..core.commands import CommandRouter, option, positive_int
from ..core.config import Settings
from ..core.output import write_json, write_jsonl, write_lines, write_table
from ..models.chain import ChainKind, ChainSpec
from ..models.run import RunConfig
from ..services.analysis_service import exact_diagnostics, exact_kernel, kernel_rows, mixing_bounds
from ..services.chain_service import chain_streams, pooled_acceptance, run_chains, semi_random_init
from ..services.shape_service import serialize
from .shapes import load_shape_arg

router = CommandRouter()

_CHAIN_KINDS = {"sym": ChainKind.SYMMETRIC, "rw": ChainKind.RANDOM_WALK, "mh": ChainKind.METROPOLIS}


@router.command(
    "bounds",
    help="mixing-time bound formulas for MT_N",
    options=[
        option("--n", type=int, required=True),
        option("--exact", action="store_true", help="add exact spectral/bottleneck diagnostics (small N)"),
    ],
    formats=("json", "text"),
)
def bounds_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    report = mixing_bounds(
        config.n, exact=config.exact, bottleneck_cap=settings.bottleneck_cap, cap=settings.exhaustive_cap
    )
    if config.fmt == "json":
        write_json(out, report)
        return 0
    rows = [
        ["M_N", report.m_n],
        ["G(N)", report.g_n],
        ["symmetric lower", f"{report.symmetric_lower:.6g}"],
        ["symmetric upper (lazy)", f"{report.symmetric_upper:.6g}"],
        ["random-walk lower", f"{report.random_walk_lower:.6g}"],
        ["random-walk upper (lazy)", f"{report.random_walk_upper:.6g}"],
    ]
    if report.diameter is not None:
        rows.append(["diameter", report.diameter])
    write_table(out, ["quantity", "value"], rows)
    return 0


@router.command(
    "exact",
    help="exact kernel diagnostics: stationarity, spectral gap, bottleneck",
    options=[
        option("--n", type=int, required=True),
        option("--chain", choices=sorted(_CHAIN_KINDS), default="sym"),
        option("--lazy", action="store_true"),
    ],
    formats=("json", "text"),
)
def exact_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    spec = ChainSpec(kind=_CHAIN_KINDS[config.chain], lazy=config.lazy, n_tips=config.n)
    kernel = exact_kernel(config.n, spec, cap=settings.exhaustive_cap)
    diagnostics = exact_diagnostics(config.n, spec, settings.bottleneck_cap, kernel=kernel)
    if config.fmt == "json":
        payload = diagnostics.model_dump(mode="json")
        payload["matrix"] = kernel_rows(kernel)
        write_json(out, payload)
        return 0
    rows = [
        ["stationarity residual", f"{diagnostics.stationarity_residual:.3e}"],
        ["gamma", f"{diagnostics.gap.gamma:.6f}"],
        ["gamma*", f"{diagnostics.gap.gamma_star:.6f}"],
        ["t_rel", f"{diagnostics.gap.t_rel:.6f}"],
    ]
    if diagnostics.bottleneck is not None:
        rows.append(["phi*", f"{diagnostics.bottleneck.phi_star:.6f}"])
    write_table(out, ["quantity", "value"], rows)
    return 0


@router.command(
    "sample-uniform",
    help="Metropolis-Hastings samples from the uniform distribution on MT_N",
    options=[
        option("--n", type=int, required=True),
        option("--seed", type=int, required=True),
        option("--chains", type=positive_int, help="parallel chains (default N-1)"),
        option("--steps", type=int, help="steps per chain (default 200N)"),
        option("--thin", type=positive_int, help="keep every k-th state"),
        option("--threads", type=positive_int),
        option("--chain", choices=sorted(_CHAIN_KINDS), default="mh"),
        option("--lazy", action="store_true"),
        option("--init", help="start every chain from this shape instead of semi-random trees"),
    ],
    formats=("text", "jsonl", "json"),
)
def sample_uniform_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    N = config.n
    spec = ChainSpec(kind=_CHAIN_KINDS[config.chain], lazy=config.lazy, n_tips=N)
    run = run_chains(
        spec,
        n_chains=config.chains if config.chains is not None else N - 1,
        n_steps=config.steps if config.steps is not None else 200 * N,
        seed=config.seed,
        init=load_shape_arg(config.init) if config.init else None,
        thinning=config.thin if config.thin is not None else settings.thinning,
        threads=config.threads if config.threads is not None else settings.threads,
    )
    if config.fmt == "json":
        write_json(
            out,
            {
                "n": N,
                "seed": run.seed,
                "acceptance": run.acceptance,
                "samples": [serialize(s.shape) for s in run.samples],
            },
        )
    elif config.fmt == "jsonl":
        write_jsonl(out, ({"chain": s.chain, "step": s.step, "tree": serialize(s.shape)} for s in run.samples))
    else:
        write_lines(out, (serialize(s.shape) for s in run.samples))
    pooled = pooled_acceptance(run)
    if pooled is not None:
        sys.stderr.write(f"acceptance rate {pooled:.4f} over {run.n_chains} chains\n")
    return 0


@router.command(
    "semi-random",
    help="semi-random shapes with N tips and K internal nodes",
    options=[
        option("--n", type=int, required=True),
        option("--k", type=int, required=True),
        option("--seed", type=int, required=True),
        option("--count", type=int, default=1),
    ],
    formats=("text", "json"),
)
def semi_random_command(config: RunConfig, settings: Settings, out: TextIO) -> int:
    rng = chain_streams(config.seed, 1)[0]
    shapes = [semi_random_init(config.n, config.k, rng) for _ in range(config.count)]
    if config.fmt == "json":
        write_json(out, [serialize(s) for s in shapes])
    else:
        write_lines(out, (serialize(s) for s in shapes))
    return 0
