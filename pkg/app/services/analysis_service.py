import logging
import math
from typing import Dict, List, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..core.config import settings
from ..core.errors import CapExceeded, TreeShapeError
from ..models.chain import (
    BottleneckReport,
    BoundReport,
    ChainKind,
    ChainSpec,
    ExactDiagnostics,
    ExactKernel,
    GapReport,
)
from .enumeration_service import count_space, generate_all
from .lattice_service import build_hasse, covers, diameter, max_degree_tree, refinements_below

log = logging.getLogger(__name__)

_TOL = 1e-12


def exact_kernel(N: int, spec: ChainSpec, cap: Optional[int] = None) -> ExactKernel:
    """Dense transition matrix over generate_all(N)."""
    cap = settings.exhaustive_cap if cap is None else cap
    if N > cap:
        raise CapExceeded(N, cap, "exact kernel")
    if N < 3:
        raise TreeShapeError(f"exact kernels need N >= 3, got {N}")
    vertices = list(generate_all(N, cap=cap))
    index = {shape: i for i, shape in enumerate(vertices)}
    neighbours = [
        [index[u] for u in sorted(covers(v) | refinements_below(v))] for v in vertices
    ]
    degrees = [len(n) for n in neighbours]

    size = len(vertices)
    P = np.zeros((size, size))
    if spec.kind == ChainKind.SYMMETRIC:
        m_n = max_degree_tree(N)[1]
        for i, targets in enumerate(neighbours):
            P[i, targets] = 1.0 / m_n
    elif spec.kind == ChainKind.RANDOM_WALK:
        for i, targets in enumerate(neighbours):
            P[i, targets] = 1.0 / degrees[i]
    else:
        for i, targets in enumerate(neighbours):
            for j in targets:
                P[i, j] = min(1.0 / degrees[i], 1.0 / degrees[j])
    P[np.diag_indices(size)] += 1.0 - P.sum(axis=1)
    if spec.lazy:
        P = 0.5 * (np.eye(size) + P)
    return ExactKernel(spec=spec, vertices=vertices, degrees=degrees, matrix=P)


def stationary_distribution(kernel: ExactKernel) -> np.ndarray:
    if kernel.spec.kind == ChainKind.RANDOM_WALK:
        weights = np.asarray(kernel.degrees, dtype=float)
    else:
        weights = np.ones(len(kernel.vertices))
    return weights / weights.sum()


def stationarity_residual(kernel: ExactKernel) -> float:
    pi = stationary_distribution(kernel)
    return float(np.max(np.abs(pi @ kernel.matrix - pi)))


def exact_bottleneck(
    N: int, spec: ChainSpec, cap: Optional[int] = None, kernel: Optional[ExactKernel] = None
) -> BottleneckReport:
    """Minimum of Q(S, S^c) / pi(S) over every nonempty S with pi(S) <= 1/2."""
    cap = settings.bottleneck_cap if cap is None else cap
    if N > cap:
        raise CapExceeded(N, cap, "bottleneck enumeration")
    if kernel is None:
        kernel = exact_kernel(N, spec)
    pi = stationary_distribution(kernel)
    flow = pi[:, None] * kernel.matrix
    size = len(pi)

    masks = np.arange(1, 2**size, dtype=np.int64)
    members = ((masks[:, None] >> np.arange(size)) & 1).astype(float)
    mass = members @ pi
    keep = mass <= 0.5 + _TOL
    members, mass, masks = members[keep], mass[keep], masks[keep]
    # Q(S, S^c) = s.W.1 - s.W.s
    out_flow = members @ flow.sum(axis=1) - np.einsum("si,ij,sj->s", members, flow, members)
    ratios = out_flow / mass

    phi_star = float(ratios.min())
    minimizers = [
        [kernel.vertices[i] for i in range(size) if mask >> i & 1]
        for mask in masks[ratios <= phi_star + _TOL]
    ]
    return BottleneckReport(phi_star=phi_star, minimizers=minimizers)


def _spectrum(kernel: ExactKernel) -> np.ndarray:
    pi = stationary_distribution(kernel)
    root = np.sqrt(pi)
    # similar to P under pi-reversibility, hence symmetric
    A = root[:, None] * kernel.matrix / root[None, :]
    A = 0.5 * (A + A.T)
    return np.sort(np.linalg.eigvalsh(A))[::-1]


def exact_gap(
    N: int, spec: ChainSpec, cap: Optional[int] = None, kernel: Optional[ExactKernel] = None
) -> GapReport:
    if kernel is None:
        kernel = exact_kernel(N, spec, cap)
    eigenvalues = _spectrum(kernel)
    gamma = float(1.0 - eigenvalues[1])
    gamma_star = float(1.0 - np.max(np.abs(eigenvalues[1:])))
    if spec.lazy:
        gamma_star = gamma
    t_rel = math.inf if gamma_star <= _TOL else 1.0 / gamma_star
    return GapReport(gamma=gamma, gamma_star=gamma_star, t_rel=t_rel, eigenvalues=eigenvalues.tolist())


def exact_diagnostics(
    N: int,
    spec: ChainSpec,
    bottleneck_cap: Optional[int] = None,
    cap: Optional[int] = None,
    kernel: Optional[ExactKernel] = None,
) -> ExactDiagnostics:
    """Stationarity, gap and (for N within the bottleneck cap) Phi*, all from one kernel build."""
    bottleneck_cap = settings.bottleneck_cap if bottleneck_cap is None else bottleneck_cap
    if kernel is None:
        kernel = exact_kernel(N, spec, cap)
    gap = exact_gap(N, spec, kernel=kernel)
    bottleneck = exact_bottleneck(N, spec, cap=bottleneck_cap, kernel=kernel) if N <= bottleneck_cap else None
    pi_min = float(stationary_distribution(kernel).min())
    return ExactDiagnostics(
        spec=spec,
        stationarity_residual=stationarity_residual(kernel),
        gap=gap,
        bottleneck=bottleneck,
        bottleneck_lower=1.0 / (4.0 * bottleneck.phi_star) if bottleneck else None,
        relaxation_upper=math.log(4.0 / pi_min) * gap.t_rel if spec.lazy else None,
    )


def mixing_bounds(
    N: int, exact: bool = False, bottleneck_cap: Optional[int] = None, cap: Optional[int] = None
) -> BoundReport:
    if N < 4:
        raise TreeShapeError(f"mixing bounds need N >= 4, got {N}")
    m_n = max_degree_tree(N)[1]
    g_n = count_space(N).value
    report = BoundReport(
        n_tips=N,
        m_n=m_n,
        g_n=g_n,
        symmetric_lower=m_n / 4,
        symmetric_upper=8 * m_n**2 * math.log(4 * g_n),
        random_walk_lower=2 * (N - 3) / 2,
        random_walk_upper=8 * math.log(4 * m_n * g_n),
    )
    if not exact:
        return report

    L = diameter(build_hasse(N, cap=cap))
    diagnostics: Dict[str, ExactDiagnostics] = {}
    for kind in (ChainKind.SYMMETRIC, ChainKind.RANDOM_WALK):
        for lazy in (False, True):
            spec = ChainSpec(kind=kind, lazy=lazy, n_tips=N)
            diagnostics[_label(spec)] = exact_diagnostics(N, spec, bottleneck_cap, cap=cap)
    log.debug("Exact diagnostics for N=%d: diameter %d", N, L)
    return report.model_copy(update={"diameter": L, "diameter_lower": L / 2, "exact": diagnostics})


def _label(spec: ChainSpec) -> str:
    return ("lazy-" if spec.lazy else "") + spec.kind.value


def is_irreducible(kernel: ExactKernel) -> bool:
    n_components, _ = connected_components(
        csr_matrix(kernel.matrix > 0), directed=True, connection="strong"
    )
    return n_components == 1


def cheeger_holds(bottleneck: BottleneckReport, gap: GapReport) -> bool:
    phi = bottleneck.phi_star
    return phi**2 / 2 - _TOL <= gap.gamma <= 2 * phi + _TOL


def kernel_rows(kernel: ExactKernel) -> List[List[float]]:
    return kernel.matrix.tolist()
