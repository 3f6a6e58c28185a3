"""Tensor spectral functionals via entropy optimization on support and moment polytopes."""

from .tensors import (
    InvalidArgumentError,
    Tensor,
    GroupElement,
    SupportSet,
    MatrixTuple,
    make_unit,
    w_tensor,
    matmul_tensor,
    tensor_product,
    direct_sum,
    apply_group,
    flattening,
    marginal,
    support,
)
from .optim import (
    ThetaWeights,
    JointDistribution,
    MarginalTuple,
    marginals_of,
    max_weighted_entropy,
    max_min_weighted_entropy,
    min_convex_over_support,
)
from .hypergraphs import (
    Hypergraph,
    BipartiteGraph,
    hypergraph_of,
    kronecker_power,
    vertex_cover,
    fractional_vertex_cover,
    asymptotic_vertex_cover,
    bipartite_vertex_cover,
)
from .functionals import (
    SearchConfig,
    FunctionalCertificate,
    ScalingTrace,
    moment_map,
    torus_moment_map,
    kempf_ness_value,
    entropic_scaling,
    quantum_functional,
    support_functional,
    symmetric_quantum_functional,
    symmetric_support_functional,
    minimax_gap,
)
from .ranks import (
    RankReport,
    asymptotic_slice_rank,
    g_stable_rank,
    ncrank,
    ncrank_fr,
    ncrank_blowup,
    ncrank_moment,
)
from .linprog import LinearProgram, LpInfeasible, LpUnbounded, solve_lp

__all__ = [
    "InvalidArgumentError",
    "Tensor",
    "GroupElement",
    "SupportSet",
    "MatrixTuple",
    "make_unit",
    "w_tensor",
    "matmul_tensor",
    "tensor_product",
    "direct_sum",
    "apply_group",
    "flattening",
    "marginal",
    "support",
    "ThetaWeights",
    "JointDistribution",
    "MarginalTuple",
    "marginals_of",
    "max_weighted_entropy",
    "max_min_weighted_entropy",
    "min_convex_over_support",
    "Hypergraph",
    "BipartiteGraph",
    "hypergraph_of",
    "kronecker_power",
    "vertex_cover",
    "fractional_vertex_cover",
    "asymptotic_vertex_cover",
    "bipartite_vertex_cover",
    "SearchConfig",
    "FunctionalCertificate",
    "ScalingTrace",
    "moment_map",
    "torus_moment_map",
    "kempf_ness_value",
    "entropic_scaling",
    "quantum_functional",
    "support_functional",
    "symmetric_quantum_functional",
    "symmetric_support_functional",
    "minimax_gap",
    "RankReport",
    "asymptotic_slice_rank",
    "g_stable_rank",
    "ncrank",
    "ncrank_fr",
    "ncrank_blowup",
    "ncrank_moment",
    "LinearProgram",
    "LpInfeasible",
    "LpUnbounded",
    "solve_lp",
]
