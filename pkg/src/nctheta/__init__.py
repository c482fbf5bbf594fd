"""Non-commutative graph invariants for zero-error quantum source-channel coding.

A non-commutative graph is a dagger-closed subspace S of d x d complex
matrices; it is "trace-free" (loop-free) when every element has zero trace.
This package provides the operator-subspace machinery, graph constructions
from channels and sources, graph products, and the semidefinite programs for
the generalized Lovasz number and its cone-constrained Schrijver / Szegedy
variants (PSD, PPT, PSD-and-PPT cones), together with the classical
theta-bar SDPs they reduce to on classical graphs.
"""

from .operator_core import (
    BipartiteShape,
    OperatorSubspace,
    conj_space,
    contains,
    ddag,
    hermitian_basis,
    hs_inner,
    orthonormalize,
    partial_trace,
    partial_transpose,
    perp,
    realify,
    rot,
    tensor_space,
)
from .ncgraph import (
    ClassicalGraph,
    DiscreteSource,
    LoopedGraph,
    QuantumChannel,
    channel_graphs,
    coherent_source_graph,
    complete_classical,
    complete_quantum,
    discrete_source_graph,
    disjunctive_product,
    from_classical,
    graph_power,
    proposed_complement,
    source_from_graph,
    strong_product,
)
from .classical import (
    ClassicalThetaResult,
    ThetaVariant,
    chromatic_number,
    classical_char_graph,
    classical_theta,
    clique_number,
    encode_graph6,
    parse_graph6,
)
from .conic import (
    ConeId,
    ConicProgram,
    ThetaResult,
    cost_rate_bound,
    theta_minus,
    theta_perp,
    theta_plus,
)
from .experiments import (
    ExperimentReport,
    run_complete_graph_table,
    run_delta_example,
    run_locc1_example,
    run_nonmaximal_channel,
    run_random_survey,
    sample_trace_free_subspace,
)

__version__ = "0.1.0"
