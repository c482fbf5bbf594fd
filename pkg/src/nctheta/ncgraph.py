"""Non-commutative graph constructions: channels, sources, and products.

The characteristic graph of a discrete source with purified states |psi_i>
on A (x) B (x) C is the dagger-closed span of
Tr_BC{ (I (x) M_C) |psi_i><psi_j| } over i != j and all M_C, with the i = j
part forming the generalized loops S0.  With V_{i,l} the a x b matrix
reshaped from (I_AB (x) <l|_C)|psi_i>, those operators are V_{i,l} V_{j,l'}^dag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .operator_core import (
    BipartiteShape,
    OperatorSubspace,
    conj_space,
    full_space,
    hermitian_basis,
    max_entangled,
    orthonormalize,
    perp,
    span_sum,
    tensor_space,
    zero_subspace,
)


# --- classical graphs -------------------------------------------------------

@dataclass(frozen=True)
class ClassicalGraph:
    """Loop-free undirected graph as a symmetric boolean adjacency matrix."""

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.shape != (self.n, self.n):
            raise ValueError("adjacency shape mismatch")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diagonal(adj)):
            raise ValueError("graph must be loop-free")
        object.__setattr__(self, "adjacency", adj)
        adj.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple[int, int]]) -> "ClassicalGraph":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError("self-loop not allowed")
            adj[i, j] = adj[j, i] = True
        return cls(n, adj)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(self.adjacency)))]

    def complement(self) -> "ClassicalGraph":
        adj = ~self.adjacency
        np.fill_diagonal(adj, False)
        return ClassicalGraph(self.n, adj)


def complete_graph(n: int) -> ClassicalGraph:
    adj = np.ones((n, n), dtype=bool)
    np.fill_diagonal(adj, False)
    return ClassicalGraph(n, adj)


# --- channels ---------------------------------------------------------------

@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map given by Kraus operators (dim_out x dim_in), sum N_i^dag N_i = I."""

    kraus: tuple

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise ValueError("need at least one Kraus operator")
        shape = ks[0].shape
        if any(k.shape != shape for k in ks):
            raise ValueError("Kraus operators must share a shape")
        closure = sum(k.conj().T @ k for k in ks)
        if np.max(np.abs(closure - np.eye(shape[1]))) > 1e-9:
            raise ValueError("Kraus closure violated: sum N_i^dag N_i != I")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]


def classical_channel(kernel: np.ndarray) -> QuantumChannel:
    """Lift a column-stochastic kernel N(v|s) (shape v x s) to Kraus {sqrt(N(v|s)) |v><s|}."""
    kernel = np.asarray(kernel, dtype=float)
    nv, ns = kernel.shape
    if np.any(kernel < -1e-12) or np.max(np.abs(kernel.sum(axis=0) - 1)) > 1e-9:
        raise ValueError("kernel must be column-stochastic")
    ks = []
    for v in range(nv):
        for s in range(ns):
            if kernel[v, s] > 0:
                k = np.zeros((nv, ns), dtype=complex)
                k[v, s] = np.sqrt(kernel[v, s])
                ks.append(k)
    return QuantumChannel(tuple(ks))


def channel_graphs(chan: QuantumChannel) -> tuple[OperatorSubspace, OperatorSubspace]:
    """(confusability, distinguishability) = (span{N_i^dag N_j}, its perp).

    The confusability graph always contains I (Kraus closure); its complement
    is therefore trace-free.
    """
    gens = [ki.conj().T @ kj for ki in chan.kraus for kj in chan.kraus]
    confus = orthonormalize(gens)
    return confus, perp(confus)


# --- complete graphs and classical embedding --------------------------------

def complete_classical(n: int) -> OperatorSubspace:
    """K_n: the hollow matrices span{|x><y| : x != y}, dimension n^2 - n."""
    if n < 1:
        raise ValueError("n must be positive")
    return from_classical(complete_graph(n))


def complete_quantum(n: int) -> OperatorSubspace:
    """Q_n = (C I)^perp, the trace-free matrices, dimension n^2 - 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return perp(orthonormalize([np.eye(n, dtype=complex)]))


def from_classical(g: ClassicalGraph) -> OperatorSubspace:
    """S_G = span{|x><y| : x ~ y}; basis built directly from edge dyads (kept sparse)."""
    n = g.n
    basis = []
    s = 1.0 / np.sqrt(2.0)
    for i, j in g.edges:
        e = np.zeros((n, n), dtype=complex)
        e[i, j] = s
        e[j, i] = s
        basis.append(e)
        f = np.zeros((n, n), dtype=complex)
        f[i, j] = -1j * s
        f[j, i] = 1j * s
        basis.append(f)
    if not basis:
        return zero_subspace(n)
    return OperatorSubspace(n, np.stack(basis))


def diagonal_subspace(n: int) -> OperatorSubspace:
    """Span of |x><x| — the generalized loops of a classical graph."""
    basis = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        basis[i, i, i] = 1.0
    return OperatorSubspace(n, basis)


# --- sources ----------------------------------------------------------------

@dataclass(frozen=True)
class LoopedGraph:
    """Non-commutative graph with generalized loops: (S, S0) in a common ambient."""

    s: OperatorSubspace
    s0: OperatorSubspace

    def __post_init__(self):
        if self.s.ambient_dim != self.s0.ambient_dim:
            raise ValueError("S and S0 must share an ambient dimension")


@dataclass(frozen=True)
class DiscreteSource:
    """Purified source states |psi_i> on A (x) B (x) C; Alice gets A, Bob B, C lost."""

    dim_a: int
    dim_b: int
    dim_c: int
    states: tuple

    def __post_init__(self):
        sts = tuple(np.asarray(v, dtype=complex).ravel() for v in self.states)
        if not sts:
            raise ValueError("need at least one state")
        total = self.dim_a * self.dim_b * self.dim_c
        for v in sts:
            if v.size != total:
                raise ValueError("state dimension mismatch")
            if abs(np.linalg.norm(v) - 1.0) > 1e-9:
                raise ValueError("states must be normalized")
        object.__setattr__(self, "states", sts)

    @property
    def num_states(self) -> int:
        return len(self.states)


def _source_slices(src: DiscreteSource) -> np.ndarray:
    """V[i, l] = (I_AB (x) <l|_C)|psi_i> reshaped to dim_a x dim_b."""
    a, b, c = src.dim_a, src.dim_b, src.dim_c
    out = np.empty((src.num_states, c, a, b), dtype=complex)
    for i, v in enumerate(src.states):
        out[i] = np.transpose(v.reshape(a, b, c), (2, 0, 1))
    return out


def discrete_source_graph(src: DiscreteSource) -> LoopedGraph:
    """Characteristic graph (S, S0) of a discrete source.

    S spans V_{i,l} V_{j,l'}^dag over i != j; S0 the i = j part.
    """
    v = _source_slices(src)
    r, c = src.num_states, src.dim_c
    gens_s, gens_s0 = [], []
    for i in range(r):
        for j in range(r):
            for l in range(c):
                for lp in range(c):
                    g = v[i, l] @ v[j, lp].conj().T
                    (gens_s0 if i == j else gens_s).append(g)
    a = src.dim_a
    s = orthonormalize(gens_s) if gens_s else zero_subspace(a)
    s0 = orthonormalize(gens_s0) if gens_s0 else zero_subspace(a)
    return LoopedGraph(s, s0)


def coherent_source_graph(j: np.ndarray, dims: tuple[int, int, int]) -> LoopedGraph:
    """Characteristic graph for coherent transmission of an isometry J : R -> A(x)B(x)C.

    Same slice construction but mixing the inputs through the trace-free
    space Q_r instead of the hollow matrices, and S0 from J J^dag itself.
    """
    a, b, c = dims
    j = np.asarray(j, dtype=complex)
    if j.ndim != 2 or j.shape[0] != a * b * c:
        raise ValueError("isometry shape mismatch")
    r = j.shape[1]
    if np.max(np.abs(j.conj().T @ j - np.eye(r))) > 1e-9:
        raise ValueError("J is not an isometry")
    src_like = DiscreteSource(a, b, c, tuple(j[:, i] for i in range(r)))
    v = _source_slices(src_like)
    gens_s, gens_s0 = [], []
    qr = complete_quantum(r)
    for l in range(c):
        for lp in range(c):
            for m in qr.basis:
                gens_s.append(np.einsum("ij,iab,jcb->ac", m, v[:, l], np.conj(v[:, lp])))
            gens_s0.append(np.einsum("iab,icb->ac", v[:, l], np.conj(v[:, lp])))
    s = orthonormalize(gens_s) if gens_s else zero_subspace(a)
    s0 = orthonormalize(gens_s0)
    return LoopedGraph(s, s0)


def classical_source(p: np.ndarray) -> DiscreteSource:
    """Embed a classical source P(x,u|i) (shape x,u,i) as purified diagonal states.

    |psi_i> = sum_{x,u} sqrt(P(x,u|i)) |x>_A |u>_B |xu>_C, so Alice sees the
    symbol register and Bob the side-information register.
    """
    p = np.asarray(p, dtype=float)
    nx, nu, ni = p.shape
    if np.any(p < -1e-12) or np.max(np.abs(p.sum(axis=(0, 1)) - 1)) > 1e-9:
        raise ValueError("P must be a conditional distribution over (x,u)")
    states = []
    for i in range(ni):
        v = np.zeros((nx, nu, nx * nu), dtype=complex)
        for x in range(nx):
            for u in range(nu):
                v[x, u, x * nu + u] = np.sqrt(max(p[x, u, i], 0.0))
        states.append(v.ravel())
    return DiscreteSource(nx, nu, nx * nu, tuple(states))


def source_from_graph(s: OperatorSubspace) -> DiscreteSource:
    """A two-state source whose characteristic graph is exactly S.

    With {S_x} the orthonormal Hermitian basis (|X| = dim S) and
    |Phi> = a^{-1/2} sum_i |ii> on A (x) B:
      |psi_0> = |X|^{-1/2} sum_x |Phi> (x) |x>_{B'} (x) |x>_C
      |psi_1> = |X|^{-1/2} sum_x |S_x> (x) |x>_{B'} (x) |x>_C
    Bob holds B (x) B'; C goes to the environment.  For the zero subspace a
    single-state source (whose graph is zero) is returned.
    """
    a = s.ambient_dim
    k = s.dim
    phi = max_entangled(a) / np.sqrt(a)
    if k == 0:
        return DiscreteSource(a, a, 1, (phi,))
    psi0 = np.zeros(a * a * k * k, dtype=complex)
    psi1 = np.zeros_like(psi0)
    for x in range(k):
        ex = np.zeros(k, dtype=complex)
        ex[x] = 1.0
        tail = np.kron(ex, ex)
        psi0 += np.kron(phi, tail)
        sx = s.basis[x].reshape(a * a)  # |S_x> = sum_ij (S_x)_ij |i>_A |j>_B
        psi1 += np.kron(sx, tail)
    psi0 /= np.sqrt(k)
    psi1 /= np.sqrt(k)
    return DiscreteSource(a, a * k, k, (psi0, psi1))


# --- products ---------------------------------------------------------------

def disjunctive_product(s: OperatorSubspace, t: OperatorSubspace) -> OperatorSubspace:
    """S v T = S (x) L(B) + L(A) (x) T = (S^perp (x) T^perp)^perp; both forms checked."""
    sum_form = span_sum(
        tensor_space(s, full_space(t.ambient_dim)),
        tensor_space(full_space(s.ambient_dim), t),
    )
    perp_form = perp(tensor_space(perp(s), perp(t)))
    if not sum_form.equals(perp_form):
        raise AssertionError("disjunctive product forms disagree")
    return sum_form


def strong_product(g: LoopedGraph, h: LoopedGraph) -> LoopedGraph:
    """(S,S0) boxtimes (S',S0'): S'' = S(x)S' + S0(x)S' + S(x)S0', S0'' = S0(x)S0'."""
    s = span_sum(
        tensor_space(g.s, h.s),
        tensor_space(g.s0, h.s),
        tensor_space(g.s, h.s0),
    )
    return LoopedGraph(s, tensor_space(g.s0, h.s0))


def graph_power(g: LoopedGraph, m: int) -> LoopedGraph:
    if m < 1:
        raise ValueError("power must be >= 1")
    out = g
    for _ in range(m - 1):
        out = strong_product(out, g)
    return out


def proposed_complement(s: OperatorSubspace) -> OperatorSubspace:
    """S^c = (S + C I)^perp for trace-free S (again trace-free)."""
    if not s.is_trace_free:
        raise ValueError("complement is defined for trace-free graphs")
    eye = np.eye(s.ambient_dim, dtype=complex)
    return perp(orthonormalize(list(s.basis) + [eye]))


def classical_looped(g: ClassicalGraph) -> LoopedGraph:
    """Classical graph as a looped non-commutative graph: (S_G, diagonal span)."""
    return LoopedGraph(from_classical(g), diagonal_subspace(g.n))
