"""Classical graphs: graph6 ingestion, the theta-bar SDP family, and brute
force oracles.

The three variants, in the max form over symmetric B with Tr B = 1, B >= 0
(Loewner) and support(B) inside edges + diagonal:

  Lovasz    theta-bar   = max <B, J>
  Schrijver theta-bar^- = same, B entrywise nonnegative
  Szegedy   theta-bar^+ = same, but off-support entries only need B_ij <= 0

Each variant is solved in both the max and min form and the pair must agree
(duality regression).  Matrices are real symmetric throughout.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .conic import ConicProgram, pairing_row
from .ncgraph import ClassicalGraph

LOVASZ = "LOVASZ"
SCHRIJVER = "SCHRIJVER"
SZEGEDY = "SZEGEDY"


class ThetaVariant:
    LOVASZ = LOVASZ
    SCHRIJVER = SCHRIJVER
    SZEGEDY = SZEGEDY
    ALL = (SCHRIJVER, LOVASZ, SZEGEDY)


@dataclass(frozen=True)
class ClassicalThetaResult:
    value: float
    variant: str
    witness: Optional[np.ndarray] = None
    gap: Optional[float] = None


# --- graph6 ------------------------------------------------------------------

def parse_graph6(s: str) -> ClassicalGraph:
    """Decode a graph6 string (printable bytes 63..126; upper triangle packed
    column-major, MSB first)."""
    data = s.strip().encode("ascii")
    if data.startswith(b">>graph6<<"):
        data = data[len(b">>graph6<<"):]
    if not data:
        raise ValueError("empty graph6 string")
    vals = []
    for b in data:
        if not 63 <= b <= 126:
            raise ValueError(f"non-printable graph6 byte {b}")
        vals.append(b - 63)
    if vals[0] < 63:
        n, body = vals[0], vals[1:]
    elif len(vals) >= 4 and vals[1] < 63:
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        body = vals[4:]
    elif len(vals) >= 8:
        n = 0
        for v in vals[2:8]:
            n = (n << 6) | v
        body = vals[8:]
    else:
        raise ValueError("malformed graph6 size header")
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(body) != need:
        raise ValueError(f"graph6 data length {len(body)} != expected {need}")
    bits = []
    for v in body:
        bits.extend((v >> k) & 1 for k in range(5, -1, -1))
    if any(bits[nbits:]):
        raise ValueError("nonzero padding bits in graph6 data")
    adj = np.zeros((n, n), dtype=bool)
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                adj[i, j] = adj[j, i] = True
            pos += 1
    return ClassicalGraph(n, adj)


def encode_graph6(g: ClassicalGraph) -> str:
    n = g.n
    if n < 63:
        header = [n]
    elif n < 258048:
        header = [63, (n >> 12) & 63, (n >> 6) & 63, n & 63]
    else:
        raise ValueError("graph too large for this encoder")
    bits = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if g.adjacency[i, j] else 0)
    while len(bits) % 6:
        bits.append(0)
    body = []
    for k in range(0, len(bits), 6):
        v = 0
        for b in bits[k:k + 6]:
            v = (v << 1) | b
        body.append(v)
    return "".join(chr(v + 63) for v in header + body)


def graph_from_json(obj: dict) -> ClassicalGraph:
    return ClassicalGraph.from_edges(int(obj["n"]),
                                     [tuple(e) for e in obj.get("edges", [])])


def graph_to_json(g: ClassicalGraph) -> dict:
    return {"n": g.n, "edges": [[i, j] for i, j in g.edges]}


# --- theta-bar SDPs ----------------------------------------------------------

def _sym_unit(n: int, i: int, j: int) -> sp.coo_matrix:
    """E_ii, or (E_ij + E_ji)/sqrt(2) — orthonormal symmetric pairing units."""
    if i == j:
        return sp.coo_matrix(([1.0], ([i], [j])), shape=(n, n))
    v = 1.0 / np.sqrt(2.0)
    return sp.coo_matrix(([v, v], ([i, j], [j, i])), shape=(n, n))


def _offdiag_pairs(g: ClassicalGraph, adjacent: bool):
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if bool(g.adjacency[i, j]) == adjacent:
                yield i, j


def _theta_max_program(g: ClassicalGraph, variant: str) -> ConicProgram:
    n = g.n
    prog = ConicProgram("max", f"thetabar[{variant}]/max")
    prog.add_block("B", n, "symmetric")
    prog.set_objective({"B": np.ones((n, n))})
    prog.add_eq({"B": pairing_row(sp.identity(n))}, [1.0], "trace")
    prog.add_psd({"B": None}, kind="symmetric", label="B-psd")
    nonedges = [pairing_row(_sym_unit(n, i, j))
                for i, j in _offdiag_pairs(g, adjacent=False)]
    if variant in (LOVASZ, SCHRIJVER):
        if nonedges:
            prog.add_eq({"B": sp.vstack(nonedges)}, np.zeros(len(nonedges)),
                        "nonedge-support")
    else:  # Szegedy: off-support entries merely nonpositive
        if nonedges:
            prog.add_ineq({"B": -sp.vstack(nonedges)}, np.zeros(len(nonedges)),
                          "nonedge-nonpos")
    if variant == SCHRIJVER:
        rows = [pairing_row(_sym_unit(n, i, j))
                for i in range(n) for j in range(i + 1, n)]
        if rows:
            prog.add_ineq({"B": sp.vstack(rows)}, np.zeros(len(rows)),
                          "entrywise-nonneg")
    return prog


def _theta_min_program(g: ClassicalGraph, variant: str) -> ConicProgram:
    n = g.n
    prog = ConicProgram("min", f"thetabar[{variant}]/min")
    prog.add_block("lam", 1, "symmetric")
    prog.add_block("Z", n, "symmetric")
    prog.set_objective({"lam": [[1.0]]})
    # Z - J >= 0 and Z_ii = lam
    from .conic import scalar_to_matrix_superop, sp_identity
    prog.add_psd({"Z": sp_identity(n).real}, const=-np.ones((n, n)),
                 out_dim=n, kind="symmetric", label="Z-J")
    diag_rows = sp.vstack([pairing_row(_sym_unit(n, i, i)) for i in range(n)])
    lam_col = sp.csr_matrix(-np.ones((n, 1)))
    prog.add_eq({"Z": diag_rows, "lam": lam_col}, np.zeros(n), "Z-diag")
    edges = [pairing_row(_sym_unit(n, i, j))
             for i, j in _offdiag_pairs(g, adjacent=True)]
    if variant == LOVASZ:
        if edges:
            prog.add_eq({"Z": sp.vstack(edges)}, np.zeros(len(edges)),
                        "edge-zero")
    elif variant == SCHRIJVER:
        if edges:
            prog.add_ineq({"Z": -sp.vstack(edges)}, np.zeros(len(edges)),
                          "edge-nonpos")
    else:  # Szegedy: Z zero on edges and entrywise nonnegative
        if edges:
            prog.add_eq({"Z": sp.vstack(edges)}, np.zeros(len(edges)),
                        "edge-zero")
        rows = [pairing_row(_sym_unit(n, i, j))
                for i in range(n) for j in range(i + 1, n)]
        if rows:
            prog.add_ineq({"Z": sp.vstack(rows)}, np.zeros(len(rows)),
                          "entrywise-nonneg")
    return prog


def classical_theta(g: ClassicalGraph, variant: str = LOVASZ,
                    solver: Optional[str] = None) -> ClassicalThetaResult:
    if variant not in ThetaVariant.ALL:
        raise ValueError(f"unknown variant {variant}")
    if g.n < 1:
        raise ValueError("graph must have at least one vertex")
    smax = _theta_max_program(g, variant).solve(solver=solver)
    smin = _theta_min_program(g, variant).solve(solver=solver)
    if smax.status != "OPTIMAL" or smin.status != "OPTIMAL":
        raise RuntimeError(f"theta-bar[{variant}] solver failure: "
                           f"max={smax.status} min={smin.status}")
    gap = abs(smax.value - smin.value)
    if gap > 1e-6 * max(1.0, abs(smax.value)):
        raise RuntimeError(f"theta-bar[{variant}] duality gap {gap:.2e}")
    return ClassicalThetaResult(smax.value, variant,
                                witness=smax.variables.get("B"), gap=gap)


# --- brute-force oracles -----------------------------------------------------

_MAX_BRUTE = 12


def clique_number(g: ClassicalGraph) -> int:
    if g.n > _MAX_BRUTE:
        raise ValueError(f"n = {g.n} too large for the brute-force oracle")
    adj = g.adjacency
    best = 1 if g.n else 0
    for k in range(g.n, 1, -1):
        if k <= best:
            break
        for sub in itertools.combinations(range(g.n), k):
            if all(adj[a, b] for a, b in itertools.combinations(sub, 2)):
                best = k
                break
    return best


def chromatic_number(g: ClassicalGraph) -> int:
    if g.n > _MAX_BRUTE:
        raise ValueError(f"n = {g.n} too large for the brute-force oracle")
    if g.n == 0:
        return 0
    adj = g.adjacency
    order = sorted(range(g.n), key=lambda v: -int(adj[v].sum()))

    def colorable(k: int) -> bool:
        colors = [-1] * g.n

        def assign(pos: int) -> bool:
            if pos == g.n:
                return True
            v = order[pos]
            used = {colors[u] for u in range(g.n) if colors[u] >= 0 and adj[v, u]}
            # symmetry break: only allow one brand-new color
            cap = min(k, max(colors[order[i]] for i in range(pos)) + 2) if pos \
                else 1
            for c in range(cap):
                if c not in used:
                    colors[v] = c
                    if assign(pos + 1):
                        return True
                    colors[v] = -1
            return False

        return assign(0)

    for k in range(1, g.n + 1):
        if colorable(k):
            return k
    return g.n


# --- classical characteristic graph -----------------------------------------

@dataclass(frozen=True)
class CharGraphResult:
    """Characteristic graph of a classical source; loop vertices (x with
    x ~ x) make zero-error coding impossible."""

    graph: ClassicalGraph
    loop_vertices: tuple

    @property
    def codable(self) -> bool:
        return not self.loop_vertices


def classical_char_graph(p: np.ndarray) -> CharGraphResult:
    """Characteristic graph of a source P(x,u|i) (array indexed [x,u,i]):
    x ~ y iff some side information u and distinct inputs i != j have
    P(x,u|i) P(y,u|j) > 0."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 3:
        raise ValueError("P must be indexed [x, u, i]")
    if np.any(p < -1e-12) or np.max(np.abs(p.sum(axis=(0, 1)) - 1)) > 1e-9:
        raise ValueError("P must be a conditional distribution over (x,u)")
    nx, nu, ni = p.shape
    adj = np.zeros((nx, nx), dtype=bool)
    loops = []
    for x in range(nx):
        for y in range(x, nx):
            hit = any(p[x, u, i] > 0 and p[y, u, j] > 0
                      for u in range(nu)
                      for i in range(ni) for j in range(ni) if i != j)
            if not hit:
                continue
            if x == y:
                loops.append(x)
            else:
                adj[x, y] = adj[y, x] = True
    return CharGraphResult(ClassicalGraph(nx, adj), tuple(loops))
