"""Conic program builder and the three SDP invariants (unit-scale checks;
the heavy batches live in the acceptance suite)."""

import json

import numpy as np
import pytest
import scipy.sparse as sp

from conftest import random_trace_free_space

from nctheta.conic import (
    ConeId,
    ConicProgram,
    cost_rate_bound,
    pairing_row,
    ptrace_superop,
    ptranspose_superop,
    rot_superop,
    sp_ddag,
    sp_ptranspose,
    sp_rot,
    theta_minus,
    theta_perp,
    theta_plus,
)
from nctheta.ncgraph import (
    LoopedGraph,
    complete_classical,
    complete_quantum,
    from_classical,
    ClassicalGraph,
)
from nctheta.operator_core import (
    BipartiteShape,
    ddag,
    orthonormalize,
    partial_trace,
    partial_transpose,
    rot,
    tensor_space,
)


# --- sparse superoperators against dense oracles -------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_superops_match_dense(n, rng):
    d = n * n
    sh = BipartiteShape(n, n)
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    v = x.reshape(-1, order="F")
    assert np.allclose((rot_superop(n) @ v).reshape(d, d, order="F"),
                       rot(x, sh))
    assert np.allclose((ptranspose_superop(n, n, "B") @ v)
                       .reshape(d, d, order="F"),
                       partial_transpose(x, sh, "B"))
    assert np.allclose((ptrace_superop(n, n, "A") @ v)
                       .reshape(n, n, order="F"),
                       partial_trace(x, sh, "A"))
    xs = sp.coo_matrix(x)
    assert np.allclose(sp_rot(xs, n).toarray(), rot(x, sh))
    assert np.allclose(sp_ddag(xs, n).toarray(), ddag(x, sh))
    assert np.allclose(sp_ptranspose(xs, n, n, "B").toarray(),
                       partial_transpose(x, sh, "B"))


def test_pairing_row_semantics(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    row = pairing_row(sp.coo_matrix(a))
    assert np.allclose((row @ x.reshape(-1, order="F"))[0], np.vdot(a, x))


# --- tiny programs -------------------------------------------------------------

def test_trivial_min():
    p = ConicProgram("min", "toy-min")
    p.add_block("x", 1, "symmetric")
    p.set_objective({"x": [[1.0]]})
    p.add_ineq({"x": sp.csr_matrix(np.ones((1, 1)))}, [1.0], "x>=1")
    s = p.solve()
    assert s.status == "OPTIMAL" and abs(s.value - 1.0) < 1e-7


def test_trivial_psd_max():
    p = ConicProgram("max", "toy-max")
    p.add_block("X", 2)
    p.set_objective({"X": np.eye(2)})
    p.add_psd({"X": None}, label="X-psd")
    p.add_ineq({"X": -pairing_row(sp.identity(2, dtype=complex))}, [-3.0],
               "trace<=3")
    s = p.solve()
    assert s.status == "OPTIMAL" and abs(s.value - 3.0) < 1e-6


def test_trivial_infeasible():
    p = ConicProgram("min", "toy-infeasible")
    p.add_block("X", 2)
    p.set_objective({"X": np.eye(2)})
    p.add_psd({"X": None}, const=-np.eye(2), label="X>=I")
    p.add_psd({"X": -sp.identity(4)}, const=-np.eye(2), out_dim=2,
              label="-X>=I")
    assert p.solve().status == "INFEASIBLE"


def test_program_dump_deterministic():
    def build():
        p = ConicProgram("min", "dump")
        p.add_block("x", 2)
        p.set_objective({"x": np.eye(2)})
        p.add_psd({"x": None}, label="x-psd")
        p.add_eq({"x": pairing_row(sp.identity(2, dtype=complex))}, [1.0],
                 "trace")
        return json.dumps(p.to_json(), sort_keys=True)

    assert build() == build()


# --- invariants: pinned small values -------------------------------------------

def test_theta_perp_complete_graphs():
    for n in (2, 3):
        assert abs(theta_perp(complete_classical(n)).value - n) < 1e-6
        assert abs(theta_perp(complete_quantum(n)).value - n * n) < 1e-6


def test_theta_minus_k2_all_cones():
    k2 = complete_classical(2)
    for cone in ConeId.ALL:
        r = theta_minus(k2, cone)
        assert r.status == "OPTIMAL" and abs(r.value - 2.0) < 1e-6


def test_theta_plus_q2():
    q2 = complete_quantum(2)
    assert abs(theta_plus(q2, ConeId.PSD).value - 4.0) < 1e-6
    for cone in (ConeId.PPT, ConeId.PSD_AND_PPT):
        r = theta_plus(q2, cone)
        assert r.is_infinite and r.status == "INFEASIBLE"


def test_gap_reported_on_optimal():
    r = theta_perp(complete_classical(2))
    assert r.gap is not None and r.gap < 1e-5 * max(1.0, r.value)


def test_values_at_least_one(rng):
    s = random_trace_free_space(rng, 2, 2)
    for fn in (lambda: theta_perp(s),
               lambda: theta_minus(s, ConeId.PPT)):
        r = fn()
        assert r.status == "OPTIMAL" and r.value >= 1.0 - 1e-7


def test_chain_ordering_small(rng):
    s = random_trace_free_space(rng, 2, 2)
    tp = theta_perp(s).value
    m_psd = theta_minus(s, ConeId.PSD).value
    m_both = theta_minus(s, ConeId.PSD_AND_PPT).value
    p_psd = theta_plus(s, ConeId.PSD).value
    p_both = theta_plus(s, ConeId.PSD_AND_PPT).value
    eps = 1e-5
    assert m_both <= m_psd + eps
    assert m_psd <= tp + eps
    assert tp <= p_psd + eps
    assert p_psd <= p_both + eps


def test_tensor_identity_invariance(rng):
    s = random_trace_free_space(rng, 2, 2)
    ci = orthonormalize([np.eye(2, dtype=complex)])
    a = theta_perp(s).value
    b = theta_perp(tensor_space(s, ci)).value
    assert abs(a - b) < 1e-5


def test_classical_reduction_smoke():
    g = ClassicalGraph.from_edges(3, [(0, 1), (1, 2)])
    from nctheta.classical import classical_theta, LOVASZ
    a = theta_perp(from_classical(g)).value
    b = classical_theta(g, LOVASZ).value
    assert abs(a - b) < 1e-5


def test_cost_rate_bound():
    g = LoopedGraph(complete_classical(2),
                    orthonormalize([np.eye(2, dtype=complex)]))
    rate = cost_rate_bound(g, complete_quantum(2))
    # log2(theta(K2)) / log2(theta(Q2)) = 1/2
    assert abs(rate - 0.5) < 1e-5
    bad = LoopedGraph(complete_classical(2),
                      orthonormalize([np.diag([1.0, -1.0]).astype(complex)]))
    with pytest.raises(ValueError):
        cost_rate_bound(bad, complete_quantum(2))


def test_unknown_cone_rejected():
    with pytest.raises(ValueError):
        theta_minus(complete_classical(2), "sep")
