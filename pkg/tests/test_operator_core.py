"""Algebraic properties of the operator-subspace machinery."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nctheta.operator_core import (
    BipartiteShape,
    conj_space,
    contains,
    ddag,
    full_space,
    hermitian_basis,
    hs_inner,
    hs_norm,
    matrix_from_json,
    matrix_to_json,
    max_entangled,
    orthonormalize,
    partial_trace,
    partial_transpose,
    perp,
    realify,
    rot,
    span_sum,
    subspace_from_json,
    subspace_to_json,
    tensor_space,
    zero_subspace,
)

DIMS = st.integers(min_value=2, max_value=3)


def complex_matrices(n):
    re = arrays(np.float64, (n, n), elements=st.floats(-3, 3))
    im = arrays(np.float64, (n, n), elements=st.floats(-3, 3))
    return st.tuples(re, im).map(lambda p: p[0] + 1j * p[1])


bipartite = DIMS.flatmap(
    lambda n: st.tuples(st.just(n), complex_matrices(n * n)))


@given(bipartite)
def test_rot_involution_and_isometry(arg):
    n, x = arg
    sh = BipartiteShape(n, n)
    assert np.allclose(rot(rot(x, sh), sh), x)
    assert abs(hs_norm(rot(x, sh)) - hs_norm(x)) < 1e-9 * max(1, hs_norm(x))


@given(bipartite)
def test_ddag_involution(arg):
    n, x = arg
    sh = BipartiteShape(n, n)
    assert np.allclose(ddag(ddag(x, sh), sh), x)


@given(bipartite)
def test_partial_transpose_involution_and_isometry(arg):
    n, x = arg
    sh = BipartiteShape(n, n)
    for which in ("A", "B"):
        y = partial_transpose(x, sh, which)
        assert np.allclose(partial_transpose(y, sh, which), x)
        assert abs(hs_norm(y) - hs_norm(x)) < 1e-9 * max(1, hs_norm(x))


@given(bipartite)
def test_ddag_is_rot_conjugation(arg):
    n, x = arg
    sh = BipartiteShape(n, n)
    assert np.allclose(ddag(x, sh), rot(rot(x, sh).conj().T, sh))


def test_rot_of_identity_is_max_entangled():
    for n in (2, 3):
        sh = BipartiteShape(n, n)
        phi = max_entangled(n)
        assert np.allclose(rot(np.eye(n * n, dtype=complex), sh),
                           np.outer(phi, phi.conj()))


def test_partial_trace_of_swap():
    swap = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            swap[2 * j + i, 2 * i + j] = 1
    sh = BipartiteShape(2, 2)
    assert np.allclose(partial_trace(swap, sh, "B"), np.eye(2))
    assert np.allclose(partial_trace(swap, sh, "A"), np.eye(2))


def test_partial_transpose_of_max_entangled_is_swap():
    phi = max_entangled(2)
    j = np.outer(phi, phi.conj())
    pt = partial_transpose(j, BipartiteShape(2, 2), "B")
    # SWAP has eigenvalues +-1 and squares to I
    assert np.allclose(pt @ pt, np.eye(4))
    assert np.allclose(pt, pt.conj().T)


@given(DIMS.flatmap(lambda n: complex_matrices(n).map(
    lambda x: (x + x.conj().T) / 2)))
def test_realify_spectrum_doubles(h):
    r = realify(h)
    assert np.allclose(r, r.T)
    ev_h = np.sort(np.linalg.eigvalsh(h))
    ev_r = np.sort(np.linalg.eigvalsh(r))
    assert np.allclose(ev_r, np.sort(np.concatenate([ev_h, ev_h])), atol=1e-8)


def test_hermitian_basis_is_orthonormal():
    for d in (2, 3, 4):
        basis = hermitian_basis(d)
        assert len(basis) == d * d
        for i, a in enumerate(basis):
            assert np.allclose(a, a.conj().T)
            for j, b in enumerate(basis):
                want = 1.0 if i == j else 0.0
                assert abs(hs_inner(a, b) - want) < 1e-12


@settings(deadline=None)
@given(st.integers(2, 3), st.integers(1, 4), st.randoms(use_true_random=False))
def test_orthonormalize_idempotent_and_projector(d, k, rnd):
    rng = np.random.default_rng(rnd.randint(0, 2**31))
    mats = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            for _ in range(k)]
    s = orthonormalize([(m + m.conj().T) / 2 for m in mats])
    again = orthonormalize(s.basis)
    assert s.dim == again.dim
    assert np.allclose(s.projector, again.projector, atol=1e-9)
    for b in s.basis:
        assert contains(s, b)


def test_perp_complements():
    rng = np.random.default_rng(7)
    for d in (2, 3):
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        s = orthonormalize([x + x.conj().T])
        sp_ = perp(s)
        assert s.dim + sp_.dim == d * d
        assert np.allclose(s.projector + sp_.projector, np.eye(d * d),
                           atol=1e-9)
        assert np.allclose(perp(sp_).projector, s.projector, atol=1e-9)


def test_span_sum_and_zero_space():
    s = orthonormalize([np.eye(2, dtype=complex)])
    z = zero_subspace(2)
    assert span_sum(s, z).dim == 1
    assert span_sum(s, full_space(2)).dim == 4


def test_tensor_and_conj_space():
    rng = np.random.default_rng(11)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    s = orthonormalize([x + x.conj().T, 1j * (x - x.conj().T)])
    t = tensor_space(s, conj_space(s))
    assert t.ambient_dim == 4
    assert t.dim == s.dim ** 2
    for a in s.basis:
        for b in s.basis:
            assert contains(t, np.kron(a, b.conj()))
    cc = conj_space(conj_space(s))
    assert np.allclose(cc.projector, s.projector, atol=1e-12)


def test_matrix_json_round_trip():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.allclose(matrix_from_json(matrix_to_json(x)), x)
    # the dict must survive a JSON text round trip too
    obj = json.loads(json.dumps(matrix_to_json(x)))
    assert np.allclose(matrix_from_json(obj), x)


def test_subspace_json_round_trip():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    s = orthonormalize([x + x.conj().T])
    obj = json.loads(json.dumps(subspace_to_json(s)))
    t = subspace_from_json(obj)
    assert np.allclose(s.projector, t.projector, atol=1e-12)


def test_orthonormalize_rejects_nothing_hermitian():
    # a non-Hermitian generator contributes both its Hermitian and
    # anti-Hermitian parts, keeping the span dagger-closed
    x = np.array([[0, 1], [0, 0]], dtype=complex)
    s = orthonormalize([x])
    assert s.dim == 2
    assert contains(s, x)
    assert contains(s, x.conj().T)
