"""Complex matrix algebra and operator-subspace machinery.

Everything here is a pure function on immutable data.  An operator subspace
is stored as an orthonormal Hermitian basis under the Hilbert-Schmidt inner
product <X,Y> = Tr(X^dag Y); a subspace is dagger-closed iff it admits such a
basis, and every space we build satisfies S = S^dag.  Subspace equality is
always tested through the d^2 x d^2 orthogonal projector, which is
basis-independent.

Bipartite bookkeeping (partial trace / transpose, the rotated transpose and
the double dagger) is explicit via BipartiteShape rather than any symbolic
space registry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_GS_TOL = 1e-9
PROJECTOR_TOL = 1e-8
HERM_TOL = 1e-12


def hs_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(x^dag y)."""
    return complex(np.sum(np.conj(x) * y))


def hs_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def assert_hermitian(x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    dev = np.max(np.abs(x - x.conj().T)) if x.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
    return x


def _as_square(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")
    return x


# Real isometric vectorization of Hermitian matrices: a d x d Hermitian
# matrix maps to a length-d^2 real vector (diagonal, then sqrt(2)-scaled real
# and imaginary upper-triangular parts), preserving the HS inner product.

def _herm_to_rvec(x: np.ndarray) -> np.ndarray:
    d = x.shape[0]
    iu = np.triu_indices(d, k=1)
    return np.concatenate([
        np.real(np.diagonal(x)),
        np.sqrt(2.0) * np.real(x[iu]),
        np.sqrt(2.0) * np.imag(x[iu]),
    ])


def _rvec_to_herm(v: np.ndarray, d: int) -> np.ndarray:
    iu = np.triu_indices(d, k=1)
    k = iu[0].size
    out = np.zeros((d, d), dtype=complex)
    out[np.diag_indices(d)] = v[:d]
    upper = (v[d:d + k] + 1j * v[d + k:d + 2 * k]) / np.sqrt(2.0)
    out[iu] = upper
    out[(iu[1], iu[0])] = np.conj(upper)
    return out


@dataclass(frozen=True)
class BipartiteShape:
    """Factor dimensions of a bipartite operator on C^dim_a (x) C^dim_b."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValueError("factor dimensions must be positive")

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b

    def check(self, x: np.ndarray) -> np.ndarray:
        x = _as_square(x)
        if x.shape[0] != self.total:
            raise ValueError(
                f"matrix dimension {x.shape[0]} != {self.dim_a}*{self.dim_b}")
        return x


@dataclass(frozen=True)
class OperatorSubspace:
    """Dagger-closed subspace of d x d matrices via an orthonormal Hermitian basis.

    basis has shape (k, d, d); rows are orthonormal Hermitian matrices.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1:] != (self.ambient_dim, self.ambient_dim):
            raise ValueError(f"bad basis shape {b.shape}")
        object.__setattr__(self, "basis", b)
        b.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def is_trace_free(self) -> bool:
        if self.dim == 0:
            return True
        traces = np.trace(self.basis, axis1=1, axis2=2)
        return bool(np.max(np.abs(traces)) < 1e-9)

    def validate(self, tol: float = 1e-9) -> None:
        k, d = self.dim, self.ambient_dim
        if k == 0:
            return
        flat = self.basis.reshape(k, d * d)
        gram = flat.conj() @ flat.T
        if np.max(np.abs(gram - np.eye(k))) > tol:
            raise ValueError("basis is not orthonormal")
        dev = np.max(np.abs(self.basis - np.conj(np.transpose(self.basis, (0, 2, 1)))))
        if dev > tol:
            raise ValueError("basis is not Hermitian")

    @cached_property
    def projector(self) -> np.ndarray:
        """d^2 x d^2 orthogonal projector onto the (complex) span."""
        d = self.ambient_dim
        flat = self.basis.reshape(self.dim, d * d)
        return flat.T @ flat.conj()

    def project(self, x: np.ndarray) -> np.ndarray:
        x = _as_square(x)
        if x.shape[0] != self.ambient_dim:
            raise ValueError("dimension mismatch")
        if self.dim == 0:
            return np.zeros_like(x)
        coeff = np.tensordot(np.conj(self.basis), x, axes=([1, 2], [0, 1]))
        return np.tensordot(coeff, self.basis, axes=(0, 0))

    def equals(self, other: "OperatorSubspace", tol: float = PROJECTOR_TOL) -> bool:
        if self.ambient_dim != other.ambient_dim:
            return False
        return np.max(np.abs(self.projector - other.projector)) < tol if \
            self.ambient_dim else True


def zero_subspace(d: int) -> OperatorSubspace:
    return OperatorSubspace(d, np.zeros((0, d, d), dtype=complex))


def full_space(d: int) -> OperatorSubspace:
    return OperatorSubspace(d, np.stack(hermitian_basis(d)))


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Standard orthonormal Hermitian basis of L(C^d): units, then X- and Y-type dyads."""
    out = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    s = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = s
            e[j, i] = s
            out.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[i, j] = -1j * s
            f[j, i] = 1j * s
            out.append(f)
    return out


def orthonormalize(spanning: Iterable[np.ndarray],
                   tol: float = DEFAULT_GS_TOL) -> OperatorSubspace:
    """Orthonormal Hermitian basis of the dagger-closure of the span.

    Each input X contributes X + X^dag and i(X - X^dag); the rank cutoff is
    `tol` relative to the largest input norm.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    mats = [_as_square(x) for x in spanning]
    if not mats:
        raise ValueError("empty spanning set (ambient dimension unknown)")
    d = mats[0].shape[0]
    for x in mats:
        if x.shape[0] != d:
            raise ValueError("dimension mismatch among inputs")
    herm = []
    for x in mats:
        herm.append(x + x.conj().T)
        herm.append(1j * (x - x.conj().T))
    rows = np.array([_herm_to_rvec(h) for h in herm])
    scale = float(np.max(np.linalg.norm(rows, axis=1))) if rows.size else 0.0
    if scale <= tol:
        return zero_subspace(d)
    _, sv, vt = np.linalg.svd(rows, full_matrices=False)
    keep = sv > tol * scale
    basis = np.stack([_rvec_to_herm(v, d) for v in vt[keep]]) if keep.any() \
        else np.zeros((0, d, d), dtype=complex)
    return OperatorSubspace(d, basis)


def contains(s: OperatorSubspace, x: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff ||x - proj_S(x)|| <= tol * ||x||; the zero matrix is always contained."""
    x = _as_square(x)
    if x.shape[0] != s.ambient_dim:
        raise ValueError("dimension mismatch")
    nx = hs_norm(x)
    if nx == 0.0:
        return True
    return hs_norm(x - s.project(x)) <= tol * nx


def perp(s: OperatorSubspace) -> OperatorSubspace:
    """Orthogonal complement under the HS inner product (again dagger-closed).

    When the span is a coordinate subspace of the Hermitian vectorization
    (e.g. spans of matrix-unit dyads, as for classical graphs) the complement
    basis is returned as the complementary coordinate units, which keeps it
    sparse; otherwise an SVD null space is used.
    """
    d = s.ambient_dim
    k = s.dim
    if k == 0:
        return full_space(d)
    rows = np.array([_herm_to_rvec(b) for b in s.basis])
    # coordinate-subspace fast path
    colnorm = np.linalg.norm(rows, axis=0)
    mask = colnorm > 0.5
    if int(mask.sum()) == k and np.linalg.norm(rows[:, ~mask]) < 1e-12:
        idx = np.nonzero(~mask)[0]
        basis = np.zeros((idx.size, d, d), dtype=complex)
        for m, i in enumerate(idx):
            v = np.zeros(d * d)
            v[i] = 1.0
            basis[m] = _rvec_to_herm(v, d)
        return OperatorSubspace(d, basis)
    _, sv, vt = np.linalg.svd(rows, full_matrices=True)
    null = vt[k:]
    if null.shape[0] == 0:
        return zero_subspace(d)
    basis = np.stack([_rvec_to_herm(v, d) for v in null])
    return OperatorSubspace(d, basis)


def tensor_space(s: OperatorSubspace, t: OperatorSubspace) -> OperatorSubspace:
    """Span of {a (x) b}; tensor products of the bases stay orthonormal Hermitian."""
    da, db = s.ambient_dim, t.ambient_dim
    d = da * db
    if s.dim == 0 or t.dim == 0:
        return zero_subspace(d)
    basis = np.einsum("aij,bkl->abikjl", s.basis, t.basis)
    basis = basis.reshape(s.dim * t.dim, d, d)
    return OperatorSubspace(d, basis)


def conj_space(s: OperatorSubspace) -> OperatorSubspace:
    """Entrywise complex conjugate of the span (same dimension, still Hermitian)."""
    return OperatorSubspace(s.ambient_dim, np.conj(s.basis))


def span_sum(*spaces: OperatorSubspace) -> OperatorSubspace:
    """Orthonormalized sum of subspaces (all in the same ambient)."""
    d = spaces[0].ambient_dim
    mats = [b for sp in spaces for b in sp.basis]
    if not mats:
        return zero_subspace(d)
    return orthonormalize(mats)


def partial_trace(x: np.ndarray, shape: BipartiteShape, which: str) -> np.ndarray:
    x = shape.check(x)
    a, b = shape.dim_a, shape.dim_b
    t = x.reshape(a, b, a, b)
    if which == "A":
        return np.einsum("ikil->kl", t)
    if which == "B":
        return np.einsum("ikjk->ij", t)
    raise ValueError("which must be 'A' or 'B'")


def partial_transpose(x: np.ndarray, shape: BipartiteShape, which: str) -> np.ndarray:
    x = shape.check(x)
    a, b = shape.dim_a, shape.dim_b
    t = x.reshape(a, b, a, b)
    if which == "A":
        t = t.transpose(2, 1, 0, 3)
    elif which == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError("which must be 'A' or 'B'")
    return t.reshape(a * b, a * b)


def rot(x: np.ndarray, shape: BipartiteShape) -> np.ndarray:
    """Rotated transpose: linear extension of |i><j| (x) |k><l|  ->  |i><k| (x) |j><l|.

    Requires equal factors; an involution and HS isometry with
    rot(I (x) I) = |Phi><Phi| (unnormalized maximally entangled Phi).
    """
    x = shape.check(x)
    n = shape.dim_a
    if shape.dim_b != n:
        raise ValueError("rot requires equal factor dimensions")
    return x.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)


def ddag(x: np.ndarray, shape: BipartiteShape) -> np.ndarray:
    """Double dagger X^ddag = rot(rot(X)^dag); involution with rot(X^ddag) = rot(X)^dag."""
    return rot(rot(x, shape).conj().T, shape)


def max_entangled(n: int) -> np.ndarray:
    """Unnormalized |Phi> = sum_i |i>|i> as a vector of length n^2."""
    return np.eye(n, dtype=complex).reshape(n * n, order="C")


def realify(h: np.ndarray) -> np.ndarray:
    """Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian H."""
    h = assert_hermitian(h)
    re, im = np.real(h), np.imag(h)
    return np.block([[re, -im], [im, re]])


# --- JSON interchange -------------------------------------------------------

def matrix_to_json(x: np.ndarray) -> dict:
    x = _as_square(x)
    return {
        "dim": int(x.shape[0]),
        "entries": [[[float(np.real(v)), float(np.imag(v))] for v in row]
                    for row in x],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    d = int(obj["dim"])
    ent = obj["entries"]
    if len(ent) != d or any(len(row) != d for row in ent):
        raise ValueError("entries shape does not match dim")
    return np.array([[complex(v[0], v[1]) for v in row] for row in ent])


def subspace_to_json(s: OperatorSubspace) -> dict:
    return {
        "ambient_dim": int(s.ambient_dim),
        "basis": [matrix_to_json(b) for b in s.basis],
    }


def subspace_from_json(obj: dict) -> OperatorSubspace:
    d = int(obj["ambient_dim"])
    mats = [matrix_from_json(m) for m in obj.get("basis", [])]
    if not mats:
        return zero_subspace(d)
    for m in mats:
        if m.shape[0] != d:
            raise ValueError("basis element dimension mismatch")
    return orthonormalize(mats)


def save_subspace(path: str, s: OperatorSubspace) -> None:
    with open(path, "w") as f:
        json.dump(subspace_to_json(s), f)


def load_subspace(path: str) -> OperatorSubspace:
    with open(path) as f:
        return subspace_from_json(json.load(f))
