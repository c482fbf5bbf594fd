import numpy as np
import pytest

from nctheta.operator_core import OperatorSubspace, orthonormalize


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (x + x.conj().T) / 2.0


def random_trace_free_space(rng: np.random.Generator, d: int,
                            k: int) -> OperatorSubspace:
    while True:
        mats = []
        for _ in range(k):
            x = random_hermitian(rng, d)
            x -= np.trace(x).real / d * np.eye(d)
            mats.append(x)
        s = orthonormalize(np.array(mats))
        if s.dim == k:
            return s


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
