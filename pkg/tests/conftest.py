import numpy as np
import pytest

from cavityqed.hilbert import BasisDescriptor, StateVector


def random_state(rng: np.random.Generator, basis: BasisDescriptor) -> StateVector:
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return StateVector.from_unnormalized(basis, v)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
