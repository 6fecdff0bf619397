import math

import numpy as np
import pytest

# Independent Pauli matrices so oracles do not go through the package's tables.
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID = np.eye(2, dtype=complex)
PAULI = {"1": ID, "x": SX, "y": SY, "z": SZ}


def kron_spin(a: str, b: str) -> np.ndarray:
    """``I_{k a} I_{l b}`` with identity written as ``1`` (not halved)."""
    fa = PAULI[a] if a == "1" else PAULI[a] / 2
    fb = PAULI[b] if b == "1" else PAULI[b] / 2
    return np.kron(fa, fb)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d, norm=None):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = 0.5 * (z + z.conj().T)
    if norm is not None:
        h *= norm / np.linalg.norm(h, 2)
    return h


PI = math.pi
