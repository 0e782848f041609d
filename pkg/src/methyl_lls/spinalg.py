"""Dense complex linear algebra for small spin-1/2 Hilbert spaces.

Qubit basis index 0 is spin up (aligned with the field), index 1 is spin down.
Multi-spin product states are ordered big-endian in the site index, so site 1
is the most significant bit and |up up up> is product index 0.
"""

from functools import reduce

import numpy as np
from numpy.typing import NDArray

ComplexMatrix = NDArray[np.complex128]

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# ladder operators (sigma_x +/- i sigma_y) / 2
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def _check_square(a: np.ndarray, name: str = "matrix") -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def kron(a, b) -> ComplexMatrix:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_square(a, "a")
    _check_square(b, "b")
    return np.kron(a, b)


def kron_all(*ops) -> ComplexMatrix:
    return reduce(kron, ops)


def embed_single(op, site: int, n: int) -> ComplexMatrix:
    """Place a single-spin operator at ``site`` (1-based) of an ``n``-spin register."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"op must be 2x2, got shape {op.shape}")
    if not 1 <= site <= n:
        raise ValueError(f"site must lie in 1..{n}, got {site}")
    factors = [IDENTITY] * n
    factors[site - 1] = op
    return kron_all(*factors)


def embed_pair(op_i, op_j, site_i: int, site_j: int, n: int) -> ComplexMatrix:
    """Product of two single-spin operators on distinct sites."""
    if site_i == site_j:
        raise ValueError("sites must differ")
    return embed_single(op_i, site_i, n) @ embed_single(op_j, site_j, n)


def adjoint(a) -> ComplexMatrix:
    a = np.asarray(a, dtype=complex)
    _check_square(a)
    return a.conj().T


def commutator(a, b) -> ComplexMatrix:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> ComplexMatrix:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    return a @ b + b @ a


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr[a^dagger b]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    return complex(np.vdot(a, b))


def product_state(*spins) -> NDArray[np.complex128]:
    """Product ket from a sequence of single-spin kets (site 1 first)."""
    return reduce(np.kron, [np.asarray(s, dtype=complex) for s in spins])


def is_hermitian(a, atol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T, atol=atol, rtol=0)


def hermitian_eigvals(a) -> NDArray[np.float64]:
    return np.linalg.eigvalsh(np.asarray(a, dtype=complex))
