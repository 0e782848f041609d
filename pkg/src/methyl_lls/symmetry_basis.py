"""Symmetry-adapted eigenbasis of the three methyl protons.

Every operator here acts on the 8-dim product space of the protons
(site 1 most significant).  ``to_symmetry_basis`` rotates it into the fixed
level order ``PROTON_LEVELS``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .spinalg import (
    DOWN,
    PAULI,
    SIGMA_X,
    UP,
    ComplexMatrix,
    embed_single,
    kron_all,
    product_state,
)

EPSILON = np.exp(2j * np.pi / 3)
N_PROTONS = 3


class SymmetryLabel(enum.IntEnum):
    """C3 irrep label, encoded as 0, +1, -1 with addition mod 3."""

    A = 0
    E_PLUS = 1
    E_MINUS = -1

    def __add__(self, other):
        if isinstance(other, SymmetryLabel):
            return _wrap(int(self) + int(other))
        return NotImplemented

    def __neg__(self):
        return _wrap(-int(self))

    @property
    def phase(self) -> complex:
        """epsilon ** lambda."""
        return EPSILON ** int(self)

    @property
    def short(self) -> str:
        return {0: "A", 1: "Ep", -1: "Em"}[int(self)]


def _wrap(k: int) -> SymmetryLabel:
    r = k % 3
    return SymmetryLabel(r if r < 2 else -1)


A, E_PLUS, E_MINUS = SymmetryLabel.A, SymmetryLabel.E_PLUS, SymmetryLabel.E_MINUS
E_LABELS = (E_PLUS, E_MINUS)
ALL_LABELS = (A, E_PLUS, E_MINUS)


@dataclass(frozen=True)
class LevelIndex:
    s: SymmetryLabel
    m: Fraction
    test_spin: str | None = None  # "up", "down" or None for the bare protons

    def __post_init__(self):
        allowed = {Fraction(3, 2), Fraction(1, 2), Fraction(-1, 2), Fraction(-3, 2)}
        if self.m not in allowed:
            raise ValueError(f"invalid magnetization {self.m}")
        if self.s != A and abs(self.m) != Fraction(1, 2):
            raise ValueError(f"{self.s.name} levels only carry m = +/-1/2")
        if self.test_spin not in (None, "up", "down"):
            raise ValueError(f"invalid test spin {self.test_spin!r}")

    @property
    def label(self) -> str:
        m = f"{'+' if self.m > 0 else '-'}{abs(self.m.numerator)}/2"
        out = f"{self.s.short},{m}"
        if self.test_spin is not None:
            out += f",{'u' if self.test_spin == 'up' else 'd'}"
        return out


_H = Fraction(1, 2)
_T = Fraction(3, 2)
PROTON_LEVELS: tuple[LevelIndex, ...] = (
    LevelIndex(A, _T),
    LevelIndex(A, _H),
    LevelIndex(A, -_H),
    LevelIndex(A, -_T),
    LevelIndex(E_PLUS, _H),
    LevelIndex(E_PLUS, -_H),
    LevelIndex(E_MINUS, _H),
    LevelIndex(E_MINUS, -_H),
)
# test spin is the slowest index
FULL_LEVELS: tuple[LevelIndex, ...] = tuple(
    LevelIndex(lv.s, lv.m, spin) for spin in ("up", "down") for lv in PROTON_LEVELS
)


def level_position(s: SymmetryLabel, m, test_spin: str | None = None) -> int:
    """Index of (s, m[, test spin]) in the fixed level ordering."""
    target = LevelIndex(s, Fraction(m), test_spin)
    levels = PROTON_LEVELS if test_spin is None else FULL_LEVELS
    return levels.index(target)


@dataclass(frozen=True)
class PolarizationParams:
    """Symmetry order ``gamma`` (A vs E), ``beta`` (E+ vs E-), test-spin ``alpha``."""

    gamma: float = 0.0
    beta: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "beta", "alpha"):
            v = getattr(self, name)
            if not np.isfinite(v) or abs(v) > 1:
                raise ValueError(f"{name} must lie in [-1, 1], got {v}")


def _m_positive_states() -> list[np.ndarray]:
    uuu = product_state(UP, UP, UP)
    uud = product_state(UP, UP, DOWN)
    duu = product_state(DOWN, UP, UP)
    udu = product_state(UP, DOWN, UP)
    e, ec = EPSILON, np.conj(EPSILON)
    r3 = np.sqrt(3.0)
    return [
        uuu,
        (uud + duu + udu) / r3,
        (uud + ec * duu + e * udu) / r3,
        (uud + e * duu + ec * udu) / r3,
    ]


def spin_flip() -> ComplexMatrix:
    """Global up <-> down exchange X (x) X (x) X."""
    return kron_all(SIGMA_X, SIGMA_X, SIGMA_X)


def build_symmetry_states() -> list[np.ndarray]:
    """The eight |s, m> kets in ``PROTON_LEVELS`` order."""
    a32, a12, ep12, em12 = _m_positive_states()
    x = spin_flip()
    return [a32, a12, x @ a12, x @ a32, ep12, x @ ep12, em12, x @ em12]


def basis_change() -> ComplexMatrix:
    """Unitary whose columns are the symmetry states (product -> level basis)."""
    return np.column_stack(build_symmetry_states())


def basis_change_full() -> ComplexMatrix:
    """16-dim version for protons (x) test spin, level order ``FULL_LEVELS``."""
    u = basis_change()
    cols = [np.kron(u[:, k], spin) for spin in (UP, DOWN) for k in range(8)]
    return np.column_stack(cols)


def to_symmetry_basis(op) -> ComplexMatrix:
    """Express an 8- or 16-dim product-basis operator in the level basis."""
    op = np.asarray(op, dtype=complex)
    u = {8: basis_change, 16: basis_change_full}[op.shape[0]]()
    return u.conj().T @ op @ u


def from_symmetry_basis(op) -> ComplexMatrix:
    op = np.asarray(op, dtype=complex)
    u = {8: basis_change, 16: basis_change_full}[op.shape[0]]()
    return u @ op @ u.conj().T


def cyclic_permutation() -> ComplexMatrix:
    """P+: the spin on site 1 moves to site 2, site 2 to 3, site 3 to 1."""
    p = np.zeros((8, 8), dtype=complex)
    for idx in range(8):
        b1, b2, b3 = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        new = (b3 << 2) | (b1 << 1) | b2
        p[new, idx] = 1.0
    return p


def collective_spin(axis: str) -> ComplexMatrix:
    if axis not in PAULI:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    return 0.5 * sum(embed_single(PAULI[axis], i, N_PROTONS) for i in (1, 2, 3))


def _level_projector(positions) -> ComplexMatrix:
    states = build_symmetry_states()
    return sum(np.outer(states[k], states[k].conj()) for k in positions)


def base_projectors() -> tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """(rho_A, rho_E+, rho_E-): unit-trace states mixed within one symmetry block."""
    rho_a = _level_projector(range(0, 4)) / 4
    rho_ep = _level_projector((4, 5)) / 2
    rho_em = _level_projector((6, 7)) / 2
    return rho_a, rho_ep, rho_em


def q_lls(gamma: float) -> ComplexMatrix:
    """gamma-polarised long-lived state, A block weighted against the E blocks."""
    return q_protected(gamma, 0.0)


def q_lls_pauli(gamma: float) -> ComplexMatrix:
    """Scalar-product form (1/8)(1 + gamma/3 sum_{j<k} sigma_j . sigma_k)."""
    _check_unit(gamma, "gamma")
    scalar = np.zeros((8, 8), dtype=complex)
    for j, k in ((1, 2), (2, 3), (1, 3)):
        for p in PAULI.values():
            scalar += embed_single(p, j, 3) @ embed_single(p, k, 3)
    return (np.eye(8) + gamma / 3 * scalar) / 8


def q_protected(gamma: float, beta: float) -> ComplexMatrix:
    _check_unit(gamma, "gamma")
    _check_unit(beta, "beta")
    rho_a, rho_ep, rho_em = base_projectors()
    e_part = (1 + beta) / 2 * rho_ep + (1 - beta) / 2 * rho_em
    return (1 + gamma) / 2 * rho_a + (1 - gamma) / 2 * e_part


def _check_unit(value: float, name: str) -> None:
    if not np.isfinite(value) or abs(value) > 1:
        raise ValueError(f"{name} must lie in [-1, 1], got {value}")


def magnetization_projector(m) -> ComplexMatrix:
    """Projector onto total magnetization m of the protons (8x8, product basis)."""
    m = Fraction(m).limit_denominator(2)
    positions = [k for k, lv in enumerate(PROTON_LEVELS) if lv.m == m]
    if not positions:
        raise ValueError(f"m must be one of +/-3/2, +/-1/2, got {m}")
    return _level_projector(positions)


def polarized_test_spin(alpha: float) -> ComplexMatrix:
    """1/2 + alpha I_z for the test spin."""
    _check_unit(alpha, "alpha")
    return np.diag([(1 + alpha) / 2, (1 - alpha) / 2]).astype(complex)


def seed_state(params: PolarizationParams) -> ComplexMatrix:
    """Q_protected(gamma, beta) (x) (1/2 + alpha I_z), product basis, 16x16."""
    return np.kron(q_protected(params.gamma, params.beta), polarized_test_spin(params.alpha))


def thermal_state(proton_pol: float, alpha: float = 0.0) -> ComplexMatrix:
    """(1 + p S_z)/8 (x) (1/2 + alpha I_z): Zeeman-ordered reference seed."""
    if abs(proton_pol) > 2 / 3:
        raise ValueError("proton polarization must satisfy |p| <= 2/3 for positivity")
    protons = (np.eye(8) + proton_pol * collective_spin("z")) / 8
    return np.kron(protons, polarized_test_spin(alpha))
