"""Rank-2 dipolar tensors and their C3-symmetrized combinations.

Heteronuclear operators act on protons (x) test spin (16-dim, product
ordering with the test spin as the fastest index); homonuclear operators act
on the 8-dim proton space.

Phase convention: the symmetrized operators weight sites (1, 2, 3) with
(1, eps^-lambda, eps^lambda) and the spatial coefficients with the conjugate
pattern.  With the eigenstates and the P+ direction of ``symmetry_basis``
this is the pairing under which S^lambda_p maps |s, m> to |s + lambda, m + p>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import constants as sc

from .spinalg import (
    IDENTITY,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ComplexMatrix,
    embed_single,
    kron,
)
from .symmetry_basis import EPSILON, SymmetryLabel

SQRT3 = np.sqrt(3.0)

# single-spin components: index 0 is sigma_z / 2, +/-1 the ladder operators
SPIN_COMPONENT = {1: SIGMA_PLUS, 0: SIGMA_Z / 2, -1: SIGMA_MINUS}

# (q, p) -> amplitude of S_p (x) I_{q-p} inside T_(q, p)
TABLE_AMPLITUDE = {
    (0, 1): -1 / np.sqrt(6),
    (0, 0): np.sqrt(8 / 3),
    (0, -1): -1 / np.sqrt(6),
    (1, 1): -1.0,
    (1, 0): -1.0,
    (-1, -1): 1.0,
    (-1, 0): 1.0,
    (2, 1): 1.0,
    (-2, -1): 1.0,
}
VALID_QP = tuple(TABLE_AMPLITUDE)


@dataclass(frozen=True)
class PhysicalConstants:
    gamma_S: float = 267.52218744e6  # proton, rad/(s T)
    gamma_I: float = 67.2828e6  # 13C, rad/(s T)
    hbar: float = sc.hbar
    mu0: float = sc.mu_0

    @property
    def c0(self) -> float:
        return -self.hbar * self.mu0 * self.gamma_I * self.gamma_S / (4 * np.pi)

    @property
    def c1(self) -> float:
        # homonuclear prefactor; the protons' own ratio would be gamma_S
        return -self.hbar * self.mu0 * self.gamma_I**2 / (4 * np.pi)


@dataclass(frozen=True)
class SphericalCoordinate:
    r: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")


@dataclass(frozen=True)
class FrequencyParams:
    omega_S: float = 0.0
    omega_I: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.omega_S) and np.isfinite(self.omega_I)):
            raise ValueError("Larmor frequencies must be finite")

    def of(self, q: int, p: int) -> float:
        return p * self.omega_S + (q - p) * self.omega_I


@dataclass(frozen=True)
class TensorComponent:
    q: int
    p: int
    operator: ComplexMatrix = field(repr=False)
    frequency: float


def _check_q(q: int) -> None:
    if q not in (-2, -1, 0, 1, 2):
        raise ValueError(f"q must be in -2..2, got {q}")


def _check_qp(q: int, p: int) -> None:
    if (q, p) not in TABLE_AMPLITUDE:
        raise ValueError(f"(q, p) = ({q}, {p}) is not a dipolar component")


def _pair_tensor(q: int, s_ops: dict, i_ops: dict) -> ComplexMatrix:
    """T_q built from component operators of two spins living in one space."""
    sz, sp, sm = s_ops[0], s_ops[1], s_ops[-1]
    iz, ip, im = i_ops[0], i_ops[1], i_ops[-1]
    if q == 0:
        s_dot_i = sz @ iz + 0.5 * (sp @ im + sm @ ip)
        return np.sqrt(2 / 3) * (3 * sz @ iz - s_dot_i)
    if q == 1:
        return -(sz @ ip + sp @ iz)
    if q == -1:
        return sz @ im + sm @ iz
    if q == 2:
        return sp @ ip
    return sm @ im


def _two_spin_components():
    s = {k: kron(v, IDENTITY) for k, v in SPIN_COMPONENT.items()}
    i = {k: kron(IDENTITY, v) for k, v in SPIN_COMPONENT.items()}
    return s, i


def two_spin_tensor(q: int) -> ComplexMatrix:
    """Normalized bilinear T_q for spins S (first factor) and I (second), 4x4."""
    _check_q(q)
    s, i = _two_spin_components()
    return _pair_tensor(q, s, i)


def two_spin_scalar() -> ComplexMatrix:
    """S . I on the 4-dim pair space."""
    return sum(
        kron(p, IDENTITY) @ kron(IDENTITY, p) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)
    ) / 4


def tensor_qp(q: int, p: int, freqs: FrequencyParams | None = None) -> TensorComponent:
    """Component T_(q, p) of T_q with definite Zeeman frequency p w_S + (q-p) w_I."""
    _check_qp(q, p)
    freqs = freqs or FrequencyParams()
    op = TABLE_AMPLITUDE[q, p] * kron(SPIN_COMPONENT[p], SPIN_COMPONENT[q - p])
    return TensorComponent(q, p, op, freqs.of(q, p))


def spatial_F(q: int, r: float, theta: float) -> float:
    _check_q(q)
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    c, s = np.cos(theta), np.sin(theta)
    if q == 0:
        return np.sqrt(3 / 2) * (3 * c**2 - 1) / (2 * r**3)
    if abs(q) == 1:
        return -np.sign(q) * 1.5 * s * c / r**3
    return 0.75 * s**2 / r**3


def coupling_B(q: int, coord: SphericalCoordinate, constants: PhysicalConstants) -> complex:
    return constants.c0 * np.exp(-1j * q * coord.phi) * spatial_F(q, coord.r, coord.theta)


def coupling_G(q: int, coord: SphericalCoordinate, constants: PhysicalConstants) -> complex:
    return constants.c1 * np.exp(-1j * q * coord.phi) * spatial_F(q, coord.r, coord.theta)


def site_weights(lam: SymmetryLabel) -> np.ndarray:
    """Operator weights of sites (1, 2, 3), including the 1/sqrt(3)."""
    e = EPSILON ** int(lam)
    return np.array([1.0, np.conj(e), e]) / SQRT3


def sym_coefficient(lam: SymmetryLabel, b1: complex, b2: complex, b3: complex) -> complex:
    """C3 Fourier component of three per-site (or per-pair) couplings."""
    return complex(np.dot(np.conj(site_weights(lam)), [b1, b2, b3]))


def proton_component(p: int, site: int) -> ComplexMatrix:
    return embed_single(SPIN_COMPONENT[p], site, 3)


def sym_spin_op(lam: SymmetryLabel, p: int) -> ComplexMatrix:
    """Collective operator S^lambda_p on the protons, 8x8."""
    if p not in SPIN_COMPONENT:
        raise ValueError(f"p must be -1, 0 or 1, got {p}")
    w = site_weights(lam)
    return sum(w[j] * proton_component(p, j + 1) for j in range(3))


def het_site_tensor(site: int, q: int, p: int) -> ComplexMatrix:
    """T^j_(q, p) between proton ``site`` and the test spin, 16x16."""
    _check_qp(q, p)
    return TABLE_AMPLITUDE[q, p] * kron(proton_component(p, site), SPIN_COMPONENT[q - p])


def het_symmetrized(lam: SymmetryLabel, q: int, p: int) -> ComplexMatrix:
    _check_qp(q, p)
    w = site_weights(lam)
    return sum(w[j] * het_site_tensor(j + 1, q, p) for j in range(3))


def het_lindblad_op(lam: SymmetryLabel, p: int, test_p: int) -> ComplexMatrix:
    """Bare S^lambda_p (x) I_{test_p}, without the table amplitude."""
    return kron(sym_spin_op(lam, p), SPIN_COMPONENT[test_p])


HOMO_PAIRS = ((1, 2), (2, 3), (3, 1))


def pair_tensor(q: int, i: int, j: int) -> ComplexMatrix:
    """T_q between protons i and j on the 8-dim proton space."""
    _check_q(q)
    s = {k: proton_component(k, i) for k in SPIN_COMPONENT}
    t = {k: proton_component(k, j) for k in SPIN_COMPONENT}
    return _pair_tensor(q, s, t)


def pair_flipflop(i: int, j: int) -> ComplexMatrix:
    return proton_component(1, i) @ proton_component(-1, j) + proton_component(
        -1, i
    ) @ proton_component(1, j)


def homo_symmetrized(lam: SymmetryLabel, q: int) -> ComplexMatrix:
    _check_q(q)
    w = site_weights(lam)
    return sum(w[k] * pair_tensor(q, *pair) for k, pair in enumerate(HOMO_PAIRS))


def homo_flipflop(lam: SymmetryLabel) -> ComplexMatrix:
    """Flip-flop part of the symmetrized q = 0 tensor, the zz part removed and
    the -1/sqrt(6) amplitude stripped (it enters the rate as 1/6)."""
    w = site_weights(lam)
    return sum(w[k] * pair_flipflop(*pair) for k, pair in enumerate(HOMO_PAIRS))


def zeeman_generator(freqs: FrequencyParams) -> ComplexMatrix:
    """w_S S_z (x) 1 + w_I 1 (x) I_z on the 16-dim space."""
    sz = sum(proton_component(0, j) for j in (1, 2, 3))
    return freqs.omega_S * kron(sz, IDENTITY) + freqs.omega_I * kron(np.eye(8), SIGMA_Z / 2)
