"""Dipolar Lindblad dissipators, the classical rate model, and the closed-form
short-time solutions of that model.

Populations are indexed by ``FULL_LEVELS`` (16, heteronuclear) or
``PROTON_LEVELS`` (8, homonuclear).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .dipolar import het_lindblad_op, homo_flipflop, homo_symmetrized
from .spinalg import ComplexMatrix, is_hermitian
from .symmetry_basis import (
    ALL_LABELS,
    E_LABELS,
    E_MINUS,
    E_PLUS,
    FULL_LEVELS,
    A,
    PolarizationParams,
    SymmetryLabel,
    level_position,
    seed_state,
    q_protected,
    to_symmetry_basis,
)

Vector = NDArray[np.float64]


@dataclass
class SpectralDensitySet:
    """Non-negative relaxation rates (1/s), one per (label, order).

    ``het[(lam, q)]`` holds J^lam_q, ``homo[(lam, q)]`` holds g^lam_q.  Each
    value drives both the (lam, q) dissipator and its (-lam, -q) partner.
    Missing keys read as zero.
    """

    het: dict = field(default_factory=dict)
    homo: dict = field(default_factory=dict)

    def __post_init__(self):
        for table in (self.het, self.homo):
            for (lam, q), v in list(table.items()):
                if q not in (0, 1, 2):
                    raise ValueError(f"order q must be 0, 1 or 2, got {q}")
                if not np.isfinite(v) or v < 0:
                    raise ValueError(f"spectral density for ({lam!r}, {q}) must be >= 0, got {v}")
                table[SymmetryLabel(lam), q] = float(table.pop((lam, q)))

    def J(self, lam, q: int) -> float:
        return self.het.get((SymmetryLabel(lam), q), 0.0)

    def g(self, lam, q: int) -> float:
        return self.homo.get((SymmetryLabel(lam), q), 0.0)

    @classmethod
    def from_flat(cls, d: dict) -> "SpectralDensitySet":
        """Build from keys like ``J2_Ep``, ``g1_Em``, ``J0_A``."""
        suffix = {"Ep": E_PLUS, "Em": E_MINUS, "A": A}
        het, homo = {}, {}
        for key, value in d.items():
            if len(key) < 4 or key[0] not in "Jg" or key[2] != "_":
                continue
            lam = suffix.get(key[3:])
            if lam is None or key[1] not in "012":
                continue
            (het if key[0] == "J" else homo)[lam, int(key[1])] = value
        return cls(het, homo)

    def max_rate(self) -> float:
        return max([*self.het.values(), *self.homo.values(), 0.0])


@dataclass(frozen=True)
class LindbladTerm:
    rate: float
    op: ComplexMatrix = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if not np.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"Lindblad rate must be >= 0, got {self.rate}")


def dissipator(term: LindbladTerm, rho) -> ComplexMatrix:
    """rate * (L rho L^dag - {L^dag L, rho} / 2)."""
    rho = np.asarray(rho, dtype=complex)
    L = term.op
    if L.shape != rho.shape:
        raise ValueError(f"dimension mismatch: {L.shape} vs {rho.shape}")
    Ld = L.conj().T
    LdL = Ld @ L
    return term.rate * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))


def _labels(include_symmetric: bool):
    return ALL_LABELS if include_symmetric else E_LABELS


def het_generator(
    J: SpectralDensitySet, include_sq: bool = False, include_symmetric: bool = False
) -> list[LindbladTerm]:
    """ZQ and DQ (optionally SQ) dissipators of the proton / test-spin coupling."""
    terms = []

    def add(rate, lam, p, tp, name):
        if rate > 0:
            terms.append(LindbladTerm(rate, het_lindblad_op(lam, p, tp), name))

    for lam in _labels(include_symmetric):
        tag = lam.short
        zq = J.J(lam, 0) / 6  # |-1/sqrt(6)|^2
        add(zq, lam, 1, -1, f"ZQ^{tag}:S+I-")
        add(zq, -lam, -1, 1, f"ZQ^{tag}:S-I+")
        dq = J.J(lam, 2)
        add(dq, lam, 1, 1, f"DQ^{tag}:S+I+")
        add(dq, -lam, -1, -1, f"DQ^{tag}:S-I-")
        if include_sq:
            sq = J.J(lam, 1)
            add(sq, lam, 1, 0, f"SQ^{tag}:S+Iz")
            add(sq, -lam, -1, 0, f"SQ^{tag}:S-Iz")
            add(sq, lam, 0, 1, f"SQ^{tag}:SzI+")
            add(sq, -lam, 0, -1, f"SQ^{tag}:SzI-")
    return terms


def homo_generator(g: SpectralDensitySet, include_symmetric: bool = False) -> list[LindbladTerm]:
    """Proton-proton dissipators; the zz part of q = 0 only shifts levels and is left out."""
    terms = []
    for lam in _labels(include_symmetric):
        tag = lam.short
        pairs = [
            (g.g(lam, 0) / 6, homo_flipflop(lam), homo_flipflop(-lam), "ZQ"),
            (g.g(lam, 1), homo_symmetrized(lam, 1), homo_symmetrized(-lam, -1), "SQ"),
            (g.g(lam, 2), homo_symmetrized(lam, 2), homo_symmetrized(-lam, -2), "DQ"),
        ]
        for rate, up, down, name in pairs:
            if rate > 0:
                terms.append(LindbladTerm(rate, up, f"{name}^{tag}:+"))
                terms.append(LindbladTerm(rate, down, f"{name}^{tag}:-"))
    return terms


def lindblad_rhs(terms, rho) -> ComplexMatrix:
    out = np.zeros_like(rho, dtype=complex)
    for t in terms:
        out += dissipator(t, rho)
    return out


class _Liouvillian:
    """Pre-factored generator so the RK4 loop avoids recomputing L^dag L."""

    def __init__(self, terms, dim):
        self.parts = []
        for t in terms:
            if t.op.shape != (dim, dim):
                raise ValueError(f"term {t.label!r} has shape {t.op.shape}, expected {dim}")
            L = np.sqrt(t.rate) * t.op
            Ld = L.conj().T
            self.parts.append((L, Ld, Ld @ L))

    def __call__(self, rho):
        out = np.zeros_like(rho)
        for L, Ld, LdL in self.parts:
            out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
        return out


def lindblad_propagate(rho0, terms, t: float, dt: float) -> ComplexMatrix:
    """Fixed-step RK4 integration of d rho/dt = sum_k D[L_k] rho up to time t."""
    rho = np.array(rho0, dtype=complex)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if not is_hermitian(rho, atol=1e-10):
        raise ValueError("initial density matrix is not Hermitian")
    f = _Liouvillian(terms, rho.shape[0])
    n_full, rem = divmod(t, dt)
    steps = [dt] * int(n_full)
    if rem > 1e-12 * dt:
        steps.append(rem)
    for h in steps:
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return 0.5 * (rho + rho.conj().T)


def rate_matrix(terms) -> NDArray[np.float64]:
    """W[x, y] = sum_k rate_k |<x|L_k|y>|^2 in the symmetry level basis, zero diagonal."""
    if not terms:
        raise ValueError("need at least one term to infer the dimension; use zero_rates(dim)")
    dim = terms[0].op.shape[0]
    w = np.zeros((dim, dim))
    for t in terms:
        m = to_symmetry_basis(t.op)
        w += t.rate * np.abs(m) ** 2
    np.fill_diagonal(w, 0.0)
    return w


def zero_rates(dim: int) -> NDArray[np.float64]:
    return np.zeros((dim, dim))


def rate_step(p, w, dt: float) -> Vector:
    """One explicit Euler step dp_x = dt sum_y W_xy (p_y - p_x)."""
    return dt * (w @ p - w.sum(axis=1) * p)


def check_euler_stability(w, dt: float) -> None:
    worst = dt * float(np.max(w.sum(axis=1), initial=0.0))
    if worst >= 1:
        raise ValueError(f"explicit Euler unstable: dt * max_row_sum(W) = {worst:.6g} >= 1")


def rate_propagate(p0, w, dt: float, steps: int) -> NDArray[np.float64]:
    """Explicit Euler trajectory; row n is the population after n steps."""
    p = np.asarray(p0, dtype=float)
    w = np.asarray(w, dtype=float)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    check_euler_stability(w, dt)
    if abs(p.sum() - 1) > 1e-9 or p.min() < -1e-12:
        raise ValueError("initial populations must lie on the probability simplex")
    out = np.empty((steps + 1, p.size))
    out[0] = p
    for n in range(steps):
        p = p + rate_step(p, w, dt)
        out[n + 1] = p
    return out


def populations(rho) -> Vector:
    """Diagonal of a product-basis density matrix in the symmetry level order."""
    return np.real(np.diag(to_symmetry_basis(rho))).copy()


def seed_populations(params: PolarizationParams, test_spin: bool = True) -> Vector:
    if test_spin:
        return populations(seed_state(params))
    return populations(q_protected(params.gamma, params.beta))


# ---------------------------------------------------------------- closed forms


@dataclass(frozen=True)
class ImbalanceSeeds:
    """Initial population imbalances of the protected seed.

    ``c_plus``/``c_minus`` are [A, m] - [E+/-, m'] and ``c_2`` is
    [E+, m'] - [E-, m'] on the proton vector q0 (unit trace).  The pairwise
    test-spin differences are differences of 2 p(0), i.e. of the 16-level
    population vector rescaled so each test-spin block carries weight 1 +/- alpha.
    """

    c_plus: float
    c_minus: float
    c_2: float
    # ([A,m,up]-[E+,m',down], [A,m,up]-[E-,m',down]), likewise with up/down swapped
    a_up_e_down: tuple[float, float] = (0.0, 0.0)
    a_down_e_up: tuple[float, float] = (0.0, 0.0)
    ep_up_em_down: float = 0.0
    ep_down_em_up: float = 0.0


def seeds(params: PolarizationParams) -> ImbalanceSeeds:
    g, b, a = params.gamma, params.beta, params.alpha
    cp = g / 4 - b * (1 - g) / 8
    cm = g / 4 + b * (1 - g) / 8
    shift = (a / 4 + a * b * (1 - g) / 8, a / 4 - a * b * (1 - g) / 8)
    return ImbalanceSeeds(
        c_plus=cp,
        c_minus=cm,
        c_2=b * (1 - g) / 4,
        a_up_e_down=(cp + shift[0], cm + shift[1]),
        a_down_e_up=(cp - shift[0], cm - shift[1]),
        ep_up_em_down=b * (1 - g) / 4 + a * (1 - g) / 4,
        ep_down_em_up=b * (1 - g) / 4 - a * (1 - g) / 4,
    )


def _pos(s, m, spin=None):
    return level_position(s, m, spin)


def _het_rates(J: SpectralDensitySet):
    return (
        {E_PLUS: J.J(E_PLUS, 2), E_MINUS: J.J(E_MINUS, 2)},
        {E_PLUS: J.J(E_PLUS, 0), E_MINUS: J.J(E_MINUS, 0)},
    )


# |<E-+, m+p| S^lam_p |E+-, m>|^2; every other cross-symmetry transition
# away from m = +/-3/2 carries 1/3
E_EXCHANGE_WEIGHT = 4 / 3


def analytic_first_step_het(params: PolarizationParams, J: SpectralDensitySet, dt: float) -> Vector:
    """Population change over the first dt under the default ZQ/DQ generator.

    Closed form for an unpolarized test spin.  The bracketed expressions are
    written on 2 p (imbalances ``seeds``), hence the overall factor 1/2.  For
    alpha != 0 the change is assembled from the seed populations and the rate
    matrix instead.
    """
    if params.alpha != 0:
        return _first_step_from_seeds(params, J, dt)
    s = seeds(params)
    C = {E_PLUS: s.c_plus, E_MINUS: s.c_minus}
    sgn = {E_PLUS: 1, E_MINUS: -1}
    J2, J0 = _het_rates(J)
    x = E_EXCHANGE_WEIGHT
    d = np.zeros(16)
    up, dn = "up", "down"
    P, M = E_PLUS, E_MINUS

    d[_pos(A, 1.5, up)] = -dt * (C[P] * J2[M] + C[M] * J2[P])
    d[_pos(A, 1.5, dn)] = -dt / 6 * (C[P] * J0[M] + C[M] * J0[P])
    d[_pos(A, -1.5, up)] = -dt / 6 * (C[P] * J0[P] + C[M] * J0[M])
    d[_pos(A, -1.5, dn)] = -dt * (C[P] * J2[P] + C[M] * J2[M])
    for spin in (up, dn):
        d[_pos(A, 0.5, spin)] = d[_pos(A, 1.5, spin)] / 3
        d[_pos(A, -0.5, spin)] = d[_pos(A, -1.5, spin)] / 3

    c2 = s.c_2
    for e in E_LABELS:
        o = -e
        pm = sgn[e]
        d[_pos(e, 0.5, up)] = dt * (C[e] * J2[e] / 3 - x * pm * c2 * J2[o] + C[e] * J0[o] / 6)
        d[_pos(e, 0.5, dn)] = dt * ((C[e] * J0[e] / 3 - x * pm * c2 * J0[o]) / 6 + C[e] * J2[o])
        d[_pos(e, -0.5, up)] = dt * ((C[e] * J0[o] / 3 - x * pm * c2 * J0[e]) / 6 + C[e] * J2[e])
        d[_pos(e, -0.5, dn)] = dt * (C[e] * J2[o] / 3 - x * pm * c2 * J2[e] + C[e] * J0[e] / 6)
    return d / 2


def _first_step_from_seeds(params, J, dt):
    w = rate_matrix(het_generator(J)) if J.max_rate() > 0 else zero_rates(16)
    return rate_step(seed_populations(params), w, dt)


def second_step_constants(params: PolarizationParams, J: SpectralDensitySet, corrected: bool = True):
    """(a0, b0, {E+: a+, E-: a-}, {E+: b+, E-: b-}) feeding the second-step change.

    ``corrected=False`` gives the constants built on a uniform 1/3 weight for
    every non-3/2 transition; they agree with the rate model only at beta = 0.
    """
    g, b = params.gamma, params.beta
    J2, J0 = _het_rates(J)
    P, M = E_PLUS, E_MINUS
    bb = b * (1 - g) / 8
    a0 = g / 4 * (J2[P] + J2[M] + (J0[P] + J0[M]) / 18) + bb * (J2[P] - J2[M])
    b0 = g / 4 * ((J0[P] + J0[M]) / 6 + (J2[P] + J2[M]) / 3) + bb * (J2[P] - J2[M])
    total = J0[P] + J0[M] + 3 * (J2[P] + J2[M])
    a, bc = {}, {}
    for e, sign in ((P, 1), (M, -1)):
        o = -e
        a[e] = g / 4 * (J2[e] - J0[e] / 18) + sign * bb * (J0[e] / 9 + J0[o] / 18)
        bc[e] = g / 4 * (J0[e] / 6 - J2[e] / 3) + sign * bb * (2 * J2[e] / 3 + J2[o] / 3)
        if corrected:
            # E+ <-> E- exchange at 4/3 instead of 1/3
            a[e] += sign * bb * (J0[e] / 3 + J2[e])
            bc[e] += sign * bb * total / 3
    return a0, b0, a, bc


def analytic_second_step_het(
    params: PolarizationParams, J: SpectralDensitySet, dt: float, corrected: bool = True
) -> dict:
    """Increment p(2 dt) - p(dt) of the four m = +/-3/2 levels.

    Returns ``{level position: change}``; requires alpha = 0.  The m = -3/2
    rows reuse the constants with beta -> -beta.
    """
    if params.alpha != 0:
        raise ValueError("the second-step closed form assumes an unpolarized test spin")
    first = analytic_first_step_het(params, J, dt)
    J2, J0 = _het_rates(J)
    P, M = E_PLUS, E_MINUS
    a0, b0, a, b = second_step_constants(params, J, corrected)
    flipped = PolarizationParams(params.gamma, -params.beta, 0.0)
    fa0, fb0, fa, fb = second_step_constants(flipped, J, corrected)
    h = dt**2 / 2  # 2 p -> p
    out = {}
    k = _pos(A, 1.5, "up")
    out[k] = first[k] + h * ((a0 + a[P]) * J2[P] + (a0 + a[M]) * J2[M])
    k = _pos(A, 1.5, "down")
    out[k] = first[k] + h / 6 * ((b0 + b[P]) * J0[P] + (b0 + b[M]) * J0[M])
    k = _pos(A, -1.5, "up")
    out[k] = first[k] + h / 6 * ((fb0 + fb[M]) * J0[M] + (fb0 + fb[P]) * J0[P])
    k = _pos(A, -1.5, "down")
    out[k] = first[k] + h * ((fa0 + fa[M]) * J2[M] + (fa0 + fa[P]) * J2[P])
    return out


def analytic_first_step_homo(params: PolarizationParams, g: SpectralDensitySet, dt: float) -> Vector:
    """Population change of the eight proton levels over dt from the SQ and DQ
    channels.  The proton flip-flop (ZQ) exchange is not part of this closed form."""
    s = seeds(params)
    cp, cm = s.c_plus, s.c_minus
    g1 = {E_PLUS: g.g(E_PLUS, 1), E_MINUS: g.g(E_MINUS, 1)}
    g2 = {E_PLUS: g.g(E_PLUS, 2), E_MINUS: g.g(E_MINUS, 2)}
    P, M = E_PLUS, E_MINUS
    d = np.zeros(8)
    for sign, same, other in ((1, P, M), (-1, M, P)):
        # "same" is E+ on the m > 0 rows and E- on the m < 0 rows
        d[_pos(A, 1.5 * sign)] = -dt / 4 * (cp * g1[other] + cm * g1[same]) - dt * (
            cp * g2[other] + cm * g2[same]
        )
        d[_pos(A, 0.5 * sign)] = -3 * dt / 4 * (cp * g1[other] + cm * g1[same])
        d[_pos(P, 0.5 * sign)] = dt / 4 * cp * (g1[other] + 3 * g1[same]) + dt * cp * g2[same]
        d[_pos(M, 0.5 * sign)] = dt / 4 * cm * (g1[same] + 3 * g1[other]) + dt * cm * g2[other]
    return d
