from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from methyl_lls.spinalg import DOWN, UP, commutator, product_state
from methyl_lls.symmetry_basis import (
    ALL_LABELS,
    E_MINUS,
    E_PLUS,
    EPSILON,
    FULL_LEVELS,
    PROTON_LEVELS,
    A,
    LevelIndex,
    PolarizationParams,
    base_projectors,
    basis_change,
    basis_change_full,
    build_symmetry_states,
    collective_spin,
    cyclic_permutation,
    from_symmetry_basis,
    level_position,
    magnetization_projector,
    q_lls,
    q_lls_pauli,
    q_protected,
    seed_state,
    spin_flip,
    thermal_state,
    to_symmetry_basis,
)

unit = st.floats(-1, 1, allow_nan=False)


def test_epsilon():
    assert abs(EPSILON**3 - 1) < 1e-15
    assert abs(1 + EPSILON + np.conj(EPSILON)) < 1e-15


def test_label_arithmetic():
    assert A + E_PLUS == E_PLUS
    assert E_PLUS + E_PLUS == E_MINUS
    assert E_PLUS + E_MINUS == A
    assert E_MINUS + E_MINUS == E_PLUS
    assert -E_PLUS == E_MINUS and -A == A
    assert abs(E_PLUS.phase - EPSILON) < 1e-15


def test_level_index_validation():
    with pytest.raises(ValueError):
        LevelIndex(E_PLUS, Fraction(3, 2))
    with pytest.raises(ValueError):
        LevelIndex(A, Fraction(5, 2))
    with pytest.raises(ValueError):
        LevelIndex(A, Fraction(1, 2), "sideways")
    assert LevelIndex(A, Fraction(3, 2), "up").label == "A,+3/2,u"


def test_level_order():
    labels = [lv.label for lv in PROTON_LEVELS]
    assert labels == ["A,+3/2", "A,+1/2", "A,-1/2", "A,-3/2", "Ep,+1/2", "Ep,-1/2", "Em,+1/2", "Em,-1/2"]
    assert [lv.test_spin for lv in FULL_LEVELS] == ["up"] * 8 + ["down"] * 8
    assert level_position(E_MINUS, -0.5, "down") == 15
    assert level_position(A, 1.5) == 0


def test_named_states():
    states = build_symmetry_states()
    assert np.allclose(states[0], np.eye(8)[0])
    uud = product_state(UP, UP, DOWN)
    duu = product_state(DOWN, UP, UP)
    udu = product_state(UP, DOWN, UP)
    assert np.allclose(states[1], (uud + duu + udu) / np.sqrt(3))
    # m < 0 partners from the global flip
    assert np.allclose(states[3], np.eye(8)[7])
    assert np.allclose(spin_flip() @ states[4], states[5])


def test_basis_unitary():
    for u in (basis_change(), basis_change_full()):
        assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12)


def test_permutation_direction_and_phases():
    p = cyclic_permutation()
    # site 1 content moves to site 2
    assert np.allclose(p @ product_state(DOWN, UP, UP), product_state(UP, DOWN, UP))
    assert np.allclose(np.linalg.matrix_power(p, 3), np.eye(8), atol=1e-12)
    states = build_symmetry_states()
    for k, lv in enumerate(PROTON_LEVELS):
        assert np.allclose(p @ states[k], lv.s.phase * states[k], atol=1e-12)


def test_permutation_spectrum():
    ev = np.linalg.eigvals(cyclic_permutation())
    for target, mult in ((1, 4), (EPSILON, 2), (np.conj(EPSILON), 2)):
        assert np.sum(np.abs(ev - target) < 1e-10) == mult


def test_projectors():
    ra, rp, rm = base_projectors()
    for r in (ra, rp, rm):
        assert abs(np.trace(r) - 1) < 1e-12
    assert np.allclose(ra @ rp, 0, atol=1e-12)
    assert np.allclose(to_symmetry_basis(ra), np.diag([0.25] * 4 + [0] * 4), atol=1e-12)


def test_q_lls_limits():
    assert np.allclose(q_lls(0), np.eye(8) / 8, atol=1e-12)
    assert np.allclose(q_lls(1), base_projectors()[0], atol=1e-12)
    with pytest.raises(ValueError):
        q_lls(1.2)


def test_q_protected_diagonal():
    # weights (1 +/- gamma)/2 split over the A block (4 levels) and E blocks (2 levels each)
    d = np.real(np.diag(to_symmetry_basis(q_protected(0.5, 0.2))))
    expected = [0.75 / 4] * 4 + [0.25 * 0.6 / 2] * 2 + [0.25 * 0.4 / 2] * 2
    assert np.allclose(d, expected, atol=1e-12)
    assert np.allclose(d, [0.1875] * 4 + [0.075] * 2 + [0.05] * 2, atol=1e-12)


def test_q_protected_reductions():
    assert np.allclose(q_protected(0.3, 0), q_lls(0.3))
    assert np.allclose(q_protected(1, -0.7), base_projectors()[0], atol=1e-12)
    with pytest.raises(ValueError):
        q_protected(0.1, -1.5)


@given(unit)
def test_q_lls_dual_form(g):
    assert np.allclose(q_lls(g), q_lls_pauli(g), atol=1e-12)


@given(unit, unit)
def test_q_protected_is_state_without_magnetization(g, b):
    q = q_protected(g, b)
    assert abs(np.trace(q) - 1) < 1e-12
    assert np.min(np.linalg.eigvalsh(q)) > -1e-12
    for ax in "xyz":
        assert abs(np.trace(q @ collective_spin(ax))) < 1e-12


def test_collective_spin():
    sx, sy, sz = (collective_spin(a) for a in "xyz")
    assert np.allclose(commutator(sx, sy), 1j * sz, atol=1e-12)
    assert np.allclose(sz @ np.eye(8)[0], 1.5 * np.eye(8)[0])
    for op in (sx, sy, sz):
        m = to_symmetry_basis(op)
        for i, a in enumerate(PROTON_LEVELS):
            for j, b in enumerate(PROTON_LEVELS):
                if a.s != b.s:
                    assert abs(m[i, j]) < 1e-12
    with pytest.raises(ValueError):
        collective_spin("w")


def test_magnetization_projectors():
    ranks = {m: np.linalg.matrix_rank(magnetization_projector(m)) for m in (1.5, 0.5, -0.5, -1.5)}
    assert ranks == {1.5: 1, 0.5: 3, -0.5: 3, -1.5: 1}
    total = sum(magnetization_projector(m) for m in (1.5, 0.5, -0.5, -1.5))
    assert np.allclose(total, np.eye(8), atol=1e-12)
    p = magnetization_projector(0.5)
    assert np.allclose(p @ collective_spin("z") @ p, 0.5 * p, atol=1e-12)
    with pytest.raises(ValueError):
        magnetization_projector(2.5)


def test_basis_round_trip():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    assert np.allclose(from_symmetry_basis(to_symmetry_basis(x)), x)


@given(unit, unit, unit)
def test_seed_state_diagonal_in_unit_interval(g, b, a):
    rho = seed_state(PolarizationParams(g, b, a))
    d = np.real(np.diag(to_symmetry_basis(rho)))
    assert abs(d.sum() - 1) < 1e-12
    assert np.all(d > -1e-12) and np.all(d < 1 + 1e-12)
    off = to_symmetry_basis(rho) - np.diag(np.diag(to_symmetry_basis(rho)))
    assert np.max(np.abs(off)) < 1e-12


def test_params_validation():
    with pytest.raises(ValueError, match="alpha"):
        PolarizationParams(0, 0, 2)


def test_thermal_state():
    rho = thermal_state(0.5, 0.2)
    assert abs(np.trace(rho) - 1) < 1e-12
    with pytest.raises(ValueError):
        thermal_state(0.9)
