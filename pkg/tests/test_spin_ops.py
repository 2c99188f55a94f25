"""Angular-momentum matrices: algebra, conventions, and guards."""

import numpy as np
import pytest

from kickedspin.spin_ops import (
    AngularMomentumRep,
    HermitianOperator,
    angular_momentum_matrices,
    hermitian_product,
)


def commutator(a, b):
    return a @ b - b @ a


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5, 2.0, 7.5, 20.0])
def test_su2_algebra(j):
    jx, jy, jz = (op.matrix for op in angular_momentum_matrices(j))
    assert np.allclose(commutator(jx, jy), 1j * jz, atol=1e-12)
    assert np.allclose(commutator(jy, jz), 1j * jx, atol=1e-12)
    assert np.allclose(commutator(jz, jx), 1j * jy, atol=1e-12)


@pytest.mark.parametrize("j", [0.5, 1.0, 4.5, 12.0])
def test_casimir(j):
    jx, jy, jz = (op.matrix for op in angular_momentum_matrices(j))
    j2 = jx @ jx + jy @ jy + jz @ jz
    expected = j * (j + 1) * np.eye(round(2 * j) + 1)
    assert np.allclose(j2, expected, atol=1e-12)


def test_jz_diagonal_ascending_m():
    _, _, jz = angular_momentum_matrices(2.0)
    assert np.allclose(np.diag(jz.matrix), [-2, -1, 0, 1, 2])
    assert np.allclose(jz.matrix, np.diag(np.diag(jz.matrix)))


def test_jx_spectrum_matches_m_values():
    # Jx is Jz rotated; its spectrum is the same ladder of m values
    jx, _, _ = angular_momentum_matrices(7.0)
    eigs = np.linalg.eigvalsh(jx.matrix)
    assert np.allclose(eigs, np.arange(-7, 8), atol=1e-12)


def test_spin_one_explicit_matrices():
    jx, jy, jz = angular_momentum_matrices(1.0)
    s = 1.0 / np.sqrt(2.0)
    assert np.allclose(jx.matrix, [[0, s, 0], [s, 0, s], [0, s, 0]])
    assert np.allclose(jy.matrix, [[0, 1j * s, 0], [-1j * s, 0, 1j * s], [0, -1j * s, 0]])
    assert np.allclose(jz.matrix, np.diag([-1.0, 0.0, 1.0]))


def test_spin_half_is_half_pauli():
    jx, jy, jz = angular_momentum_matrices(0.5)
    # basis order (m=-1/2, m=+1/2)
    assert np.allclose(jx.matrix, [[0, 0.5], [0.5, 0]])
    assert np.allclose(jz.matrix, np.diag([-0.5, 0.5]))
    assert np.allclose(jy.matrix @ jy.matrix, 0.25 * np.eye(2))


def test_raising_convention_positive_subdiagonal():
    # J+ = Jx + iJy must have non-negative entries one below the diagonal
    jx, jy, _ = angular_momentum_matrices(3.0)
    jplus = jx.matrix + 1j * jy.matrix
    sub = np.diag(jplus, k=-1)
    assert np.all(sub.real > 0)
    assert np.allclose(sub.imag, 0)
    assert np.allclose(jplus - np.diag(sub, k=-1), 0)


def test_m_values_property():
    rep = AngularMomentumRep(j=1.5, dim=4)
    assert np.allclose(rep.m_values, [-1.5, -0.5, 0.5, 1.5])


@pytest.mark.parametrize("bad_j", [-1.0, 0.3, 0.0])
def test_rejects_bad_spin(bad_j):
    with pytest.raises(ValueError):
        angular_momentum_matrices(bad_j)


def test_rejects_dim_over_cap():
    with pytest.raises(ValueError, match="cap"):
        angular_momentum_matrices(100.0, dim_cap=50)


def test_rep_validation():
    with pytest.raises(ValueError):
        AngularMomentumRep(j=1.0, dim=4)
    with pytest.raises(ValueError):
        AngularMomentumRep(j=0.3, dim=2)


def test_hermitian_operator_rejects_non_hermitian():
    rep = AngularMomentumRep(j=0.5, dim=2)
    with pytest.raises(ValueError, match="Hermitian"):
        HermitianOperator(rep, np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_operator_rejects_shape_mismatch():
    rep = AngularMomentumRep(j=0.5, dim=2)
    with pytest.raises(ValueError, match="shape"):
        HermitianOperator(rep, np.zeros((3, 3)))


def test_operator_arithmetic():
    jx, jy, jz = angular_momentum_matrices(1.0)
    combo = jz + 2.0 * jx
    assert np.allclose(combo.matrix, jz.matrix + 2 * jx.matrix)
    with pytest.raises(ValueError, match="real"):
        1j * jz
    other_rep = angular_momentum_matrices(1.5)[0]
    with pytest.raises(ValueError, match="representations"):
        jz + other_rep


def test_hermitian_product_squares():
    jx, _, _ = angular_momentum_matrices(2.5)
    sq = hermitian_product(jx, jx)
    assert np.allclose(sq.matrix, jx.matrix @ jx.matrix, atol=1e-13)
