"""Floquet operator assembly, unitary diagonalization, and branch tracking."""

import numpy as np
import pytest
import scipy.linalg as sla

from kickedspin.floquet import (
    FloquetBuilder,
    FloquetEigensystem,
    _cluster_circular,
    associate_states,
    build_floquet,
    diagonalize_unitary,
    follow_single_branch,
    solve_count,
    track_branch,
    unitarity_residual,
)
from kickedspin.lmg import ModelParams, build_h0, build_kick, diagonalize

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="module")
def small_spectra():
    params = ModelParams(j=6.0, gamma_x=-0.95, tau=8.0)
    return diagonalize(build_h0(params)), diagonalize(build_kick(params))


def test_floquet_matches_expm_route(small_spectra):
    # independent assembly through scipy's generic matrix exponential
    h0_spec, kick_spec = small_spectra
    tau, eps = 8.0, 0.37
    params = ModelParams(j=6.0, gamma_x=-0.95)
    direct = sla.expm(-1j * tau * build_h0(params).matrix) @ sla.expm(
        -1j * eps * build_kick(params).matrix
    )
    f = build_floquet(h0_spec, kick_spec, tau, eps)
    assert np.max(np.abs(f - direct)) < 1e-12


def test_floquet_is_unitary(small_spectra):
    f = build_floquet(*small_spectra, tau=8.0, epsilon=1e-2)
    assert unitarity_residual(f) < 1e-13


def test_builder_basis_consistency(small_spectra):
    h0_spec, kick_spec = small_spectra
    b = FloquetBuilder(h0_spec, kick_spec)
    v0 = h0_spec.eigenvectors
    tilde = b.in_h0_basis(8.0, 0.05)
    assert np.allclose(v0 @ tilde @ v0.conj().T, b.in_dicke_basis(8.0, 0.05))


def test_builder_rejects_mismatched_reps(small_spectra):
    other = diagonalize(build_h0(ModelParams(j=5.0, gamma_x=-0.95)))
    with pytest.raises(ValueError, match="representations"):
        FloquetBuilder(small_spectra[0], other)


def test_eps_zero_phases_are_h0_phases(small_spectra):
    h0_spec, kick_spec = small_spectra
    fe = diagonalize_unitary(FloquetBuilder(h0_spec, kick_spec).in_h0_basis(8.0, 0.0))
    expected = np.sort(np.mod(8.0 * h0_spec.energies, TWO_PI))
    assert np.allclose(np.sort(fe.phases), expected, atol=1e-10)


def test_diagonalize_unitary_eigenrelation(small_spectra):
    f = build_floquet(*small_spectra, tau=8.0, epsilon=0.2)
    fe = diagonalize_unitary(f)
    assert np.all(fe.phases >= 0) and np.all(fe.phases < TWO_PI)
    assert np.all(np.diff(fe.phases) >= 0)
    recon = f @ fe.states - fe.states * np.exp(-1j * fe.phases)[np.newaxis, :]
    assert np.max(np.abs(recon)) < 1e-10
    gram = fe.states.conj().T @ fe.states
    assert np.max(np.abs(gram - np.eye(fe.dim))) < 1e-8


def test_diagonalize_unitary_rejects_non_unitary():
    with pytest.raises(RuntimeError, match="not unitary"):
        diagonalize_unitary(np.diag([1.0, 2.0]))


def test_solve_count_increments(small_spectra):
    f = build_floquet(*small_spectra, tau=8.0, epsilon=0.1)
    before = solve_count()
    diagonalize_unitary(f)
    assert solve_count() == before + 1


def test_association_at_eps_zero(small_spectra):
    h0_spec, kick_spec = small_spectra
    fe = diagonalize_unitary(FloquetBuilder(h0_spec, kick_spec).in_h0_basis(8.0, 0.0))
    fe = associate_states(fe, h0_spec, in_h0_basis=True)
    assert fe.injective
    assert np.allclose(fe.f_max, 1.0, atol=1e-10)
    # each Floquet phase must equal its associated level's phase
    assert np.allclose(
        fe.phases, np.mod(8.0 * h0_spec.energies[fe.assoc_n], TWO_PI), atol=1e-10
    )


def test_association_transform_matches_dicke_route(small_spectra):
    h0_spec, kick_spec = small_spectra
    b = FloquetBuilder(h0_spec, kick_spec)
    fe_tilde = associate_states(
        diagonalize_unitary(b.in_h0_basis(8.0, 0.01)), h0_spec, in_h0_basis=True
    )
    fe_dicke = associate_states(
        diagonalize_unitary(b.in_dicke_basis(8.0, 0.01)), h0_spec
    )
    assert np.array_equal(fe_tilde.assoc_n, fe_dicke.assoc_n)
    assert np.allclose(np.sort(fe_tilde.f_max), np.sort(fe_dicke.f_max), atol=1e-9)


def test_association_dimension_guard(small_spectra):
    h0_spec, _ = small_spectra
    fe = FloquetEigensystem(phases=np.zeros(3), states=np.eye(3))
    with pytest.raises(ValueError, match="dimension"):
        associate_states(fe, h0_spec)


def _toy_eigensystem(states):
    states = np.asarray(states, dtype=complex)
    return FloquetEigensystem(phases=np.zeros(states.shape[1]), states=states)


def test_track_branch_identifies_permutation():
    prev = _toy_eigensystem(np.eye(3))
    swapped = np.eye(3)[:, [1, 0, 2]]
    perm, min_overlap = track_branch(prev, _toy_eigensystem(swapped))
    assert perm.tolist() == [1, 0, 2]
    assert min_overlap == pytest.approx(1.0)


def test_track_branch_warns_on_weak_overlap():
    # the 3x3 DFT spreads every overlap to 1/3, so no matching is strong
    prev = _toy_eigensystem(np.eye(3))
    omega = np.exp(2j * np.pi / 3)
    dft = np.array([[1, 1, 1], [1, omega, omega**2], [1, omega**2, omega**4]])
    dft /= np.sqrt(3.0)
    with pytest.warns(UserWarning, match="weak"):
        _, min_overlap = track_branch(prev, _toy_eigensystem(dft))
    assert min_overlap == pytest.approx(1.0 / 3.0)


def test_follow_single_branch():
    fe = _toy_eigensystem(np.eye(3))
    idx, overlap = follow_single_branch(np.array([0.0, 0.0, 1.0 + 0j]), fe)
    assert idx == 2
    assert overlap == pytest.approx(1.0)


def test_cluster_circular_wraparound():
    phases = np.array([1e-12, 1.0, 2.0, TWO_PI - 1e-12])
    eigenvalues = np.exp(-1j * phases)
    clusters = _cluster_circular(eigenvalues[np.argsort(phases)], tol=1e-9)
    assert len(clusters) == 1
    assert sorted(clusters[0].tolist()) == [0, 3]


def test_cluster_circular_no_false_positives():
    eigenvalues = np.exp(-1j * np.array([0.1, 1.0, 2.0]))
    assert _cluster_circular(eigenvalues, tol=1e-9) == []


def test_degenerate_cluster_reorthogonalized():
    # a unitary with a twofold degenerate eigenvalue: any basis of the plane
    # is valid, but the returned one must be orthonormal
    f = np.diag(np.exp(-1j * np.array([0.5, 0.5, 1.5])))
    fe = diagonalize_unitary(f)
    gram = fe.states.conj().T @ fe.states
    assert np.max(np.abs(gram - np.eye(3))) < 1e-12
    assert np.max(np.abs(f @ fe.states - fe.states * np.exp(-1j * fe.phases))) < 1e-12
