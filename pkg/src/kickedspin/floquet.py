"""Floquet operator assembly, diagonalization, and state association.

The one-period propagator is F = exp(-i tau H0) exp(-i eps K), assembled
from the two eigendecompositions (never via a generic matrix exponential) so
the eps = 0 and tau = 0 limits are exact by construction.  F is normal; it
is still diagonalized with the general complex eigensolver, and normality is
used afterwards as a validation plus a re-orthogonalization pass inside
near-degenerate eigenvalue clusters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .lmg import ModelParams, Spectrum

TWO_PI = 2.0 * np.pi

UNITARITY_TOL = 1e-8
CLUSTER_TOL = 1e-9
RESIDUAL_TOL = 1e-8

# Cumulative count of unitary diagonalizations in this process.  The scan
# budget accounting and the cache's "zero solves on a warm re-run" contract
# both read it.
_N_SOLVES = 0


def solve_count() -> int:
    return _N_SOLVES


@dataclass
class FloquetEigensystem:
    """Eigenphases in [0, 2pi), eigenstates, and the unperturbed association.

    `states` columns live in whatever basis the diagonalized matrix was
    expressed in.  `assoc_n` / `f_max` are filled by associate_states.
    """

    phases: np.ndarray
    states: np.ndarray
    params: ModelParams | None = None
    assoc_n: np.ndarray | None = None
    f_max: np.ndarray | None = None
    injective: bool | None = None
    max_residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.phases.size


class FloquetBuilder:
    """Caches both eigenbases so an epsilon sweep costs one matmul per point.

    With W = V0^dag VK precomputed, the Floquet matrix in the H0 eigenbasis is

        F~ = diag(e^{-i tau E}) . W diag(e^{-i eps kappa}) W^dag

    and its eigenvector columns are directly the coefficients <E_n|f_k>.
    """

    def __init__(self, h0_spec: Spectrum, kick_spec: Spectrum):
        if h0_spec.rep != kick_spec.rep:
            raise ValueError("spectra live on different representations")
        self.h0_spec = h0_spec
        self.kick_spec = kick_spec
        self._w = h0_spec.eigenvectors.conj().T @ kick_spec.eigenvectors

    def in_h0_basis(self, tau: float, epsilon: float) -> np.ndarray:
        kick_phases = np.exp(-1j * epsilon * self.kick_spec.energies)
        m = (self._w * kick_phases[np.newaxis, :]) @ self._w.conj().T
        return np.exp(-1j * tau * self.h0_spec.energies)[:, np.newaxis] * m

    def in_dicke_basis(self, tau: float, epsilon: float) -> np.ndarray:
        v0 = self.h0_spec.eigenvectors
        return v0 @ self.in_h0_basis(tau, epsilon) @ v0.conj().T


def build_floquet(
    h0_spec: Spectrum, kick_spec: Spectrum, tau: float, epsilon: float
) -> np.ndarray:
    """Assemble F = exp(-i tau H0) exp(-i eps K) in the Dicke basis."""
    return FloquetBuilder(h0_spec, kick_spec).in_dicke_basis(tau, epsilon)


def unitarity_residual(f: np.ndarray) -> float:
    """Max-norm of F^dag F - I."""
    return float(np.max(np.abs(f.conj().T @ f - np.eye(f.shape[0]))))


def _cluster_circular(eigenvalues: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group phase-sorted eigenvalues into chains of near-equal neighbors.

    The chain is circular: phases just below 2pi neighbor phases just above 0.
    """
    n = eigenvalues.size
    if n == 1:
        return []
    linked = np.abs(np.diff(eigenvalues)) < tol
    wrap = abs(eigenvalues[0] - eigenvalues[-1]) < tol
    if linked.all() and wrap:
        return [np.arange(n)]
    # rotate so a break sits at the boundary, then split on unlinked gaps
    if wrap:
        start = int(np.argmin(linked)) + 1
    else:
        start = 0
    order = np.roll(np.arange(n), -start)
    rolled_linked = np.abs(np.diff(eigenvalues[order])) < tol
    clusters = []
    block = [order[0]]
    for i, is_linked in enumerate(rolled_linked):
        if is_linked:
            block.append(order[i + 1])
        else:
            if len(block) > 1:
                clusters.append(np.array(block))
            block = [order[i + 1]]
    if len(block) > 1:
        clusters.append(np.array(block))
    return clusters


def _loewdin(columns: np.ndarray) -> np.ndarray:
    """Closest orthonormal set to the given columns (symmetric orthogonalization).

    Chosen over QR because it has no column-order dependence: inside a
    cluster that is split only at the 1e-10 level (the exact-resonance pair
    near eps = 0) it cleans up orthogonality without re-mixing the physically
    resolved directions.
    """
    u, _, vh = np.linalg.svd(columns, full_matrices=False)
    return u @ vh


def diagonalize_unitary(
    f: np.ndarray, params: ModelParams | None = None
) -> FloquetEigensystem:
    """Diagonalize a unitary matrix into phase-sorted eigenpairs.

    Phases follow F|f_k> = e^{-i phi_k}|f_k>, mapped to [0, 2pi).  Any
    eigenvalue cluster tighter than 1e-9 gets a symmetric re-orthogonalization
    pass; the eigenrelation residual is checked for every state.
    """
    global _N_SOLVES
    eigenvalues, states = sla.eig(f)
    radius_dev = float(np.max(np.abs(np.abs(eigenvalues) - 1.0)))
    if radius_dev > UNITARITY_TOL:
        raise RuntimeError(
            f"input is not unitary to working precision: max ||lambda|-1| = "
            f"{radius_dev:.3e}"
        )

    phases = np.mod(-np.angle(eigenvalues), TWO_PI)
    order = np.argsort(phases, kind="stable")
    eigenvalues = eigenvalues[order]
    states = states[:, order]

    for cluster in _cluster_circular(eigenvalues, CLUSTER_TOL):
        states[:, cluster] = _loewdin(states[:, cluster])

    # Rayleigh-quotient eigenvalues: exact for untouched columns, and the
    # right per-column value after a cluster pass.
    fv = f @ states
    eigenvalues = np.sum(states.conj() * fv, axis=0)
    residuals = np.linalg.norm(fv - states * eigenvalues[np.newaxis, :], axis=0)
    max_residual = float(np.max(residuals))
    if max_residual > RESIDUAL_TOL:
        raise RuntimeError(f"eigenrelation residual {max_residual:.3e}")

    phases = np.mod(-np.angle(eigenvalues), TWO_PI)
    reorder = np.argsort(phases, kind="stable")
    phases = phases[reorder]
    states = states[:, reorder]

    # deterministic column phases: largest-magnitude component positive real
    lead = np.argmax(np.abs(states), axis=0)
    pivots = states[lead, np.arange(states.shape[1])]
    states = states * (pivots.conj() / np.abs(pivots))[np.newaxis, :]

    _N_SOLVES += 1
    return FloquetEigensystem(
        phases=phases, states=states, params=params, max_residual=max_residual
    )


def associate_states(
    fe: FloquetEigensystem, h0_spec: Spectrum, in_h0_basis: bool = False
) -> FloquetEigensystem:
    """Fill the argmax association n*(k) and overlap maxima F_max(k).

    Ties break toward smaller n (argmax convention).  Non-injectivity is
    reported via the `injective` flag, never raised: losing injectivity at
    moderate eps is the physics, not a failure.
    """
    if in_h0_basis:
        coeffs = fe.states
    else:
        if fe.dim != h0_spec.dim:
            raise ValueError("dimension mismatch between eigensystem and spectrum")
        coeffs = h0_spec.eigenvectors.conj().T @ fe.states
    weights = np.abs(coeffs) ** 2
    assoc = np.argmax(weights, axis=0)
    fe.assoc_n = assoc
    fe.f_max = weights[assoc, np.arange(fe.dim)]
    fe.injective = np.unique(assoc).size == fe.dim
    return fe


def track_branch(
    prev: FloquetEigensystem, next_: FloquetEigensystem
) -> tuple[np.ndarray, float]:
    """Permutation pi with pi[i] = index in `next_` continuing branch i of `prev`.

    Greedy assignment in descending overlap order; returns the minimum
    matched overlap so callers can detect too-coarse epsilon steps.
    """
    if prev.dim != next_.dim:
        raise ValueError("eigensystem dimensions differ")
    overlaps = np.abs(prev.states.conj().T @ next_.states) ** 2
    n = prev.dim
    perm = np.full(n, -1)
    taken = np.zeros(n, dtype=bool)
    flat_order = np.argsort(overlaps, axis=None, kind="stable")[::-1]
    assigned = 0
    for flat in flat_order:
        i, j = divmod(int(flat), n)
        if perm[i] >= 0 or taken[j]:
            continue
        perm[i] = j
        taken[j] = True
        assigned += 1
        if assigned == n:
            break
    min_overlap = float(np.min(overlaps[np.arange(n), perm]))
    if min_overlap < 0.5:
        warnings.warn(
            f"branch tracking weak: minimum matched overlap {min_overlap:.3f} "
            "(epsilon step too large?)",
            stacklevel=2,
        )
    return perm, min_overlap


def follow_single_branch(
    branch_state: np.ndarray, fe: FloquetEigensystem
) -> tuple[int, float]:
    """Index and squared overlap of the eigensystem state continuing one branch."""
    overlaps = np.abs(fe.states.conj().T @ branch_state) ** 2
    idx = int(np.argmax(overlaps))
    return idx, float(overlaps[idx])
