"""Collective-spin model Hamiltonian, kick operator, and spectra.

The unperturbed Hamiltonian is

    H0 = Jz + gx/(2J-1) Jx^2 + gy/(2J-1) Jy^2

and the kick operator is K = Jz + Jx.  Both are real symmetric on the Dicke
basis, so their eigenbases can be chosen real; a deterministic sign
convention (largest-magnitude component positive) makes every matrix element
of K in the H0 eigenbasis a well-defined real number.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .spin_ops import (
    AngularMomentumRep,
    HermitianOperator,
    angular_momentum_matrices,
    hermitian_product,
)

GAP_FLAG_TOL = 1e-12
IMAG_ZERO_TOL = 1e-13


@dataclass(frozen=True)
class ModelParams:
    """Model parameters: spin j, couplings, kick period and strength."""

    j: float
    gamma_x: float = 0.0
    gamma_y: float = 0.0
    tau: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        two_j = round(2 * self.j)
        if abs(2 * self.j - two_j) > 1e-12:
            raise ValueError(f"j must be a half-integer, got {self.j}")
        # 1/(2J-1) is singular at j = 1/2, so the model starts at j = 1
        if self.j < 1:
            raise ValueError(f"j must be >= 1, got {self.j}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")

    @property
    def dim(self) -> int:
        return round(2 * self.j) + 1


@dataclass
class Spectrum:
    """Ascending eigenvalues and orthonormal eigenvectors (0-based levels)."""

    energies: np.ndarray
    eigenvectors: np.ndarray
    rep: AngularMomentumRep
    index_base: int = 0

    @property
    def dim(self) -> int:
        return self.energies.size

    @property
    def j(self) -> float:
        return self.rep.j

    def energy_over_j(self, k: int | np.ndarray) -> float | np.ndarray:
        return self.energies[k] / self.rep.j

    def min_gap(self) -> float:
        return float(np.min(np.diff(self.energies)))


def build_h0(params: ModelParams) -> HermitianOperator:
    """Assemble H0 = Jz + gx/(2J-1) Jx^2 + gy/(2J-1) Jy^2."""
    jx, jy, jz = angular_momentum_matrices(params.j)
    h = jz
    scale = 1.0 / (2 * params.j - 1)
    if params.gamma_x != 0.0:
        h = h + (params.gamma_x * scale) * hermitian_product(jx, jx)
    if params.gamma_y != 0.0:
        h = h + (params.gamma_y * scale) * hermitian_product(jy, jy)
    return h


def build_kick(params: ModelParams) -> HermitianOperator:
    """Assemble the kick operator K = Jz + Jx."""
    jx, _, jz = angular_momentum_matrices(params.j)
    return jz + jx


def _fix_eigenvector_signs(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is positive real."""
    lead = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[lead, np.arange(vectors.shape[1])]
    if np.iscomplexobj(vectors):
        phases = pivots / np.abs(pivots)
        return vectors * phases.conj()[np.newaxis, :]
    return vectors * np.sign(pivots)[np.newaxis, :]


def diagonalize(op: HermitianOperator) -> Spectrum:
    """Diagonalize a Hermitian operator into a validated Spectrum.

    Real-symmetric inputs (the only kind this model produces) take the real
    eigensolver path, which keeps the eigenvectors real and makes the sign
    convention a plain sign flip.
    """
    matrix = op.matrix
    if np.max(np.abs(matrix.imag)) < IMAG_ZERO_TOL:
        work = np.ascontiguousarray(matrix.real)
    else:
        work = matrix
    try:
        energies, vectors = np.linalg.eigh(work)
    except np.linalg.LinAlgError as exc:
        norm = float(np.linalg.norm(matrix))
        raise RuntimeError(
            f"eigensolver failed on dim={op.rep.dim} matrix "
            f"(Frobenius norm {norm:.3e}): {exc}"
        ) from exc
    vectors = _fix_eigenvector_signs(vectors)

    spectrum = Spectrum(energies=energies, eigenvectors=vectors, rep=op.rep)
    _validate_spectrum(spectrum, work)
    return spectrum


def _validate_spectrum(spec: Spectrum, matrix: np.ndarray) -> None:
    v = spec.eigenvectors
    gram_dev = np.max(np.abs(v.conj().T @ v - np.eye(spec.dim)))
    if gram_dev > 1e-10:
        raise RuntimeError(f"eigenvector orthonormality residual {gram_dev:.3e}")
    # spectral norm of a Hermitian matrix = largest |eigenvalue|
    h_norm = float(np.max(np.abs(spec.energies)))
    resid = np.linalg.norm(matrix @ v - v * spec.energies[np.newaxis, :], axis=0)
    if np.max(resid) > 1e-9 * max(h_norm, 1e-300):
        raise RuntimeError(f"eigenrelation residual {np.max(resid):.3e}")
    if spec.dim > 1:
        scale = max(h_norm, 1e-300)
        if spec.min_gap() < GAP_FLAG_TOL * scale:
            warnings.warn(
                f"near-degenerate spectrum: min gap {spec.min_gap():.3e} "
                f"below {GAP_FLAG_TOL:.0e} * max|E|",
                stacklevel=2,
            )


def kick_matrix_elements(
    kick: HermitianOperator,
    spec: Spectrum,
    k: int,
    offsets: list[int],
) -> dict[int, float | None]:
    """Matrix elements <E_{k+offset}|K|E_k> for each requested offset.

    Out-of-range offsets map to None rather than raising, so sweeps near the
    spectrum edges degrade gracefully.
    """
    if not 0 <= k < spec.dim:
        raise IndexError(f"level k={k} outside [0, {spec.dim})")
    v_k = spec.eigenvectors[:, k]
    kv = kick.matrix @ v_k
    out: dict[int, float | None] = {}
    for offset in offsets:
        target = k + offset
        if not 0 <= target < spec.dim:
            out[offset] = None
            continue
        elem = np.vdot(spec.eigenvectors[:, target], kv)
        if abs(elem.imag) > 1e-10:
            raise RuntimeError(
                f"matrix element <{target}|K|{k}> has imaginary part {elem.imag:.3e}"
            )
        out[offset] = float(elem.real)
    return out


def kick_in_eigenbasis(kick: HermitianOperator, spec: Spectrum) -> np.ndarray:
    """Full kick matrix in the H0 eigenbasis, K_tilde = V^dag K V (real)."""
    kt = spec.eigenvectors.conj().T @ (kick.matrix @ spec.eigenvectors)
    if np.iscomplexobj(kt):
        if np.max(np.abs(kt.imag)) > 1e-10:
            raise RuntimeError("kick matrix not real in this eigenbasis")
        kt = kt.real
    return kt
