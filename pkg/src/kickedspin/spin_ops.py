"""Angular-momentum operator matrices on the spin-J Dicke basis.

Everything downstream works in the (2J+1)-dimensional maximal-spin sector
with the basis ordered by ascending magnetic quantum number m = -j ... +j.
Operators are stored dense and complex even when real, so later modules can
compose them without dtype branching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Largest dense dimension constructed by default; 2J+1 = 2001 at the desk
# scale J = 1000 fits easily, the cap guards against accidental huge inputs.
DEFAULT_DIM_CAP = 20001

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class AngularMomentumRep:
    """Spin magnitude and the size of its Dicke basis."""

    j: float
    dim: int

    def __post_init__(self) -> None:
        two_j = round(2 * self.j)
        if abs(2 * self.j - two_j) > 1e-12 or two_j < 0:
            raise ValueError(f"j must be a non-negative half-integer, got {self.j}")
        if self.dim != two_j + 1:
            raise ValueError(f"dim must equal 2j+1 = {two_j + 1}, got {self.dim}")

    @property
    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order, m = -j ... +j."""
        return -self.j + np.arange(self.dim)


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix tied to an angular-momentum representation."""

    rep: AngularMomentumRep
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = self.matrix
        if m.shape != (self.rep.dim, self.rep.dim):
            raise ValueError(f"matrix shape {m.shape} != basis dim {self.rep.dim}")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max |M - M^dag| = {dev:.3e}")

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_rep(other)
        return HermitianOperator(self.rep, self.matrix + other.matrix)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        if abs(np.imag(scalar)) > 0:
            raise ValueError("only real scalars keep the operator Hermitian")
        return HermitianOperator(self.rep, self.matrix * float(np.real(scalar)))

    __rmul__ = __mul__

    def _check_rep(self, other: "HermitianOperator") -> None:
        if other.rep != self.rep:
            raise ValueError("operators live on different representations")


def hermitian_product(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Symmetrized product (AB + BA)/2, the Hermitian part of AB.

    For the squared operators used in the model Hamiltonian (A = B) this is
    just A @ A.
    """
    a._check_rep(b)
    ab = a.matrix @ b.matrix
    return HermitianOperator(a.rep, 0.5 * (ab + ab.conj().T))


def angular_momentum_matrices(
    j: float, dim_cap: int = DEFAULT_DIM_CAP
) -> tuple[HermitianOperator, HermitianOperator, HermitianOperator]:
    """Build (Jx, Jy, Jz) on the spin-j Dicke basis.

    Args:
        j: spin magnitude, a half-integer >= 1/2.
        dim_cap: refuse to allocate a basis larger than this.

    Returns:
        The triple (Jx, Jy, Jz) as HermitianOperator values, complex dtype.
    """
    two_j = round(2 * j)
    if abs(2 * j - two_j) > 1e-12 or two_j < 1:
        raise ValueError(f"j must be a half-integer >= 1/2, got {j}")
    dim = two_j + 1
    if dim > dim_cap:
        raise ValueError(f"basis dimension {dim} exceeds cap {dim_cap}")
    rep = AngularMomentumRep(j=two_j / 2, dim=dim)

    m = rep.m_values
    # <j, m+1| J+ |j, m> = sqrt(j(j+1) - m(m+1)) on the first subdiagonal
    # of J+ in ascending-m ordering.
    raise_elems = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jplus = np.zeros((dim, dim), dtype=complex)
    jplus[np.arange(1, dim), np.arange(dim - 1)] = raise_elems

    jx = 0.5 * (jplus + jplus.conj().T)
    jy = -0.5j * (jplus - jplus.conj().T)
    jz = np.diag(m.astype(complex))
    return (
        HermitianOperator(rep, jx),
        HermitianOperator(rep, jy),
        HermitianOperator(rep, jz),
    )
