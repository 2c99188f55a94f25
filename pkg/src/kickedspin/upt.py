"""Perturbative expansion of Floquet eigenpairs in the kick strength.

The Floquet operator splits as exp(-i tau H0) exp(-i eps K), so corrections
are organized in powers of eps with denominators exp(i tau (E_k' - E_k)) - 1.
Two regimes share the module: the generic one where all zero-kick phase gaps
are finite, and the resonant one where a pair of phases coincides mod 2 pi
and the kick must first be diagonalized inside the pair.

All routines work on the spectrum plus the kick operator expressed in the
unperturbed eigenbasis; no Floquet matrices are built here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .resonance import ResonanceLabel

TWO_PI = 2.0 * np.pi

DEGENERATE_PHASE_TOL = 1e-8
NEAR_SINGULAR_PHASE_TOL = 1e-4
REAL_KICK_IMAG_TOL = 1e-12
PAIR_COUPLING_FLOOR = 1e-12


class DegenerateQuasienergyError(ValueError):
    """Raised when a zero-kick phase gap is too small for the generic series."""


@dataclass(frozen=True)
class UptNonDegenerate:
    """Generic-series data for one level: phases, decay coefficients, f1."""

    k: int
    phi0: float
    phi1: float
    phi2: float
    a2: float
    a3: float
    f1: np.ndarray
    min_phase_gap: float
    near_singular: bool


@dataclass(frozen=True)
class UptDegenerate:
    """Resonant-pair data: split first-order phases and the anchored member.

    c columns hold the zero-kick pair states in the (E_k, E_{k+m}) basis;
    column 0 is the member with the larger weight on E_k, whose squared
    weight c_k1_sq exceeds 1/2 by |kappa_o| / (4 kappa J) at large J.
    """

    k: int
    m: int
    phi1_pair: tuple[float, float]
    c: np.ndarray
    kappa: float
    kappa_o: float
    a2_er: float
    c_k1_sq: float
    mixing_f1: complex


def phase_gaps(energies: np.ndarray, tau: float, k: int) -> np.ndarray:
    """Circular distance of tau*(E_k' - E_k) to 0 mod 2 pi, for all k' != k."""
    diffs = tau * (np.delete(energies, k) - energies[k])
    return np.abs(np.mod(diffs + np.pi, TWO_PI) - np.pi)


def _half_angles(energies: np.ndarray, tau: float, k: int):
    """sin and cos of tau*(E_k - E_k')/2 for every k'; entry k is excluded by callers."""
    half = 0.5 * tau * (energies[k] - energies)
    return np.sin(half), np.cos(half)


def _check_gap(energies: np.ndarray, tau: float, k: int) -> tuple[float, bool]:
    gaps = phase_gaps(energies, tau, k)
    min_gap = float(gaps.min())
    if min_gap < DEGENERATE_PHASE_TOL:
        partner = int(np.argmin(gaps))
        partner += partner >= k
        raise DegenerateQuasienergyError(
            f"levels {k} and {partner} are phase-degenerate to {min_gap:.2e}; "
            "use the resonant-pair expansion"
        )
    return min_gap, min_gap < NEAR_SINGULAR_PHASE_TOL


def eigenstate_first_order(
    energies: np.ndarray, kick_eig: np.ndarray, tau: float, k: int
) -> np.ndarray:
    """Components of f1 in the unperturbed basis; entry k is zero."""
    phase = np.exp(1j * tau * (energies - energies[k]))
    f1 = np.zeros(len(energies), dtype=complex)
    mask = np.arange(len(energies)) != k
    f1[mask] = -1j * kick_eig[mask, k] / (phase[mask] - 1.0)
    return f1


def a2_coefficient(energies: np.ndarray, kick_eig: np.ndarray, tau: float, k: int) -> float:
    """Quadratic fidelity-decay coefficient, sum of |K_k'k|^2 / (4 sin^2)."""
    s, _ = _half_angles(energies, tau, k)
    mask = np.arange(len(energies)) != k
    terms = np.abs(kick_eig[mask, k]) ** 2 / s[mask] ** 2
    return float(0.25 * np.sum(terms))


def eigenstate_second_order(
    energies: np.ndarray,
    kick_eig: np.ndarray,
    tau: float,
    k: int,
    f1: np.ndarray | None = None,
) -> np.ndarray:
    """Components of f2 in the unperturbed basis; entry k is zero."""
    if f1 is None:
        f1 = eigenstate_first_order(energies, kick_eig, tau, k)
    phase = np.exp(1j * tau * (energies - energies[k]))
    phi1 = float(np.real(kick_eig[k, k]))
    k_f1 = kick_eig @ f1
    k_sq_col = kick_eig @ kick_eig[:, k]
    f2 = np.zeros(len(energies), dtype=complex)
    mask = np.arange(len(energies)) != k
    rhs = -1j * k_f1 - 0.5 * k_sq_col + 1j * phase * phi1 * f1
    f2[mask] = rhs[mask] / (phase[mask] - 1.0)
    return f2


def a3_coefficient(energies: np.ndarray, kick_eig: np.ndarray, tau: float, k: int) -> float:
    """Cubic fidelity-decay coefficient from the explicit triple-product sums.

    The antisymmetric K^2 sum vanishes identically for a real symmetric kick;
    it is evaluated anyway so complex kicks stay supported.
    """
    dim = len(energies)
    s, c = _half_angles(energies, tau, k)
    mask = np.arange(dim) != k

    row = kick_eig[k, :].copy()
    a = np.zeros(dim, dtype=complex)
    a[mask] = row[mask] / s[mask] ** 2
    b = np.zeros(dim, dtype=complex)
    b[mask] = kick_eig[mask, k] * c[mask] / s[mask]
    full = a @ kick_eig @ b
    diag = np.sum(a * np.diag(kick_eig) * b)
    first = 0.25 * (full - diag)

    diff = np.real(np.diag(kick_eig)) - np.real(kick_eig[k, k])
    second = 0.25 * np.sum(
        c[mask] / s[mask] ** 3 * np.abs(row[mask]) ** 2 * diff[mask]
    )

    k_sq = kick_eig @ kick_eig
    third = 0.125 * np.sum(
        (k_sq[k, mask] * kick_eig[mask, k] - row[mask] * k_sq[mask, k]) / s[mask] ** 2
    )

    total = first + second + third
    if abs(total.imag) > 1e-9 * max(abs(total.real), 1.0):
        raise RuntimeError(f"cubic coefficient came out complex: {total:.3e}")
    return float(total.real)


def quasienergy_corrections(
    energies: np.ndarray, kick_eig: np.ndarray, tau: float, k: int
) -> UptNonDegenerate:
    """Phases to second order plus decay coefficients for a generic level.

    Raises DegenerateQuasienergyError when some zero-kick phase gap is below
    1e-8; gaps between 1e-8 and 1e-4 only set the near_singular flag, since
    the series is formally fine but its leading terms are already huge.
    """
    min_gap, near_singular = _check_gap(energies, tau, k)
    s, c = _half_angles(energies, tau, k)
    mask = np.arange(len(energies)) != k
    phi0 = float(np.mod(tau * energies[k], TWO_PI))
    phi1 = float(np.real(kick_eig[k, k]))
    phi2 = float(0.5 * np.sum(c[mask] / s[mask] * np.abs(kick_eig[k, mask]) ** 2))
    f1 = eigenstate_first_order(energies, kick_eig, tau, k)
    a2 = a2_coefficient(energies, kick_eig, tau, k)
    a3 = a3_coefficient(energies, kick_eig, tau, k)
    return UptNonDegenerate(
        k=k,
        phi0=phi0,
        phi1=phi1,
        phi2=phi2,
        a2=a2,
        a3=a3,
        f1=f1,
        min_phase_gap=min_gap,
        near_singular=near_singular,
    )


def s2_split(
    energies: np.ndarray,
    kick_eig: np.ndarray,
    tau: float,
    k: int,
    label: ResonanceLabel,
) -> tuple[float, float]:
    """(resonant, smooth) partition of the quadratic coefficient.

    Resonant terms are the small-denominator ones at k' = k +/- m*M, whose
    half-angle sits near a multiple of pi when the m:n condition holds; the
    rest of the sum stays finite as J grows.
    """
    dim = len(energies)
    s, _ = _half_angles(energies, tau, k)
    idx = np.arange(dim)
    mask = idx != k
    terms = np.zeros(dim)
    terms[mask] = 0.25 * np.abs(kick_eig[mask, k]) ** 2 / s[mask] ** 2
    offset = idx - k
    resonant = mask & (offset % label.m == 0)
    s2_cr = float(np.sum(terms[resonant]))
    s2_nr = float(np.sum(terms[mask & ~resonant]))
    return s2_cr, s2_nr


def degenerate_block(
    energies: np.ndarray, kick_eig: np.ndarray, tau: float, k: int, m: int
) -> UptDegenerate:
    """Resonant-pair expansion for levels (k, k+m) at an exactly tuned tau.

    Diagonalizes the kick inside the pair, labels the member with the larger
    E_k weight as anchored, and evaluates the quadratic decay coefficient of
    that member with the pair excluded from the sum.
    """
    if k + m >= len(energies):
        raise IndexError(f"pair (k={k}, m={m}) outside the spectrum")
    pair_gap = float(
        np.abs(np.mod(tau * (energies[k + m] - energies[k]) + np.pi, TWO_PI) - np.pi)
    )
    if pair_gap > NEAR_SINGULAR_PHASE_TOL:
        raise ValueError(
            f"pair phases differ by {pair_gap:.2e}; tau is not tuned to resonance"
        )
    block = np.array(
        [
            [kick_eig[k, k], kick_eig[k, k + m]],
            [kick_eig[k + m, k], kick_eig[k + m, k + m]],
        ]
    )
    if np.max(np.abs(block.imag)) > REAL_KICK_IMAG_TOL * max(np.max(np.abs(block)), 1.0):
        raise RuntimeError("pair block is not real; phase conventions are broken")
    block = block.real
    coupling = abs(block[1, 0])
    if coupling < PAIR_COUPLING_FLOOR * max(np.max(np.abs(block)), 1.0):
        raise RuntimeError(
            f"kick does not couple the pair (|K_pair| = {coupling:.2e}); "
            "first-order phases do not split and the expansion is ill-defined"
        )
    vals, vecs = np.linalg.eigh(block)
    anchored = int(np.argmax(np.abs(vecs[0, :])))
    other = 1 - anchored
    order = [anchored, other]
    c = vecs[:, order]
    # deterministic signs: anchored weight on E_k positive
    for col in range(2):
        if c[0, col] < 0:
            c[:, col] = -c[:, col]
    phi1_pair = (float(vals[anchored]), float(vals[other]))

    j = (len(energies) - 1) / 2.0
    kappa = coupling / j
    kappa_o = float(block[1, 1] - block[0, 0])

    f0 = np.zeros(len(energies), dtype=complex)
    f0[k] = c[0, 0]
    f0[k + m] = c[1, 0]
    a2_er_val = er_a2(energies, kick_eig, tau, k, m, f0)
    mixing = er_first_order_mixing(energies, kick_eig, tau, k, m, c, phi1_pair)
    return UptDegenerate(
        k=k,
        m=m,
        phi1_pair=phi1_pair,
        c=c,
        kappa=float(kappa),
        kappa_o=kappa_o,
        a2_er=a2_er_val,
        c_k1_sq=float(c[0, 0] ** 2),
        mixing_f1=mixing,
    )


def er_a2(
    energies: np.ndarray,
    kick_eig: np.ndarray,
    tau: float,
    k: int,
    m: int,
    f0: np.ndarray,
) -> float:
    """Quadratic decay coefficient of a pair member, pair excluded.

    Same structure as the generic coefficient with E_k replaced by the
    anchored zero-kick state; removing k and k+m from the sum removes the
    exactly vanishing denominators.
    """
    s, _ = _half_angles(energies, tau, k)
    mask = np.ones(len(energies), dtype=bool)
    mask[[k, k + m]] = False
    k_f0 = kick_eig @ f0
    terms = np.abs(k_f0[mask]) ** 2 / s[mask] ** 2
    return float(0.25 * np.sum(terms))


def er_first_order_mixing(
    energies: np.ndarray,
    kick_eig: np.ndarray,
    tau: float,
    k: int,
    m: int,
    c: np.ndarray,
    phi1_pair: tuple[float, float],
) -> complex:
    """Overlap of the first-order correction with the other pair member.

    Combines the small-denominator sum over outside levels with the K^2
    cross term, divided by the first-order phase split; a vanishing split
    raises since the pair then never decouples.
    """
    split = phi1_pair[0] - phi1_pair[1]
    if abs(split) < PAIR_COUPLING_FLOOR:
        raise RuntimeError("first-order phases are degenerate; mixing is undefined")
    dim = len(energies)
    f0 = np.zeros(dim, dtype=complex)
    f0[k] = c[0, 0]
    f0[k + m] = c[1, 0]
    f0_other = np.zeros(dim, dtype=complex)
    f0_other[k] = c[0, 1]
    f0_other[k + m] = c[1, 1]

    phase = np.exp(1j * tau * (energies - energies[k]))
    mask = np.ones(dim, dtype=bool)
    mask[[k, k + m]] = False
    bra = np.conj(kick_eig.conj().T @ f0_other)  # <f0'|K|E_k'> over k'
    ket = kick_eig @ f0  # <E_k'|K|f0>
    outside = np.sum(bra[mask] * ket[mask] / (phase[mask] - 1.0))
    k_sq_cross = np.vdot(f0_other, kick_eig @ (kick_eig @ f0))
    return complex(-1j / split * (outside + 0.5 * k_sq_cross))


def er_fidelity_curve(a2_er: float, c_k1_sq: float, eps: np.ndarray) -> np.ndarray:
    """Predicted top weight of the anchored pair member vs kick strength."""
    eps = np.asarray(eps, dtype=float)
    return (1.0 - a2_er * eps**2) * c_k1_sq


def predict_eps_max_pair(deg: UptDegenerate, j: float) -> float:
    """Threshold prediction for a resonant pair: sqrt(2c / (J a2_er)).

    c = |kappa_o| / (4 kappa) is the excess weight of the anchored member;
    the label swap for negative kappa_o keeps the excess positive.
    """
    if deg.a2_er <= 0:
        raise ValueError("decay coefficient must be positive")
    c = abs(deg.kappa_o) / (4.0 * deg.kappa)
    return float(np.sqrt(2.0 * c / (j * deg.a2_er)))


def predict_eps_max_series(a2: float, a3: float) -> float:
    """Smallest positive root of a2 eps^2 + a3 eps^3 = 1/2.

    Truncating the fidelity series at cubic order turns the half-weight
    condition into a cubic equation; no positive real root means the
    truncated series never reaches 1/2 and the prediction is meaningless.
    """
    if a2 <= 0:
        raise ValueError("quadratic coefficient must be positive")
    if a3 == 0.0:
        return float(np.sqrt(0.5 / a2))
    roots = np.roots([a3, a2, 0.0, -0.5])
    real = roots[np.abs(roots.imag) < 1e-9 * np.maximum(np.abs(roots.real), 1e-300)]
    positive = np.sort(real.real[real.real > 0])
    if len(positive) == 0:
        raise ValueError(
            f"series a2={a2:.3e}, a3={a3:.3e} has no positive half-weight root"
        )
    return float(positive[0])
