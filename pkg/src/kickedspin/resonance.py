"""Quantum periods, resonance conditions, and state-selection procedures.

An m:n resonance means n quantum periods fit m kick periods:
tau * (E_{k+m} - E_k) = 2 pi n.  Selection returns the level closest to that
condition (CR), the same level with tau re-tuned to satisfy it exactly (ER),
or the level whose local frequency best matches a target classical orbit
(NR).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lmg import ModelParams, Spectrum, build_h0
from .scaling_fits import fit_power_law

TWO_PI = 2.0 * np.pi

ER_PHASE_TOL = 1e-10
ER_DRIFT_LIMIT = 0.05


@dataclass(frozen=True)
class ResonanceLabel:
    """m:n resonance label; the gcd-reduced pair is kept alongside the raw one."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"resonance label needs m, n >= 1, got {self.m}:{self.n}")

    @property
    def reduced(self) -> tuple[int, int]:
        g = math.gcd(self.m, self.n)
        return self.m // g, self.n // g

    def __str__(self) -> str:
        return f"{self.m}:{self.n}"


@dataclass(frozen=True)
class StateSelection:
    """A chosen unperturbed level with its resonance condition tag.

    mismatch holds r = tau*(E_{k+m} - E_k)/(2 pi n) - 1 for CR/ER and
    |tau/T_{k,1} - f| for NR.  local_minima lists every local minimum of |r|
    across the spectrum so multi-crossing resonances can be inspected.
    """

    j: float
    k: int
    label: ResonanceLabel | None
    condition: str  # "NR" | "CR" | "ER"
    tau_used: float
    mismatch: float
    energy_over_j: float
    local_minima: tuple[int, ...] = ()


def quantum_period(spec: Spectrum, k: int, m: int) -> float:
    """T_{k,m} = 2 pi / (E_{k+m} - E_k)."""
    if m < 1:
        raise ValueError("offset m must be >= 1")
    if k + m >= spec.dim or k < 0:
        raise IndexError(f"pair (k={k}, k+m={k + m}) outside [0, {spec.dim})")
    gap = spec.energies[k + m] - spec.energies[k]
    if gap == 0.0:
        raise ZeroDivisionError(f"degenerate pair (k={k}, m={m}): infinite period")
    return TWO_PI / gap


def _cr_mismatch_series(spec_energies: np.ndarray, label: ResonanceLabel, tau: float) -> np.ndarray:
    gaps = spec_energies[label.m:] - spec_energies[:-label.m]
    return tau * gaps / (TWO_PI * label.n) - 1.0


def _local_minima(values: np.ndarray) -> tuple[int, ...]:
    if values.size < 3:
        return tuple(range(values.size))
    inner = (values[1:-1] <= values[:-2]) & (values[1:-1] <= values[2:])
    idx = list(np.nonzero(inner)[0] + 1)
    if values[0] < values[1]:
        idx.insert(0, 0)
    if values[-1] < values[-2]:
        idx.append(values.size - 1)
    return tuple(int(i) for i in idx)


def find_cr_state(spec: Spectrum, label: ResonanceLabel, tau: float) -> StateSelection:
    """Level k minimizing |tau*(E_{k+m} - E_k)/(2 pi n) - 1| at fixed tau.

    The scan checks only gaps with the exact offset m.  Ties and multiple
    local minima resolve to the global argmin at the lowest k; all local
    minima are recorded on the selection.
    """
    if label.m >= spec.dim:
        raise ValueError(f"offset m={label.m} needs dim > m, got {spec.dim}")
    target_gap = TWO_PI * label.n / tau
    gaps = spec.energies[label.m:] - spec.energies[:-label.m]
    if not (gaps.min() <= target_gap <= gaps.max()):
        raise ValueError(
            f"resonance {label} outside the spectrum: target gap {target_gap:.6f} "
            f"not within [{gaps.min():.6f}, {gaps.max():.6f}]"
        )
    r = _cr_mismatch_series(spec.energies, label, tau)
    k = int(np.argmin(np.abs(r)))
    return StateSelection(
        j=spec.j,
        k=k,
        label=label,
        condition="CR",
        tau_used=tau,
        mismatch=float(r[k]),
        energy_over_j=float(spec.energy_over_j(k)),
        local_minima=_local_minima(np.abs(r)),
    )


def tune_tau_er(spec: Spectrum, label: ResonanceLabel, tau_seed: float) -> StateSelection:
    """Re-tune tau so the CR pair at tau_seed satisfies the resonance exactly."""
    base = find_cr_state(spec, label, tau_seed)
    gap = spec.energies[base.k + label.m] - spec.energies[base.k]
    tau = TWO_PI * label.n / gap
    drift = abs(tau - tau_seed) / tau_seed
    if drift > ER_DRIFT_LIMIT:
        raise ValueError(
            f"tuned tau drifts {drift:.1%} from seed {tau_seed} (selection unstable)"
        )
    phase = tau * gap - TWO_PI * label.n
    if abs(phase) > ER_PHASE_TOL:
        raise RuntimeError(f"tuning failed to close the phase: {phase:.3e}")
    return StateSelection(
        j=spec.j,
        k=base.k,
        label=label,
        condition="ER",
        tau_used=float(tau),
        mismatch=float(tau * gap / (TWO_PI * label.n) - 1.0),
        energy_over_j=base.energy_over_j,
        local_minima=base.local_minima,
    )


def find_nr_state(
    spec: Spectrum,
    classical_energy: float,
    tau: float,
    classical_period_fn,
) -> StateSelection:
    """Level whose ratio tau/T_{k,1} best matches the classical target.

    The target fraction f = tau/T(E/J) acts as the floating-point stand-in
    for an irrational winding ratio; the argmin ties break toward lower k.
    """
    period = classical_period_fn(classical_energy)
    f = tau / period
    ratios = tau * (spec.energies[1:] - spec.energies[:-1]) / TWO_PI
    deviations = np.abs(ratios - f)
    k = int(np.argmin(deviations))
    return StateSelection(
        j=spec.j,
        k=k,
        label=None,
        condition="NR",
        tau_used=tau,
        mismatch=float(deviations[k]),
        energy_over_j=float(spec.energy_over_j(k)),
    )


def cr_mismatch_over_j(
    j_values: np.ndarray,
    label: ResonanceLabel,
    tau: float,
    gamma_x: float,
    gamma_y: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Selected-level mismatch r(J) over a J grid (eigenvalues only, no vectors)."""
    mismatches = np.empty(len(j_values))
    levels = np.empty(len(j_values), dtype=int)
    for i, j in enumerate(j_values):
        params = ModelParams(j=float(j), gamma_x=gamma_x, gamma_y=gamma_y, tau=tau)
        energies = np.linalg.eigvalsh(build_h0(params).matrix.real)
        r = _cr_mismatch_series(energies, label, tau)
        k = int(np.argmin(np.abs(r)))
        mismatches[i] = r[k]
        levels[i] = k
    return mismatches, levels


def envelope_points(
    j_values: np.ndarray, magnitudes: np.ndarray, window: int = 9, quantile: float = 0.9
) -> tuple[np.ndarray, np.ndarray]:
    """Upper-quantile envelope of an oscillating decaying series.

    Sliding windows over the J grid, each contributing (median J, q-quantile
    of |value|); the raw series passes through zero so a plain mean or fit
    would underestimate the amplitude.
    """
    if len(j_values) < window:
        raise ValueError(f"need at least {window} points, got {len(j_values)}")
    centers = []
    env = []
    for start in range(0, len(j_values) - window + 1):
        block = slice(start, start + window)
        centers.append(np.median(j_values[block]))
        env.append(np.quantile(np.abs(magnitudes[block]), quantile))
    return np.array(centers), np.array(env)


def extract_delta(selections: list[StateSelection], label: ResonanceLabel) -> float:
    """Fit |tau*(E_{k+m} - E_k)/2 - n pi| * J to a constant via its envelope.

    The constant is delta_{m:n} in the 1/J mismatch law delta = delta_{m:n}/J.
    A residual series that does not decay like 1/J (envelope exponent above
    -0.5) signals a wrong label or too-small J and raises.
    """
    if len(selections) < 5:
        raise ValueError("need at least 5 J values to extract delta")
    ordered = sorted(selections, key=lambda s: s.j)
    j_values = np.array([s.j for s in ordered])
    # |r| * pi * n = |tau(E_{k+m} - E_k)/2 - n pi|
    phase_residuals = np.abs(np.array([s.mismatch for s in ordered])) * np.pi * label.n
    if np.max(phase_residuals) < 1e-12:
        return 0.0  # exactly tuned series
    window = min(9, 2 * (len(j_values) // 4) + 1)
    centers, env = envelope_points(j_values, phase_residuals, window=window)
    positive = env > 0
    if positive.sum() >= 3:
        fit = fit_power_law(centers[positive], env[positive])
        if fit.exponent > -0.5:
            raise ValueError(
                f"mismatch envelope does not decay (exponent {fit.exponent:.2f}); "
                "wrong label or J range too small"
            )
    return float(np.mean(env * centers))
