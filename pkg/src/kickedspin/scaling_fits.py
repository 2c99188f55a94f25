"""Power-law fitting and curve-collapse analysis for breakdown thresholds.

Pure numerics: everything here consumes plain arrays produced elsewhere
(threshold sweeps, fidelity curves) and is independent of the quantum
machinery, so it can be unit-tested against synthetic data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOMINANCE_TOL = 1e-3


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of y = prefactor * x**exponent in log-log space."""

    exponent: float
    prefactor: float
    r_squared: float
    n_points: int


def fit_power_law(x: np.ndarray, y: np.ndarray) -> PowerLawFit:
    """Fit ln y = a ln x + b; requires >= 3 strictly positive samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < 3:
        raise ValueError(f"need >= 3 points for a power-law fit, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit requires strictly positive x and y")
    lx = np.log(x)
    ly = np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    coeffs, _, _, _ = np.linalg.lstsq(design, ly, rcond=None)
    predicted = design @ coeffs
    ss_res = float(np.sum((ly - predicted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(
        exponent=float(coeffs[0]),
        prefactor=float(np.exp(coeffs[1])),
        r_squared=r_squared,
        n_points=len(x),
    )


def default_j_grid(j_min: float = 100.0, j_max: float = 1000.0, n: int = 8) -> np.ndarray:
    """Log-spaced J grid rounded to half-integers (here: integers, j >= 1)."""
    raw = np.geomspace(j_min, j_max, n)
    grid = np.unique(np.round(raw * 2.0) / 2.0)
    if len(grid) < n:
        raise ValueError("rounding collapsed grid points; widen the range")
    return grid


def collapse_deviation(
    z_curves: list[tuple[np.ndarray, np.ndarray]],
    f_floor: float = 0.45,
    n_grid: int = 200,
) -> float:
    """Max spread of fidelity curves on a shared rescaled axis.

    Each curve is (z, F) with z the rescaled kick strength.  Curves are
    interpolated onto a common grid restricted to the overlap of their z
    ranges and to z where every curve still has F >= f_floor; the deviation
    is the largest max-min spread across the grid.
    """
    if len(z_curves) < 2:
        raise ValueError("collapse needs at least two curves")
    z_lo = max(float(np.min(z)) for z, _ in z_curves)
    z_hi = min(float(np.max(z)) for z, _ in z_curves)
    if not z_hi > z_lo:
        raise ValueError("curves have no overlapping z range")
    grid = np.linspace(z_lo, z_hi, n_grid)
    stack = np.empty((len(z_curves), n_grid))
    for i, (z, f) in enumerate(z_curves):
        order = np.argsort(z)
        stack[i] = np.interp(grid, z[order], f[order])
    valid = np.all(stack >= f_floor, axis=0)
    if not np.any(valid):
        raise ValueError(f"no grid points where all curves exceed {f_floor}")
    spread = stack[:, valid].max(axis=0) - stack[:, valid].min(axis=0)
    return float(spread.max())


def monotone_mismatch_subset(j_values: np.ndarray, mismatches: np.ndarray) -> np.ndarray:
    """Indices of the longest same-sign run where |r| decreases strictly with J.

    The raw mismatch series oscillates through zero as levels slide past the
    resonance; collapse checks only make sense on stretches where the
    selected level approaches the resonance from one side without hopping
    across it.
    """
    if len(j_values) != len(mismatches):
        raise ValueError("grids must match")
    order = np.argsort(j_values)
    r = np.asarray(mismatches)[order]
    mags = np.abs(r)
    signs = np.sign(r)
    best_start, best_len = 0, 1
    start = 0
    for i in range(1, len(mags)):
        if signs[i] == signs[i - 1] and mags[i] < mags[i - 1]:
            if i - start + 1 > best_len:
                best_start, best_len = start, i - start + 1
        else:
            start = i
    return order[best_start:best_start + best_len]


def smooth_decay_subset(
    j_values: np.ndarray,
    mismatches: np.ndarray,
    n_pick: int = 4,
    rel_tol: float = 0.25,
    min_span: float = 2.0,
    band: tuple[float, float] | None = None,
) -> np.ndarray:
    """Indices of n_pick sizes whose mismatch decays as 1/J at a fixed sign.

    Rescaled fidelity curves only share a knee when the scaled detuning
    J*|r| is about the same for every size.  A contiguous one-sided stretch
    of the series (see monotone_mismatch_subset) still sweeps J*|r| from the
    oscillation envelope down toward zero, so instead this looks for sizes
    whose J*r values agree to within rel_tol at one sign while J itself
    spans at least a factor min_span, and returns the group with the
    tightest J*r agreement.  Within a group only sizes whose |r| keeps
    falling are chained, so the subset stays strictly monotone.

    band, when given, admits only sizes whose |J*r| falls inside that
    fraction range of the series' own detuning scale (95th percentile of
    |J*r|).  Near the top of the range the next level is about as close to
    the resonance as the selected one, near zero the rescaled knee runs off
    any finite window; mid-band sets are the ones that actually cluster.
    """
    if len(j_values) != len(mismatches):
        raise ValueError("grids must match")
    if n_pick < 2:
        raise ValueError("need at least two sizes")
    order = np.argsort(j_values)
    j = np.asarray(j_values, dtype=float)[order]
    d = j * np.asarray(mismatches, dtype=float)[order]
    admit = np.ones(len(d), dtype=bool)
    if band is not None:
        scale = float(np.quantile(np.abs(d), 0.95))
        admit = (np.abs(d) >= band[0] * scale) & (np.abs(d) <= band[1] * scale)
    q = 1.0 + rel_tol
    best: np.ndarray | None = None
    best_score = (np.inf, 0.0)
    for sign in (1.0, -1.0):
        cand = np.flatnonzero((np.sign(d) == sign) & admit)
        if len(cand) < n_pick:
            continue
        by_mag = cand[np.argsort(np.abs(d[cand]))]
        mags = np.abs(d[by_mag])
        for lo in range(len(by_mag) - n_pick + 1):
            hi = lo + np.searchsorted(mags[lo:], mags[lo] * q, side="right")
            group = np.sort(by_mag[lo:hi])  # back to ascending J
            if len(group) < n_pick:
                continue
            chain = [group[0]]
            for i in group[1:]:
                last = chain[-1]
                # |r_i| < |r_last| exactly when the |d| ratio lags the J ratio
                if np.abs(d[i]) * j[last] < np.abs(d[last]) * j[i]:
                    chain.append(i)
            if len(chain) < n_pick:
                continue
            span = j[chain[-1]] / j[chain[0]]
            if span < min_span:
                continue
            keep = np.unique(np.round(np.linspace(0, len(chain) - 1, n_pick)).astype(int))
            pick = np.asarray(chain)[keep]
            spread = float(np.abs(d[pick]).max() / np.abs(d[pick]).min())
            score = (spread, -j[pick[-1]] / j[pick[0]])
            if score < best_score:
                best_score = score
                best = pick
    if best is None:
        raise ValueError(
            f"no {n_pick} sizes with J*r constant to {rel_tol:.0%} over a "
            f"{min_span:g}x span; densify the series or loosen the tolerance"
        )
    return order[best]


def dominance_threshold(a2_nr: float, a2_cr: float, tol: float = DOMINANCE_TOL) -> float:
    """J above which the resonant s2 term outweighs the smooth one.

    Balances a2_nr against tol * a2_cr(J) with a2_cr growing two powers of J
    faster: J_th = sqrt(a2_nr / (tol * a2_cr)).
    """
    if a2_nr <= 0 or a2_cr <= 0:
        raise ValueError("coefficients must be positive")
    return float(np.sqrt(a2_nr / (tol * a2_cr)))
