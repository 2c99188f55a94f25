"""Threshold-vs-size sweeps: select a state per system size, find its threshold.

The lab couples the selection procedures to the threshold solver over a grid
of J values and fits the resulting thresholds to a power law.  A solve budget
caps the total number of Floquet diagonalizations so runaway sweeps stop
early with a partial (but honestly flagged) result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .classical import classical_period
from .diagnostics import EpsMaxResult, EpsMaxSolverConfig, epsilon_max, fidelity_curve
from .lmg import ModelParams, Spectrum, build_h0, build_kick, diagonalize
from .resonance import (
    ResonanceLabel,
    StateSelection,
    cr_mismatch_over_j,
    find_cr_state,
    find_nr_state,
    tune_tau_er,
)
from .scaling_fits import (
    PowerLawFit,
    collapse_deviation,
    fit_power_law,
    smooth_decay_subset,
)

SpectraProvider = Callable[[float], tuple[Spectrum, Spectrum]]

# rescaled kick axis: eps = z / J**power
Z_POWER = {"epsJ": 1, "epsJ2": 2}


@dataclass
class ScalingPoint:
    """One system size: the selected level and its threshold solve."""

    selection: StateSelection
    result: EpsMaxResult


@dataclass
class ScalingRun:
    """Sweep output: per-size points, the power-law fit, and budget state."""

    condition: str
    label: ResonanceLabel | None
    points: list[ScalingPoint] = field(default_factory=list)
    fit: PowerLawFit | None = None
    partial: bool = False
    total_solves: int = 0


def default_spectra_provider(
    tau: float, gamma_x: float, gamma_y: float
) -> SpectraProvider:
    """Direct diagonalization of both operators at each size."""

    def provide(j: float) -> tuple[Spectrum, Spectrum]:
        params = ModelParams(j=j, gamma_x=gamma_x, gamma_y=gamma_y, tau=tau)
        return diagonalize(build_h0(params)), diagonalize(build_kick(params))

    return provide


def select_state(
    h0_spec: Spectrum,
    condition: str,
    tau: float,
    label: ResonanceLabel | None = None,
    classical_energy: float | None = None,
    gamma_x: float = 0.0,
    gamma_y: float = 0.0,
) -> StateSelection:
    """Dispatch to the selection rule matching the condition tag."""
    if condition == "CR":
        if label is None:
            raise ValueError("close-to-resonance selection needs a label")
        return find_cr_state(h0_spec, label, tau)
    if condition == "ER":
        if label is None:
            raise ValueError("exact-resonance selection needs a label")
        return tune_tau_er(h0_spec, label, tau)
    if condition == "NR":
        if classical_energy is None:
            raise ValueError("non-resonant selection needs a target energy")
        return find_nr_state(
            h0_spec,
            classical_energy,
            tau,
            lambda e: classical_period(e, gamma_x, gamma_y),
        )
    raise ValueError(f"unknown condition tag {condition!r}")


def run_scaling(
    j_values: np.ndarray,
    condition: str,
    tau: float,
    gamma_x: float,
    gamma_y: float,
    label: ResonanceLabel | None = None,
    classical_energy: float | None = None,
    solver_config: EpsMaxSolverConfig | None = None,
    solve_budget: int | None = None,
    provider: SpectraProvider | None = None,
) -> ScalingRun:
    """Threshold sweep over system sizes with a shared solve budget.

    Sizes are visited in ascending order (cheapest first), so a budget that
    runs out still leaves the most points possible.  Points whose threshold
    search found no crossing are kept in the record but excluded from the
    fit, which needs at least three converged sizes.
    """
    if provider is None:
        provider = default_spectra_provider(tau, gamma_x, gamma_y)
    run = ScalingRun(condition=condition, label=label)
    for j in np.sort(np.asarray(j_values, dtype=float)):
        if solve_budget is not None and run.total_solves >= solve_budget:
            run.partial = True
            break
        h0_spec, kick_spec = provider(float(j))
        selection = select_state(
            h0_spec, condition, tau, label, classical_energy, gamma_x, gamma_y
        )
        remaining = None if solve_budget is None else solve_budget - run.total_solves
        config = solver_config if solver_config is not None else EpsMaxSolverConfig()
        if remaining is not None:
            capped = config.max_solves is None or config.max_solves > remaining
            if capped:
                config = EpsMaxSolverConfig(
                    **{**config.__dict__, "max_solves": remaining}
                )
        try:
            result = epsilon_max(h0_spec, kick_spec, selection, config)
        except RuntimeError as err:
            if "budget" in str(err):
                run.partial = True
                break
            raise
        run.points.append(ScalingPoint(selection=selection, result=result))
        run.total_solves += result.n_floquet_solves

    converged = [
        p for p in run.points if p.result.status == "converged"
    ]
    if len(converged) >= 3:
        run.fit = fit_power_law(
            np.array([p.result.j for p in converged]),
            np.array([p.result.eps_max for p in converged]),
        )
    return run


@dataclass
class CollapseCurves:
    """Fidelity-vs-rescaled-kick curves for several sizes, plus their spread."""

    condition: str
    variable: str
    z_values: np.ndarray
    j_values: np.ndarray
    curves: list[np.ndarray]
    selections: list[StateSelection]
    deviation: float


def collapse_sizes(
    label: ResonanceLabel,
    tau: float,
    gamma_x: float,
    gamma_y: float,
    j_min: float = 250.0,
    j_max: float = 1000.0,
    n_scan: int = 60,
    n_pick: int = 4,
    band: tuple[float, float] = (0.3, 0.7),
) -> np.ndarray:
    """Sizes whose selected-level mismatch decays as 1/J at a fixed sign.

    Scans the mismatch over a dense size grid and picks sizes with matched
    mid-band scaled detuning J*r (see smooth_decay_subset); on those the
    rescaled breakdown curves can cluster instead of fanning out with the
    detuning phase.
    """
    j_values = np.unique(np.round(np.geomspace(j_min, j_max, n_scan) * 2.0) / 2.0)
    mismatches, _ = cr_mismatch_over_j(j_values, label, tau, gamma_x, gamma_y)
    idx = smooth_decay_subset(j_values, mismatches, n_pick=n_pick, band=band)
    return j_values[np.sort(idx)]


def collapse_curves(
    j_values: np.ndarray,
    condition: str,
    tau: float,
    gamma_x: float,
    gamma_y: float,
    variable: str,
    z_values: np.ndarray,
    label: ResonanceLabel | None = None,
    classical_energy: float | None = None,
    solver_config: EpsMaxSolverConfig | None = None,
    provider: SpectraProvider | None = None,
    f_floor: float = 0.45,
) -> CollapseCurves:
    """Tracked-branch fidelity at each size on a shared rescaled kick axis.

    variable picks the rescaling eps = z/J or z/J^2.  Close-to-resonance size
    sets must approach the resonance one-sidedly (same mismatch sign,
    magnitude shrinking as J grows): mixed-phase sets sample different
    residual detunings and have no common curve to land on, so they are
    rejected up front, before any Floquet solves.
    """
    if variable not in Z_POWER:
        raise ValueError(f"unknown collapse variable {variable!r}; use epsJ or epsJ2")
    power = Z_POWER[variable]
    z_values = np.asarray(z_values, dtype=float)
    if z_values.ndim != 1 or len(z_values) < 4:
        raise ValueError("z grid must be one-dimensional with at least 4 points")
    if np.any(z_values <= 0.0):
        raise ValueError("z grid must be strictly positive")
    ordered = np.sort(np.asarray(j_values, dtype=float))
    if len(ordered) < 2:
        raise ValueError("collapse needs at least two sizes")
    if condition == "CR":
        if label is None:
            raise ValueError("close-to-resonance collapse needs a label")
        r, _ = cr_mismatch_over_j(ordered, label, tau, gamma_x, gamma_y)
        nonzero = r[r != 0.0]
        one_sided = len(np.unique(np.sign(nonzero))) <= 1 and np.all(
            np.diff(np.abs(r)) < 0.0
        )
        if not one_sided:
            raise ValueError(
                "resonant collapse needs a one-sided size set; selected-level "
                f"mismatches {r.tolist()} change sign or grow with J"
            )
    if provider is None:
        provider = default_spectra_provider(tau, gamma_x, gamma_y)
    selections: list[StateSelection] = []
    curves: list[np.ndarray] = []
    for j in ordered:
        h0_spec, kick_spec = provider(float(j))
        sel = select_state(
            h0_spec, condition, tau, label, classical_energy, gamma_x, gamma_y
        )
        selections.append(sel)
        curves.append(
            fidelity_curve(
                h0_spec, kick_spec, sel, z_values / float(j) ** power, solver_config
            )
        )
    deviation = collapse_deviation([(z_values, f) for f in curves], f_floor=f_floor)
    return CollapseCurves(
        condition=condition,
        variable=variable,
        z_values=z_values,
        j_values=ordered,
        curves=curves,
        selections=selections,
        deviation=deviation,
    )
