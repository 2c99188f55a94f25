"""Threshold sweeps across system sizes: dispatch, budgets, and fit wiring."""

import numpy as np
import pytest

from kickedspin import (
    EpsMaxSolverConfig,
    ModelParams,
    ResonanceLabel,
    build_h0,
    build_kick,
    collapse_curves,
    collapse_sizes,
    cr_mismatch_over_j,
    diagonalize,
    find_cr_state,
    run_scaling,
    select_state,
)

GX, GY, TAU = -0.95, 0.0, 8.0


def h0_at(j):
    return diagonalize(build_h0(ModelParams(j=j, gamma_x=GX, gamma_y=GY, tau=TAU)))


def test_select_state_dispatch():
    h0 = h0_at(10.0)
    label = ResonanceLabel(1, 1)
    cr = select_state(h0, "CR", TAU, label=label)
    assert cr == find_cr_state(h0, label, TAU)
    er = select_state(h0, "ER", TAU, label=label)
    assert er.condition == "ER" and er.mismatch == 0.0
    nr = select_state(h0, "NR", TAU, classical_energy=-0.85, gamma_x=GX, gamma_y=GY)
    assert nr.condition == "NR"


def test_select_state_guards():
    h0 = h0_at(6.0)
    with pytest.raises(ValueError, match="label"):
        select_state(h0, "CR", TAU)
    with pytest.raises(ValueError, match="label"):
        select_state(h0, "ER", TAU)
    with pytest.raises(ValueError, match="energy"):
        select_state(h0, "NR", TAU)
    with pytest.raises(ValueError, match="condition"):
        select_state(h0, "XX", TAU, label=ResonanceLabel(1, 1))


def test_run_scaling_small_sweep():
    run = run_scaling(
        np.array([10.0, 6.0, 8.0]),
        "NR",
        TAU,
        GX,
        GY,
        classical_energy=-0.85,
    )
    assert run.condition == "NR" and run.label is None
    assert not run.partial
    assert [p.result.j for p in run.points] == [6.0, 8.0, 10.0]  # ascending
    assert all(p.result.status == "converged" for p in run.points)
    assert run.total_solves == sum(p.result.n_floquet_solves for p in run.points)
    assert run.fit is not None and run.fit.n_points == 3
    assert run.fit.exponent < 0  # thresholds shrink with system size


def test_run_scaling_budget_stops_early():
    full = run_scaling(
        np.array([6.0, 8.0]), "NR", TAU, GX, GY, classical_energy=-0.85
    )
    first_cost = full.points[0].result.n_floquet_solves
    run = run_scaling(
        np.array([6.0, 8.0]),
        "NR",
        TAU,
        GX,
        GY,
        classical_energy=-0.85,
        solve_budget=first_cost + 5,
    )
    assert run.partial
    assert len(run.points) == 1
    assert run.fit is None


def test_run_scaling_budget_exhausted_immediately():
    run = run_scaling(
        np.array([6.0]), "NR", TAU, GX, GY, classical_energy=-0.85, solve_budget=1
    )
    assert run.partial
    assert run.points == []
    assert run.fit is None


def test_run_scaling_keeps_unconverged_points_out_of_fit():
    config = EpsMaxSolverConfig(n_geom=5, eps_ceiling_scale=1e-5)
    run = run_scaling(
        np.array([6.0, 8.0, 10.0]),
        "NR",
        TAU,
        GX,
        GY,
        classical_energy=-0.85,
        solver_config=config,
    )
    assert len(run.points) == 3
    assert all(p.result.status == "no_crossing" for p in run.points)
    assert run.fit is None
    assert not run.partial


def test_run_scaling_uses_custom_provider():
    calls = []

    def provider(j):
        calls.append(j)
        params = ModelParams(j=j, gamma_x=GX, gamma_y=GY, tau=TAU)
        return diagonalize(build_h0(params)), diagonalize(build_kick(params))

    run_scaling(
        np.array([6.0, 8.0]),
        "CR",
        TAU,
        GX,
        GY,
        label=ResonanceLabel(1, 1),
        provider=provider,
    )
    assert calls == [6.0, 8.0]


def test_run_scaling_does_not_mutate_config():
    config = EpsMaxSolverConfig()
    run_scaling(
        np.array([6.0]),
        "NR",
        TAU,
        GX,
        GY,
        classical_energy=-0.85,
        solver_config=config,
        solve_budget=500,
    )
    assert config.max_solves is None


def test_collapse_sizes_match_scaled_detuning():
    sizes = collapse_sizes(
        ResonanceLabel(1, 1), TAU, GX, GY, j_min=40.0, j_max=120.0, n_scan=40, n_pick=3
    )
    assert len(sizes) == 3
    assert np.all(np.diff(sizes) > 0)
    assert sizes[-1] / sizes[0] >= 2.0
    mismatches, _ = cr_mismatch_over_j(sizes, ResonanceLabel(1, 1), TAU, GX, GY)
    assert len(np.unique(np.sign(mismatches))) == 1
    assert np.all(np.diff(np.abs(mismatches)) < 0)
    scaled = np.abs(sizes * mismatches)
    assert scaled.max() / scaled.min() <= 1.25


def test_collapse_curves_nr_small():
    z = np.geomspace(0.2, 2.0, 6)
    res = collapse_curves(
        np.array([20.0, 30.0]), "NR", TAU, GX, GY, "epsJ", z,
        classical_energy=-0.85,
    )
    assert res.variable == "epsJ"
    assert [len(c) for c in res.curves] == [6, 6]
    for curve in res.curves:
        assert np.all((curve > 0) & (curve <= 1))
        assert curve[0] > curve[-1]  # weight leaks as the kick grows
    assert 0 <= res.deviation < 1


def test_collapse_curves_rejects_mixed_phase_sizes():
    # consecutive 1:1 selections straddle the resonance at small J;
    # pick two sizes with opposite mismatch signs
    labels = ResonanceLabel(1, 1)
    scan = np.arange(20.0, 60.0, 0.5)
    r, _ = cr_mismatch_over_j(scan, labels, TAU, GX, GY)
    pos = scan[r > 0][:1]
    neg = scan[r < 0][:1]
    j_bad = np.sort(np.concatenate([pos, neg]))
    with pytest.raises(ValueError, match="one-sided"):
        collapse_curves(
            j_bad, "CR", TAU, GX, GY, "epsJ2", np.geomspace(0.5, 5.0, 6),
            label=labels,
        )


def test_collapse_curves_input_guards():
    z = np.geomspace(0.1, 1.0, 6)
    with pytest.raises(ValueError, match="variable"):
        collapse_curves(np.array([10.0, 20.0]), "NR", TAU, GX, GY, "epsJ3", z,
                        classical_energy=-0.85)
    with pytest.raises(ValueError, match="z grid"):
        collapse_curves(np.array([10.0, 20.0]), "NR", TAU, GX, GY, "epsJ",
                        np.array([0.1, 0.2]), classical_energy=-0.85)
    with pytest.raises(ValueError, match="two sizes"):
        collapse_curves(np.array([10.0]), "NR", TAU, GX, GY, "epsJ", z,
                        classical_energy=-0.85)
    with pytest.raises(ValueError, match="label"):
        collapse_curves(np.array([10.0, 20.0]), "CR", TAU, GX, GY, "epsJ2", z)
