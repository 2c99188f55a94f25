"""Command-line entry point: every export the package defines, one run directory per call.

Each subcommand resolves its configuration, computes (or replays from the
results cache) the requested artifact, and seals the output directory with a
manifest and checksum index.  Errors print a machine-readable JSON report to
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import floquet as floquet_mod
from .classical import (
    classical_period,
    energy_contour_seeds,
    h0_classical,
    poincare_section,
)
from .config import ConfigError, RunConfig, load_config
from .diagnostics import (
    EpsMaxResult,
    EpsMaxSolverConfig,
    epsilon_max,
    husimi,
    participation_ratio,
)
from .floquet import FloquetBuilder, associate_states, diagonalize_unitary
from .io import OUTPUT_ENV_VAR, ResultsCache, RunDirectory, cache_key
from .lmg import ModelParams, Spectrum, build_h0, build_kick, diagonalize
from .resonance import ResonanceLabel, StateSelection, quantum_period
from .scaling import Z_POWER, collapse_curves, collapse_sizes, select_state
from .scaling_fits import default_j_grid, fit_power_law
from .upt import (
    DegenerateQuasienergyError,
    degenerate_block,
    predict_eps_max_pair,
    predict_eps_max_series,
    quasienergy_corrections,
    s2_split,
)
from .lmg import kick_in_eigenbasis

EPSMAX_HEADER = ["J", "k", "E_k/J", "condition", "eps_max", "F_at_eps_max", "n_solves"]
SELECTION_HEADER = ["J", "condition", "m", "n", "k", "E_k/J", "tau_used", "mismatch"]


def _spectra(model: ModelParams) -> tuple[Spectrum, Spectrum]:
    return diagonalize(build_h0(model)), diagonalize(build_kick(model))


def _model_payload(model: ModelParams) -> dict:
    return {
        "j": model.j,
        "gamma_x": model.gamma_x,
        "gamma_y": model.gamma_y,
        "tau": model.tau,
        "epsilon": model.epsilon,
    }


def _selection_payload(params: dict) -> dict:
    return {
        "condition": params["condition"],
        "m": params.get("m"),
        "n": params.get("n"),
        "classical_energy": params.get("classical_energy"),
    }


def _solver_from(params: dict) -> EpsMaxSolverConfig:
    return EpsMaxSolverConfig(**params.get("solver", {}))


def _solver_payload(config: EpsMaxSolverConfig) -> dict:
    return {f.name: getattr(config, f.name) for f in fields(EpsMaxSolverConfig)}


def _selection_for(
    cfg_model: ModelParams, params: dict, h0_spec: Spectrum
) -> StateSelection:
    label = None
    if params["condition"] in ("CR", "ER"):
        label = ResonanceLabel(int(params["m"]), int(params["n"]))
    return select_state(
        h0_spec,
        params["condition"],
        cfg_model.tau,
        label=label,
        classical_energy=params.get("classical_energy"),
        gamma_x=cfg_model.gamma_x,
        gamma_y=cfg_model.gamma_y,
    )


def _selection_row(j: float, sel: StateSelection) -> list:
    return [
        j,
        sel.condition,
        sel.label.m if sel.label else None,
        sel.label.n if sel.label else None,
        sel.k,
        sel.energy_over_j,
        sel.tau_used,
        sel.mismatch,
    ]


def _epsmax_row(result: EpsMaxResult, sel: StateSelection) -> list:
    eps = None if result.status != "converged" else result.eps_max
    return [
        result.j,
        result.k,
        sel.energy_over_j,
        result.condition_tag,
        eps,
        result.f_at_eps_max,
        result.n_floquet_solves,
    ]


def cmd_spectrum(cfg: RunConfig, rundir: RunDirectory, cache: ResultsCache) -> None:
    model = cfg.model
    key = cache_key({"kind": "spectrum-v1", **_model_payload(model)})
    data = cache.get_arrays(key)
    if data is None:
        spec = diagonalize(build_h0(model))
        energies = spec.energies
        cache.put_arrays(key, {"energies": energies})
    else:
        energies = data["energies"]
    j = model.j
    rundir.add_csv(
        "spectrum.csv",
        ["k", "E_k", "E_k/J"],
        [[k, energies[k], energies[k] / j] for k in range(len(energies))],
        role="unperturbed spectrum",
    )
    rows = []
    for k in range(len(energies) - 1):
        gap = energies[k + 1] - energies[k]
        if gap <= 0:
            continue
        # midpoint of the pair: the semiclassical energy of the k -> k+1 gap
        e_over_j = (energies[k] + energies[k + 1]) / (2.0 * j)
        if not -1.0 < e_over_j < 1.0:
            continue
        t_quantum = 2.0 * np.pi / gap
        t_classical = classical_period(e_over_j, model.gamma_x, model.gamma_y)
        rows.append([k, e_over_j, t_quantum, t_classical])
    rundir.add_csv(
        "period_compare.csv",
        ["k", "E_over_J", "T_quantum", "T_classical"],
        rows,
        role="level-pair periods against classical orbit periods",
    )


def cmd_floquet(cfg: RunConfig, rundir: RunDirectory, cache: ResultsCache) -> None:
    model = cfg.model
    key = cache_key({"kind": "floquet-summary-v1", **_model_payload(model)})
    data = cache.get_arrays(key)
    if data is None:
        h0_spec, kick_spec = _spectra(model)
        builder = FloquetBuilder(h0_spec, kick_spec)
        fe = diagonalize_unitary(builder.in_h0_basis(model.tau, model.epsilon))
        associate_states(fe, h0_spec, in_h0_basis=True)
        weights = np.abs(fe.states) ** 2
        vk = (h0_spec.energies @ weights) / model.j
        pr = 1.0 / np.sum(weights**2, axis=0)
        data = {
            "phi": fe.phases,
            "assoc": np.asarray(fe.assoc_n),
            "fmax": np.asarray(fe.f_max),
            "vk": vk,
            "pr": pr,
        }
        cache.put_arrays(key, data)
    rundir.add_csv(
        "floquet_summary.csv",
        ["k", "phi_k", "assoc_n", "F_max", "V_k", "pr"],
        [
            [k, data["phi"][k], int(data["assoc"][k]), data["fmax"][k], data["vk"][k], data["pr"][k]]
            for k in range(len(data["phi"]))
        ],
        role="Floquet eigenstate summary",
    )


def cmd_husimi(cfg: RunConfig, rundir: RunDirectory, cache: ResultsCache) -> None:
    params = cfg.params_for("husimi")
    if "k" not in params:
        raise ConfigError("'husimi.k' (Floquet state index) is required")
    k = int(params["k"])
    n_grid = int(params.get("n_grid", 256))
    model = cfg.model
    key = cache_key(
        {"kind": "husimi-v1", "k": k, "n_grid": n_grid, **_model_payload(model)}
    )
    data = cache.get_arrays(key)
    if data is None:
        h0_spec, kick_spec = _spectra(model)
        builder = FloquetBuilder(h0_spec, kick_spec)
        fe = diagonalize_unitary(builder.in_h0_basis(model.tau, model.epsilon))
        if not 0 <= k < h0_spec.dim:
            raise ConfigError(f"'husimi.k'={k} outside [0, {h0_spec.dim})")
        state_dicke = h0_spec.eigenvectors @ fe.states[:, k]
        grid = husimi(state_dicke, h0_spec.rep, n_grid=n_grid)
        data = {"q": grid.q_axis, "p": grid.p_axis, "values": grid.values}
        cache.put_arrays(key, data)
    rows = []
    for ip, p in enumerate(data["p"]):
        for iq, q in enumerate(data["q"]):
            rows.append([q, p, data["values"][ip, iq]])
    rundir.add_csv(
        "husimi.csv", ["Q", "P", "value"], rows, role="coherent-state overlap map"
    )


def cmd_poincare(cfg: RunConfig, rundir: RunDirectory, cache: ResultsCache) -> None:
    params = cfg.params_for("poincare")
    energies = params.get("energies")
    if not energies:
        raise ConfigError("'poincare.energies' (list of h0 values) is required")
    n_seeds = int(params.get("n_seeds", 8))
    n_periods = int(params.get("n_periods", 200))
    model = cfg.model
    rows = []
    seed_id = 0
    for energy in energies:
        seeds = energy_contour_seeds(
            float(energy), model.gamma_x, model.gamma_y, n_seeds
        )
        records = poincare_section(seeds, model, n_periods)
        for record in records:
            q0, p0 = record.initial.q, record.initial.p
            rows.append(
                [seed_id, 0, q0, p0, h0_classical(record.initial, model.gamma_x, model.gamma_y)]
            )
            for i, (q, p) in enumerate(record.strobe_points):
                rows.append([seed_id, i + 1, q, p, record.energies[i]])
            seed_id += 1
    rundir.add_csv(
        "poincare.csv",
        ["seed_id", "period_index", "Q", "P", "h0"],
        rows,
        role="stroboscopic sections per seed",
    )
    curve = params.get("period_curve")
    if curve:
        e_grid = np.linspace(
            float(curve.get("e_min", -0.999)),
            float(curve.get("e_max", 0.999)),
            int(curve.get("n_points", 200)),
        )
        rundir.add_csv(
            "period_curve.csv",
            ["E_over_J", "T"],
            [[e, classical_period(float(e), model.gamma_x, model.gamma_y)] for e in e_grid],
            role="classical orbit period against energy",
        )


def _epsmax_payload_key(model: ModelParams, params: dict, solver: EpsMaxSolverConfig, j: float) -> str:
    return cache_key(
        {
            "kind": "epsmax-v1",
            "j": j,
            "gamma_x": model.gamma_x,
            "gamma_y": model.gamma_y,
            "tau": model.tau,
            "selection": _selection_payload(params),
            "solver": _solver_payload(solver),
        }
    )


def _epsmax_at(
    model: ModelParams,
    params: dict,
    solver: EpsMaxSolverConfig,
    j: float,
    cache: ResultsCache,
) -> tuple[EpsMaxResult, StateSelection]:
    """Threshold for one system size, replayed from the cache when warm."""
    key = _epsmax_payload_key(model, params, solver, j)
    stored = cache.get_json(key)
    if stored is not None:
        sel = StateSelection(
            j=j,
            k=int(stored["k"]),
            label=(
                ResonanceLabel(int(params["m"]), int(params["n"]))
                if params["condition"] in ("CR", "ER")
                else None
            ),
            condition=params["condition"],
            tau_used=float(stored["tau_used"]),
            mismatch=float(stored["mismatch"]),
            energy_over_j=float(stored["energy_over_j"]),
        )
        result = EpsMaxResult(
            j=j,
            k=sel.k,
            condition_tag=sel.condition,
            eps_max=(float("nan") if stored["eps_max"] is None else float(stored["eps_max"])),
            f_at_eps_max=float(stored["f_at_eps_max"]),
            bracket=tuple(stored["bracket"]),
            # provenance of the stored result, so replays are bit-identical
            n_floquet_solves=int(stored["n_solves"]),
            status=stored["status"],
            scan_eps=np.array(stored["scan_eps"]),
            scan_f=np.array(stored["scan_f"]),
        )
        return result, sel
    run_model = ModelParams(
        j=j, gamma_x=model.gamma_x, gamma_y=model.gamma_y, tau=model.tau
    )
    h0_spec, kick_spec = _spectra(run_model)
    sel = _selection_for(run_model, params, h0_spec)
    result = epsilon_max(h0_spec, kick_spec, sel, solver)
    cache.put_json(
        key,
        {
            "k": sel.k,
            "tau_used": sel.tau_used,
            "mismatch": sel.mismatch,
            "energy_over_j": sel.energy_over_j,
            "eps_max": None if result.status != "converged" else result.eps_max,
            "f_at_eps_max": result.f_at_eps_max,
            "n_solves": result.n_floquet_solves,
            "bracket": [result.bracket[0], result.bracket[1] if np.isfinite(result.bracket[1]) else None],
            "status": result.status,
            "scan_eps": result.scan_eps.tolist(),
            "scan_f": result.scan_f.tolist(),
        },
    )
    return result, sel


def cmd_epsmax(cfg: RunConfig, rundir: RunDirectory, cache: ResultsCache) -> None:
    params = cfg.params_for("epsmax")
    if not params:
        raise ConfigError("'epsmax' block is required for this command")
    solver = _solver_from(params)
    result, sel = _epsmax_at(cfg.model, params, solver, cfg.model.j, cache)
    rundir.add_csv(
        "epsmax.csv", EPSMAX_HEADER, [_epsmax_row(result, sel)], role="breakdown threshold"
    )
    rundir.add_csv(
        "selection.csv",
        SELECTION_HEADER,
        [_selection_row(cfg.model.j, sel)],
        role="selected level and resonance condition",
    )


def cmd_scaling(cfg: RunConfig, rundir: RunDirectory, cache: ResultsCache) -> None:
    params = cfg.params_for("scaling")
    if not params:
        raise ConfigError("'scaling' block is required for this command")
    solver = _solver_from(params)
    grid_spec = params.get("j_grid")
    if grid_spec is None:
        grid = default_j_grid()
    elif isinstance(grid_spec, dict):
        grid = default_j_grid(
            float(grid_spec.get("min", 100)),
            float(grid_spec.get("max", 1000)),
            int(grid_spec.get("n", 8)),
        )
    else:
        grid = np.asarray([float(j) for j in grid_spec])
    budget = params.get("solve_budget")
    rows = []
    selection_rows = []
    converged_j = []
    converged_eps = []
    excluded = []
    total_solves = 0
    partial = False
    for j in np.sort(grid):
        if budget is not None and total_solves >= int(budget):
            partial = True
            break
        result, sel = _epsmax_at(cfg.model, params, solver, float(j), cache)
        total_solves += result.n_floquet_solves
        rows.append(_epsmax_row(result, sel))
        selection_rows.append(_selection_row(float(j), sel))
        if result.status == "converged":
            converged_j.append(float(j))
            converged_eps.append(result.eps_max)
        else:
            excluded.append(float(j))
    rundir.add_csv("scaling.csv", EPSMAX_HEADER, rows, role="thresholds per system size")
    rundir.add_csv(
        "selection.csv", SELECTION_HEADER, selection_rows, role="selected levels per size"
    )
    fit_doc: dict = {
        "condition": params["condition"],
        "label": (
            f"{params['m']}:{params['n']}" if params["condition"] in ("CR", "ER") else None
        ),
        "j_grid": [float(j) for j in grid],
        "seed_tau": cfg.model.tau,
        "solver": _solver_payload(solver),
        "excluded": excluded,
        "partial": partial,
        "total_solves": total_solves,
    }
    if len(converged_j) >= 3:
        fit = fit_power_law(np.array(converged_j), np.array(converged_eps))
        fit_doc["fit"] = {
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "r_squared": fit.r_squared,
            "n_points": fit.n_points,
        }
    else:
        fit_doc["fit"] = None
    rundir.add_json("fit_summary.json", fit_doc, role="power-law fit of thresholds")
    if params.get("collapse"):
        _export_collapse(cfg, params, solver, rundir, cache)


def _export_collapse(
    cfg: RunConfig,
    params: dict,
    solver: EpsMaxSolverConfig,
    rundir: RunDirectory,
    cache: ResultsCache,
) -> None:
    """Rescaled fidelity curves for the scaling run's condition.

    The size set either comes verbatim from the config or, for CR runs, from
    a mismatch scan that keeps only sizes approaching the resonance from one
    side.  Curves are cached as arrays so warm re-runs export without any
    Floquet solves.
    """
    block = params["collapse"]
    variable = block.get("variable")
    if variable not in Z_POWER:
        raise ConfigError("'scaling.collapse.variable' must be 'epsJ' or 'epsJ2'")
    z_spec = block.get("z")
    if not isinstance(z_spec, dict) or not {"min", "max", "n"} <= z_spec.keys():
        raise ConfigError("'scaling.collapse.z' needs 'min', 'max' and 'n'")
    z_values = np.geomspace(float(z_spec["min"]), float(z_spec["max"]), int(z_spec["n"]))
    model = cfg.model
    condition = params["condition"]
    label = (
        ResonanceLabel(int(params["m"]), int(params["n"]))
        if condition in ("CR", "ER")
        else None
    )
    j_set = block.get("j_set")
    if j_set is None:
        scan = block.get("subset_scan")
        if condition != "CR" or not isinstance(scan, dict):
            raise ConfigError(
                "'scaling.collapse' needs 'j_set', or 'subset_scan' on a CR run"
            )
        j_set = collapse_sizes(
            label,
            model.tau,
            model.gamma_x,
            model.gamma_y,
            float(scan.get("j_min", 250.0)),
            float(scan.get("j_max", 1000.0)),
            int(scan.get("n_scan", 60)),
            int(scan.get("n_pick", 4)),
        )
    j_set = [float(j) for j in j_set]
    key = cache_key(
        {
            "kind": "collapse-v1",
            "variable": variable,
            "j_set": j_set,
            "z": z_values.tolist(),
            "gamma_x": model.gamma_x,
            "gamma_y": model.gamma_y,
            "tau": model.tau,
            "selection": _selection_payload(params),
            "solver": _solver_payload(solver),
        }
    )
    arrays = cache.get_arrays(key)
    if arrays is None:
        res = collapse_curves(
            np.asarray(j_set),
            condition,
            model.tau,
            model.gamma_x,
            model.gamma_y,
            variable,
            z_values,
            label=label,
            classical_energy=params.get("classical_energy"),
            solver_config=solver,
        )
        arrays = {
            "j": res.j_values,
            "z": res.z_values,
            "f": np.vstack(res.curves),
            "k": np.array([s.k for s in res.selections]),
            "mismatch": np.array([s.mismatch for s in res.selections]),
            "deviation": np.array([res.deviation]),
        }
        cache.put_arrays(key, arrays)
    power = Z_POWER[variable]
    rows = []
    for i, j in enumerate(arrays["j"]):
        for z, f_val in zip(arrays["z"], arrays["f"][i]):
            rows.append([float(j), int(arrays["k"][i]), float(z), float(z) / float(j) ** power, float(f_val)])
    rundir.add_csv(
        "collapse_curves.csv",
        ["J", "k", "z", "eps", "F_max"],
        rows,
        role="fidelity against the rescaled kick strength, one curve per size",
    )
    rundir.add_json(
        "collapse_summary.json",
        {
            "variable": variable,
            "j_set": [float(j) for j in arrays["j"]],
            "selected_k": [int(k) for k in arrays["k"]],
            "mismatch": [float(m) for m in arrays["mismatch"]],
            "max_pairwise_deviation": float(arrays["deviation"][0]),
            "f_floor": 0.45,
        },
        role="curve-collapse spread summary",
    )


def cmd_upt(cfg: RunConfig, rundir: RunDirectory, cache: ResultsCache) -> None:
    params = cfg.params_for("upt")
    if not params:
        raise ConfigError("'upt' block is required for this command")
    model = cfg.model
    h0_spec, kick_spec = _spectra(model)
    kick_eig = kick_in_eigenbasis(
        build_kick(model), h0_spec
    )
    rows = []
    for state in params["states"]:
        sel = _selection_for(model, state, h0_spec)
        a2 = a3 = s2_cr = s2_nr = a2_er = c_k1_sq = None
        phi1_lo = phi1_hi = eps_pred = None
        if sel.condition == "ER":
            tuned_tau = sel.tau_used
            deg = degenerate_block(
                h0_spec.energies, kick_eig, tuned_tau, sel.k, sel.label.m
            )
            a2_er = deg.a2_er
            c_k1_sq = deg.c_k1_sq
            phi1_lo, phi1_hi = sorted(deg.phi1_pair)
            eps_pred = predict_eps_max_pair(deg, model.j)
        else:
            try:
                nd = quasienergy_corrections(
                    h0_spec.energies, kick_eig, sel.tau_used, sel.k
                )
            except DegenerateQuasienergyError as err:
                raise RuntimeError(
                    f"state {sel.k} needs the resonant-pair treatment: {err}"
                ) from err
            a2, a3 = nd.a2, nd.a3
            if sel.label is not None:
                s2_cr, s2_nr = s2_split(
                    h0_spec.energies, kick_eig, sel.tau_used, sel.k, sel.label
                )
            try:
                eps_pred = predict_eps_max_series(a2, a3)
            except ValueError:
                eps_pred = None
        rows.append(
            [
                model.j,
                sel.k,
                sel.condition,
                a2,
                a3,
                s2_cr,
                s2_nr,
                a2_er,
                c_k1_sq,
                phi1_lo,
                phi1_hi,
                eps_pred,
            ]
        )
    rundir.add_csv(
        "upt_report.csv",
        [
            "J",
            "k",
            "condition",
            "a2",
            "a3",
            "s2_cr",
            "s2_nr",
            "a2_er",
            "c_k1_sq",
            "phi1_lo",
            "phi1_hi",
            "eps_max_pred",
        ],
        rows,
        role="perturbative coefficients and threshold predictions",
    )


COMMANDS = {
    "spectrum": cmd_spectrum,
    "floquet": cmd_floquet,
    "husimi": cmd_husimi,
    "poincare": cmd_poincare,
    "epsmax": cmd_epsmax,
    "scaling": cmd_scaling,
    "upt": cmd_upt,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickedspin",
        description="Kicked collective-spin laboratory: spectra, Floquet maps, "
        "breakdown thresholds, and classical sections.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument(
        "--workers", type=int, default=None, help="reserved; accepted for config parity"
    )
    parser.add_argument("--j", type=float, default=None, help="override model.j")
    parser.add_argument("--tau", type=float, default=None, help="override model.tau")
    parser.add_argument(
        "--epsilon", type=float, default=None, help="override model.epsilon"
    )
    parser.add_argument(
        "--no-cache", action="store_true", help="disable the results cache"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out_override = args.out
        if out_override is None and os.environ.get(OUTPUT_ENV_VAR):
            out_override = Path(os.environ[OUTPUT_ENV_VAR])
        cfg = load_config(
            args.config,
            overrides={
                "output_dir": out_override,
                "j": args.j,
                "tau": args.tau,
                "epsilon": args.epsilon,
                "workers": args.workers,
                "cache": False if args.no_cache else None,
            },
            default_output=f"runs/{args.command}",
        )
        cache = ResultsCache(enabled=cfg.cache)
        rundir = RunDirectory(cfg.output_dir)
        COMMANDS[args.command](cfg, rundir, cache)
        rundir.finalize(args.command, cfg.resolved())
    except ConfigError as err:
        json.dump({"error": "ConfigError", "message": str(err)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except Exception as err:  # noqa: BLE001 - reported, not swallowed
        json.dump({"error": type(err).__name__, "message": str(err)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
