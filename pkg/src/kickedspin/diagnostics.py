"""Eigenstate diagnostics: spreading measures, breakdown thresholds, Husimi maps.

The central routine is epsilon_max: follow one Floquet eigenstate from the
unkicked limit while the kick strength grows on a geometric grid, and locate
the first crossing of its dominant unperturbed weight through 1/2.  All state
amplitudes live in the unperturbed eigenbasis, where the Floquet matrix is
cheap to rebuild per kick strength.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .floquet import FloquetBuilder, diagonalize_unitary, follow_single_branch
from .lmg import ModelParams, Spectrum
from .resonance import StateSelection
from .spin_ops import AngularMomentumRep

F_CROSSING = 0.5
DISK_RADIUS_SQ = 4.0
BRANCH_OVERLAP_FLOOR = 0.5


def participation_ratio(amplitudes: np.ndarray) -> float:
    """PR = 1 / sum_n |c_n|^4 for a normalized amplitude vector."""
    weights = np.abs(amplitudes) ** 2
    total = weights.sum()
    if not np.isclose(total, 1.0, atol=1e-8):
        raise ValueError(f"amplitudes not normalized: sum |c|^2 = {total:.6f}")
    return float(1.0 / np.sum(weights**2))


def max_fidelity(amplitudes: np.ndarray) -> tuple[int, float]:
    """(argmax_n, max_n) of |c_n|^2; ties resolve to the smaller index."""
    weights = np.abs(amplitudes) ** 2
    n = int(np.argmax(weights))
    return n, float(weights[n])


def fidelity_complement(amplitudes: np.ndarray, k: int) -> float:
    """1 - |c_k|^2 computed as the sum over the other levels.

    Summing the complement keeps full relative precision when |c_k|^2 is
    within rounding of 1, where the direct difference cancels to noise.
    """
    weights = np.abs(amplitudes) ** 2
    return float(weights.sum() - weights[k])


@dataclass(frozen=True)
class EpsMaxSolverConfig:
    """Grid and refinement knobs for the breakdown-threshold search.

    The scan grid runs geometrically from eps_floor_scale/J^2 to
    eps_ceiling_scale/J, covering every predicted threshold scaling with
    margin on both sides.
    """

    n_geom: int = 64
    eps_floor_scale: float = 1e-8
    eps_ceiling_scale: float = 10.0
    n_linear: int = 8
    f_tol: float = 1e-4
    bracket_rel_tol: float = 1e-7
    bracket_rel_floor: float = 1e-12
    er_seed_eps: float = 1e-12
    max_solves: int | None = None


@dataclass
class EpsMaxResult:
    """Breakdown threshold for one tracked eigenstate.

    scan_eps/scan_f hold the geometric-grid trace up to the first crossing,
    which doubles as the raw material for collapse plots.
    """

    j: float
    k: int
    condition_tag: str
    eps_max: float
    f_at_eps_max: float
    bracket: tuple[float, float]
    n_floquet_solves: int
    status: str  # "converged" | "no_crossing"
    scan_eps: np.ndarray = field(default_factory=lambda: np.empty(0))
    scan_f: np.ndarray = field(default_factory=lambda: np.empty(0))


class _BranchTracker:
    """Follow one Floquet eigenstate through a kick-strength sweep."""

    def __init__(
        self,
        builder: FloquetBuilder,
        params: ModelParams,
        seed_state: np.ndarray,
        config: EpsMaxSolverConfig,
    ) -> None:
        self.builder = builder
        self.params = params
        self.config = config
        self.state = seed_state
        self.eps = 0.0
        self.n_solves = 0

    def _solve(self, eps: float):
        if self.config.max_solves is not None and self.n_solves >= self.config.max_solves:
            raise RuntimeError(
                f"solver budget exhausted ({self.config.max_solves} diagonalizations)"
            )
        f = self.builder.in_h0_basis(self.params.tau, eps)
        self.n_solves += 1
        return diagonalize_unitary(f)

    def advance(self, eps: float) -> np.ndarray:
        """Move the branch to kick strength eps, refining once on overlap loss."""
        fe = self._solve(eps)
        idx, overlap = follow_single_branch(self.state, fe)
        if overlap < BRANCH_OVERLAP_FLOOR and self.eps == 0.0:
            raise RuntimeError(
                f"branch seed does not connect to any Floquet state at "
                f"eps={eps:.3e} (best overlap {overlap:.3f})"
            )
        if overlap < BRANCH_OVERLAP_FLOOR:
            # one intermediate step; geometric midpoint matches the grid spacing
            mid = float(np.sqrt(self.eps * eps))
            fe_mid = self._solve(mid)
            idx_mid, ov_mid = follow_single_branch(self.state, fe_mid)
            if ov_mid < BRANCH_OVERLAP_FLOOR:
                raise RuntimeError(
                    f"branch lost between eps={self.eps:.3e} and {mid:.3e} "
                    f"(overlap {ov_mid:.3f}); grid too coarse"
                )
            self.state = fe_mid.states[:, idx_mid]
            fe = self._solve(eps)
            idx, overlap = follow_single_branch(self.state, fe)
            if overlap < BRANCH_OVERLAP_FLOOR:
                raise RuntimeError(
                    f"branch lost between eps={mid:.3e} and {eps:.3e} "
                    f"(overlap {overlap:.3f}) despite refinement"
                )
        self.state = fe.states[:, idx]
        self.eps = eps
        return self.state


def _seed_state(
    builder: FloquetBuilder,
    params: ModelParams,
    selection: StateSelection,
    config: EpsMaxSolverConfig,
) -> tuple[np.ndarray, int]:
    """Zero-kick limit of the tracked branch, in the unperturbed basis.

    Away from resonance the branch starts as the basis vector e_k.  At exact
    resonance the zero-kick Floquet operator is degenerate on the pair, and
    the limit state is the symmetric-ish combination the kick selects; it is
    read off at a seed kick strength small enough that second-order mixing
    with all other levels is below machine precision.
    """
    dim = builder.h0_spec.dim
    if selection.condition in ("NR", "CR"):
        seed = np.zeros(dim, dtype=complex)
        seed[selection.k] = 1.0
        return seed, 0
    if selection.condition != "ER":
        raise ValueError(f"unknown condition tag {selection.condition!r}")
    f = builder.in_h0_basis(params.tau, config.er_seed_eps)
    fe = diagonalize_unitary(f)
    weights = np.abs(fe.states[selection.k, :]) ** 2
    idx = int(np.argmax(weights))
    if weights[idx] < 0.25:
        raise RuntimeError(
            f"no Floquet state anchors on level {selection.k} at the seed kick "
            f"strength (best weight {weights[idx]:.3f})"
        )
    return fe.states[:, idx], 1


def epsilon_max(
    h0_spec: Spectrum,
    kick_spec: Spectrum,
    selection: StateSelection,
    config: EpsMaxSolverConfig | None = None,
    builder: FloquetBuilder | None = None,
) -> EpsMaxResult:
    """Smallest kick strength where the tracked state's top weight hits 1/2.

    Procedure: geometric scan from eps_floor_scale/J^2 to eps_ceiling_scale/J
    stopping at the first grid point with F < 1/2, a linear pass inside that
    bracket, then bisection until the bracket width falls below
    bracket_rel_tol times the threshold.  The returned f_at_eps_max must sit
    within f_tol of 1/2 or the solve errors out, so a grid that jumped a
    narrow structure cannot return silently.
    """
    if config is None:
        config = EpsMaxSolverConfig()
    if builder is None:
        builder = FloquetBuilder(h0_spec, kick_spec)
    j = h0_spec.j
    params = ModelParams(j=j, tau=selection.tau_used)

    seed, seed_solves = _seed_state(builder, params, selection, config)
    tracker = _BranchTracker(builder, params, seed, config)
    tracker.n_solves = seed_solves

    grid = np.geomspace(
        config.eps_floor_scale / j**2, config.eps_ceiling_scale / j, config.n_geom
    )

    scan_eps: list[float] = []
    scan_f: list[float] = []
    prev_eps = 0.0
    prev_f = float(np.max(np.abs(seed) ** 2))
    bracket = None
    for eps in grid:
        state = tracker.advance(float(eps))
        _, f_val = max_fidelity(state)
        scan_eps.append(float(eps))
        scan_f.append(f_val)
        if f_val < F_CROSSING:
            bracket = (prev_eps, float(eps))
            break
        prev_eps = float(eps)
        prev_f = f_val

    if bracket is None:
        return EpsMaxResult(
            j=j,
            k=selection.k,
            condition_tag=selection.condition,
            eps_max=float("nan"),
            f_at_eps_max=float(scan_f[-1]) if scan_f else prev_f,
            bracket=(prev_eps, float("inf")),
            n_floquet_solves=tracker.n_solves,
            status="no_crossing",
            scan_eps=np.array(scan_eps),
            scan_f=np.array(scan_f),
        )

    lo, hi = bracket
    f_lo = prev_f
    f_hi = scan_f[-1]
    if lo == 0.0:
        # crossing below the grid floor; probe well under the first grid point
        lo = hi * 1e-6
        _restart(seed, tracker, lo)
        _, f_lo = max_fidelity(tracker.state)
        if f_lo < F_CROSSING:
            raise RuntimeError(
                f"threshold below resolvable range (F={f_lo:.3f} at eps={lo:.3e})"
            )

    # linear pass: tighten the geometric bracket before bisection
    if config.n_linear > 0:
        _restart(seed, tracker, lo)
        for eps in np.linspace(lo, hi, config.n_linear + 2)[1:-1]:
            state = tracker.advance(float(eps))
            _, f_val = max_fidelity(state)
            if f_val < F_CROSSING:
                hi, f_hi = float(eps), f_val
                break
            lo, f_lo = float(eps), f_val

    # bisection on F - 1/2 with branch tracking from the lower edge
    _restart(seed, tracker, lo)
    lo_state = tracker.state
    width_target = config.bracket_rel_tol
    width_floor = config.bracket_rel_floor
    while hi - lo > max(width_target * hi, width_floor * hi):
        mid = 0.5 * (lo + hi)
        tracker.state, tracker.eps = lo_state, lo
        state = tracker.advance(mid)
        _, f_val = max_fidelity(state)
        if f_val < F_CROSSING:
            hi, f_hi = mid, f_val
        else:
            lo, f_lo = mid, f_val
            lo_state = state

    eps_max = 0.5 * (lo + hi)
    f_at = f_lo if abs(f_lo - F_CROSSING) < abs(f_hi - F_CROSSING) else f_hi
    if abs(f_at - F_CROSSING) > config.f_tol:
        raise RuntimeError(
            f"bisection converged to eps={eps_max:.6e} but F={f_at:.6f} is not "
            f"within {config.f_tol} of 1/2; crossing is discontinuous at this "
            "resolution"
        )
    return EpsMaxResult(
        j=j,
        k=selection.k,
        condition_tag=selection.condition,
        eps_max=float(eps_max),
        f_at_eps_max=float(f_at),
        bracket=(float(lo), float(hi)),
        n_floquet_solves=tracker.n_solves,
        status="converged",
        scan_eps=np.array(scan_eps),
        scan_f=np.array(scan_f),
    )


def fidelity_curve(
    h0_spec: Spectrum,
    kick_spec: Spectrum,
    selection: StateSelection,
    eps_values: np.ndarray,
    config: EpsMaxSolverConfig | None = None,
    builder: FloquetBuilder | None = None,
) -> np.ndarray:
    """Top unperturbed weight of the tracked branch at each kick strength.

    eps_values must be positive; they are visited in ascending order so the
    branch is followed continuously, and results are returned in the input
    order.
    """
    if config is None:
        config = EpsMaxSolverConfig()
    if builder is None:
        builder = FloquetBuilder(h0_spec, kick_spec)
    eps_values = np.asarray(eps_values, dtype=float)
    if np.any(eps_values <= 0):
        raise ValueError("kick strengths must be positive")
    params = ModelParams(j=h0_spec.j, tau=selection.tau_used)
    seed, _ = _seed_state(builder, params, selection, config)
    tracker = _BranchTracker(builder, params, seed, config)
    order = np.argsort(eps_values)
    out = np.empty(len(eps_values))
    for i in order:
        state = tracker.advance(float(eps_values[i]))
        _, out[i] = max_fidelity(state)
    return out


def _restart(seed: np.ndarray, tracker: _BranchTracker, eps: float) -> None:
    """Re-derive the branch at eps from the zero-kick seed in one hop.

    Jumping straight from the seed is safe because eps is at most one grid
    step above the last point where the branch was still F > 1/2 anchored to
    the same level.
    """
    tracker.state, tracker.eps = seed, 0.0
    if eps > 0.0:
        tracker.advance(eps)


def coherent_state(rep: AngularMomentumRep, q: float, p: float) -> np.ndarray:
    """Spin coherent state centered at a phase-space point, in the Jz basis.

    The planar chart maps the disk Q^2 + P^2 < 4 onto the sphere through
    alpha = (Q - iP)/sqrt(4 - Q^2 - P^2); the origin is the south pole
    (lowest Jz weight) and the rim is the north pole.  Amplitudes are built
    in log space so large representations stay finite.
    """
    r_sq = q * q + p * p
    if r_sq > DISK_RADIUS_SQ:
        raise ValueError(f"point ({q}, {p}) outside the radius-2 disk")
    dim = rep.dim
    state = np.zeros(dim, dtype=complex)
    if r_sq == DISK_RADIUS_SQ:
        state[-1] = 1.0
        return state
    alpha = (q - 1j * p) / np.sqrt(DISK_RADIUS_SQ - r_sq)
    if alpha == 0:
        state[0] = 1.0
        return state
    two_j = dim - 1
    n = np.arange(dim)  # n = j + m, 0 .. 2j
    log_binom = 0.5 * (
        gammaln(two_j + 1.0) - gammaln(n + 1.0) - gammaln(two_j - n + 1.0)
    )
    log_mag = log_binom + n * np.log(np.abs(alpha)) - 0.5 * two_j * np.log1p(np.abs(alpha) ** 2)
    phase = n * np.angle(alpha)
    state = np.exp(log_mag + 1j * phase)
    norm = np.linalg.norm(state)
    return state / norm


@dataclass
class HusimiGrid:
    """Coherent-state overlap map on a square grid clipped to the disk."""

    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # shape (len(p_axis), len(q_axis)), NaN outside the disk


def husimi(
    state: np.ndarray,
    rep: AngularMomentumRep,
    n_grid: int = 256,
    chunk: int = 2048,
) -> HusimiGrid:
    """|<alpha(Q, P)|state>|^2 over the phase-space disk.

    Rows are evaluated in chunks so the coherent-state matrix never holds
    more than chunk * dim complex entries at once.
    """
    if state.shape != (rep.dim,):
        raise ValueError(f"state shape {state.shape} does not match dim {rep.dim}")
    axis = np.linspace(-2.0, 2.0, n_grid)
    qq, pp = np.meshgrid(axis, axis)
    r_sq = qq**2 + pp**2
    inside = r_sq < DISK_RADIUS_SQ
    values = np.full(qq.shape, np.nan)

    q_flat = qq[inside]
    p_flat = pp[inside]
    out = np.empty(q_flat.shape)

    two_j = rep.dim - 1
    n = np.arange(rep.dim)
    log_binom = 0.5 * (
        gammaln(two_j + 1.0) - gammaln(n + 1.0) - gammaln(two_j - n + 1.0)
    )
    for start in range(0, len(q_flat), chunk):
        block = slice(start, min(start + chunk, len(q_flat)))
        qb = q_flat[block]
        pb = p_flat[block]
        alpha = (qb - 1j * pb) / np.sqrt(DISK_RADIUS_SQ - (qb**2 + pb**2))
        abs_a = np.abs(alpha)
        # columns: coherent amplitudes per point; alpha = 0 handled by the limit
        with np.errstate(divide="ignore", invalid="ignore"):
            log_mag = (
                log_binom[None, :]
                + n[None, :] * np.log(np.where(abs_a > 0, abs_a, 1.0))[:, None]
                - 0.5 * two_j * np.log1p(abs_a**2)[:, None]
            )
        log_mag[abs_a == 0, 1:] = -np.inf
        log_mag[abs_a == 0, 0] = 0.0
        phases = n[None, :] * np.angle(alpha)[:, None]
        amps = np.exp(log_mag + 1j * phases)
        amps /= np.linalg.norm(amps, axis=1, keepdims=True)
        out[block] = np.abs(amps.conj() @ state) ** 2
    values[inside] = out
    return HusimiGrid(q_axis=axis, p_axis=axis, values=values)
