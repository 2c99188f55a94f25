"""Classical limit on the phase-space disk Q^2 + P^2 <= 4.

Scaled energy functions h0 and k, the orbit-period quadrature, the kicked
stroboscopic map, and Poincare-section generation.  The (phi, z_c) chart of
the cylinder is provided as a conversion; all dynamics run in (Q, P).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

TWO_PI = 2.0 * np.pi

# pinned by the 1e-8 energy-drift budget over 1e4 periods: the drift grows
# linearly with integration time at roughly rtol per 1e4 tau
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
BOUNDARY_MARGIN = 1e-8
DISK_VIOLATION_TOL = 1e-9


class SingularOrbitError(ValueError):
    """Period integrand hits a root: separatrix-adjacent energy."""


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float

    def __post_init__(self) -> None:
        r2 = self.q**2 + self.p**2
        if r2 > 4.0 + DISK_VIOLATION_TOL:
            raise ValueError(f"point outside the disk: Q^2+P^2 = {r2:.12f} > 4")

    @property
    def radius_sq(self) -> float:
        return self.q**2 + self.p**2


@dataclass
class ClassicalOrbitRecord:
    """Strobe points of one orbit under the kicked map."""

    initial: PhasePoint
    strobe_points: np.ndarray  # shape (n_recorded, 2)
    energies: np.ndarray  # h0 at each strobe
    status: str = "ok"  # "ok" | "boundary" | "integrator-failure"

    @property
    def n_completed(self) -> int:
        return self.strobe_points.shape[0]


def h0_classical(point: PhasePoint, gamma_x: float, gamma_y: float) -> float:
    """Scaled unperturbed energy h0(Q, P) = lim <H0>/J."""
    q, p = point.q, point.p
    r2 = q * q + p * p
    return r2 / 2.0 - 1.0 + (1.0 - r2 / 4.0) * (gamma_x * q * q + gamma_y * p * p) / 2.0


def kick_classical(point: PhasePoint) -> float:
    """Scaled kick energy k(Q, P) = lim <K>/J."""
    q, p = point.q, point.p
    r2 = q * q + p * p
    return r2 / 2.0 - 1.0 + q * np.sqrt(1.0 - r2 / 4.0)


def h0_on_grid(q: np.ndarray, p: np.ndarray, gamma_x: float, gamma_y: float) -> np.ndarray:
    """Vectorized h0 for contour maps and Husimi band checks."""
    r2 = q * q + p * p
    return r2 / 2.0 - 1.0 + (1.0 - r2 / 4.0) * (gamma_x * q * q + gamma_y * p * p) / 2.0


def chart_to_qp(phi: float, z_c: float) -> PhasePoint:
    """(phi, z_c) cylinder chart -> canonical (Q, P)."""
    if not -1.0 <= z_c <= 1.0:
        raise ValueError(f"z_c must lie in [-1, 1], got {z_c}")
    radius = np.sqrt(2.0 * (1.0 + z_c))
    return PhasePoint(radius * np.cos(phi), -radius * np.sin(phi))


def qp_to_chart(point: PhasePoint) -> tuple[float, float]:
    """Canonical (Q, P) -> (phi, z_c), phi in [0, 2pi)."""
    z_c = point.radius_sq / 2.0 - 1.0
    phi = float(np.mod(np.arctan2(-point.p, point.q), TWO_PI))
    return phi, z_c


def classical_period(energy: float, gamma_x: float, gamma_y: float) -> float:
    """Orbit period T(energy) by adaptive quadrature.

    T = integral_0^{2pi} dphi / sqrt(1 - 2*energy*A + A^2) with
    A(phi) = gx cos^2 phi + gy sin^2 phi.  A has period pi and is symmetric
    about pi/2, so one quarter of the range is integrated and scaled by 4.
    """
    if abs(gamma_x) > 1.0 or abs(gamma_y) > 1.0:
        raise ValueError("couplings must satisfy |gamma| <= 1")
    if not -1.0 <= energy <= 1.0:
        raise ValueError(f"energy {energy} outside the orbit-supporting range [-1, 1]")

    # integrand root check: the radicand, quadratic in A, is minimal either
    # at an endpoint of A's range or at A = energy
    a_lo, a_hi = min(gamma_x, gamma_y), max(gamma_x, gamma_y)
    candidates = [a_lo, a_hi]
    if a_lo < energy < a_hi:
        candidates.append(energy)
    radicand_min = min(1.0 - 2.0 * energy * a + a * a for a in candidates)
    if radicand_min <= 0.0:
        raise SingularOrbitError(
            f"period integrand vanishes at energy {energy} "
            f"(separatrix-adjacent orbit)"
        )

    def integrand(phi: float) -> float:
        a = gamma_x * np.cos(phi) ** 2 + gamma_y * np.sin(phi) ** 2
        return 1.0 / np.sqrt(1.0 - 2.0 * energy * a + a * a)

    quarter, _ = quad(integrand, 0.0, np.pi / 2.0, epsabs=2.5e-11, epsrel=1e-12)
    return 4.0 * quarter


def classical_resonant_energy(
    m: int, n: int, tau: float, gamma_x: float, gamma_y: float
) -> float:
    """Energy E/J where n classical periods match m kick periods.

    Solves T(energy) = m*tau/n by bracketing on a fine energy grid; raises
    if the resonant period is never attained.
    """
    target = m * tau / n

    def objective(energy: float) -> float:
        return classical_period(energy, gamma_x, gamma_y) - target

    grid = np.linspace(-1.0 + 1e-9, 1.0 - 1e-9, 201)
    values = [objective(e) for e in grid]
    for lo, hi, f_lo, f_hi in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if f_lo == 0.0:
            return float(lo)
        if f_lo * f_hi < 0.0:
            return float(brentq(objective, lo, hi, xtol=1e-13))
    raise ValueError(f"no orbit with period {target} (label {m}:{n}, tau={tau})")


def _free_rhs(gamma_x: float, gamma_y: float):
    def rhs(_t: float, y: np.ndarray):
        q, p = y
        r2 = q * q + p * p
        shared = 1.0 - (gamma_x * q * q + gamma_y * p * p) / 4.0
        shell = 1.0 - r2 / 4.0
        return (p * (shared + shell * gamma_y), -q * (shared + shell * gamma_x))

    return rhs


def _kick_rhs(_t: float, y: np.ndarray):
    q, p = y
    r2 = q * q + p * p
    s = np.sqrt(1.0 - r2 / 4.0)
    dk_dq = q + s - q * q / (4.0 * s)
    dk_dp = p * (1.0 - q / (4.0 * s))
    return (dk_dp, -dk_dq)


def _integrate(rhs, y: np.ndarray, t_final: float) -> np.ndarray:
    sol = solve_ivp(
        rhs,
        (0.0, t_final),
        y,
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=False,
    )
    if not sol.success:
        raise RuntimeError(f"integrator failed: {sol.message}")
    return sol.y[:, -1]


def free_flow(point: PhasePoint, gamma_x: float, gamma_y: float, t: float) -> PhasePoint:
    """Hamiltonian flow of h0 for time t (t may be negative)."""
    y = _integrate(_free_rhs(gamma_x, gamma_y), np.array([point.q, point.p]), t)
    return PhasePoint(float(y[0]), float(y[1]))


def kick_flow(point: PhasePoint, epsilon: float) -> PhasePoint:
    """Hamiltonian flow of k for fictitious time epsilon (the delta kick)."""
    if epsilon == 0.0:
        return point
    y = _integrate(_kick_rhs, np.array([point.q, point.p]), epsilon)
    return PhasePoint(float(y[0]), float(y[1]))


def stroboscopic_map(
    point: PhasePoint, params, n_periods: int
) -> ClassicalOrbitRecord:
    """Iterate the kicked map, recording the state after each full period.

    One period = free flow of h0 for time tau, then the kick realized as the
    exact time-epsilon flow of k.  Orbits that reach the chart-degenerate
    boundary stop early with a diagnostic status.
    """
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    if point.radius_sq > 4.0 - BOUNDARY_MARGIN:
        raise ValueError("seed within 1e-8 of the disk boundary (chart degenerates)")
    gx, gy = params.gamma_x, params.gamma_y

    if params.epsilon == 0.0:
        # no kicks: one conservative integration with strobe sampling
        sol = solve_ivp(
            _free_rhs(gx, gy),
            (0.0, n_periods * params.tau),
            np.array([point.q, point.p]),
            method="DOP853",
            rtol=ODE_RTOL,
            atol=ODE_ATOL,
            t_eval=params.tau * np.arange(1, n_periods + 1),
        )
        if not sol.success:
            return ClassicalOrbitRecord(
                point, np.empty((0, 2)), np.empty(0), status="integrator-failure"
            )
        strobes = sol.y.T.copy()
        energies = h0_on_grid(strobes[:, 0], strobes[:, 1], gx, gy)
        return ClassicalOrbitRecord(point, strobes, energies)

    free = _free_rhs(gx, gy)
    y = np.array([point.q, point.p])
    strobes = np.empty((n_periods, 2))
    status = "ok"
    completed = 0
    for _ in range(n_periods):
        try:
            y = _integrate(free, y, params.tau)
            y = _integrate(_kick_rhs, y, params.epsilon)
        except RuntimeError:
            status = "integrator-failure"
            break
        r2 = y[0] ** 2 + y[1] ** 2
        if r2 > 4.0 + DISK_VIOLATION_TOL or r2 > 4.0 - BOUNDARY_MARGIN:
            status = "boundary"
            break
        strobes[completed] = y
        completed += 1
    strobes = strobes[:completed]
    energies = h0_on_grid(strobes[:, 0], strobes[:, 1], gx, gy)
    return ClassicalOrbitRecord(point, strobes, energies, status=status)


def one_period_map(point: PhasePoint, params) -> PhasePoint:
    """A single application of the stroboscopic map."""
    mid = free_flow(point, params.gamma_x, params.gamma_y, params.tau)
    return kick_flow(mid, params.epsilon)


def map_jacobian(point: PhasePoint, params, step: float = 1e-5) -> float:
    """Jacobian determinant of one composite period by central differences.

    The step balances finite-difference truncation O(step^2) against the
    integrator tolerance O(atol/step); both sit below 1e-8 at the default.
    """
    def mapped(q: float, p: float) -> np.ndarray:
        out = one_period_map(PhasePoint(q, p), params)
        return np.array([out.q, out.p])

    q, p = point.q, point.p
    d_dq = (mapped(q + step, p) - mapped(q - step, p)) / (2.0 * step)
    d_dp = (mapped(q, p + step) - mapped(q, p - step)) / (2.0 * step)
    return float(d_dq[0] * d_dp[1] - d_dq[1] * d_dp[0])


def poincare_section(
    seed_grid: list[PhasePoint], params, n_periods: int
) -> list[ClassicalOrbitRecord]:
    """Run the stroboscopic map for every seed; per-seed failures recorded."""
    records = []
    for seed in seed_grid:
        try:
            records.append(stroboscopic_map(seed, params, n_periods))
        except ValueError:
            records.append(
                ClassicalOrbitRecord(
                    seed, np.empty((0, 2)), np.empty(0), status="boundary"
                )
            )
    return records


def energy_contour_seeds(
    energy: float, gamma_x: float, gamma_y: float, n_seeds: int
) -> list[PhasePoint]:
    """Deterministic seeds on one h0 contour, equally spaced in chart angle.

    On the contour, z_c(phi) solves energy = z + (1 - z^2) A(phi) / 2; the
    quadratic is evaluated in the division-free form stable as A -> 0.
    """
    seeds = []
    for phi in np.linspace(0.0, TWO_PI, n_seeds, endpoint=False):
        a = gamma_x * np.cos(phi) ** 2 + gamma_y * np.sin(phi) ** 2
        radicand = 1.0 - 2.0 * energy * a + a * a
        if radicand <= 0.0:
            raise SingularOrbitError(f"contour undefined at phi={phi:.3f}")
        z_c = (2.0 * energy - a) / (1.0 + np.sqrt(radicand))
        seeds.append(chart_to_qp(phi, z_c))
    return seeds


def strobe_clustering_sigma(strobe_points: np.ndarray) -> float:
    """Angular-clustering significance of strobe points, in uniform-null sigmas.

    The statistic is the circular resultant R of the chart angles scaled by
    sqrt(2n): under angles drawn from the uniform circle its RMS is sqrt(2),
    while an island-chain orbit (angles confined to an arc) gives values
    growing like sqrt(n).
    """
    if strobe_points.shape[0] < 2:
        raise ValueError("need at least two strobe points")
    angles = np.arctan2(-strobe_points[:, 1], strobe_points[:, 0])
    resultant = abs(np.mean(np.exp(1j * angles)))
    return float(resultant * np.sqrt(2.0 * strobe_points.shape[0]))
