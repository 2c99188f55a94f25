"""Spreading measures, coherent states, Husimi maps, and the threshold solver."""

import numpy as np
import pytest

from kickedspin import (
    AngularMomentumRep,
    EpsMaxSolverConfig,
    ModelParams,
    ResonanceLabel,
    StateSelection,
    angular_momentum_matrices,
    build_h0,
    build_kick,
    coherent_state,
    diagonalize,
    epsilon_max,
    fidelity_complement,
    fidelity_curve,
    husimi,
    max_fidelity,
    participation_ratio,
    tune_tau_er,
)
from kickedspin.floquet import solve_count

GAMMA_X = -0.95
TAU = 8.0


def small_spectra(j=20.0):
    params = ModelParams(j=j, gamma_x=GAMMA_X, gamma_y=0.0, tau=TAU)
    return diagonalize(build_h0(params)), diagonalize(build_kick(params))


def nr_like_selection(j=20.0, k=10, tau=TAU):
    return StateSelection(
        j=j,
        k=k,
        label=ResonanceLabel(1, 1),
        condition="NR",
        tau_used=tau,
        mismatch=0.0,
        energy_over_j=0.0,
    )


# ---------------------------------------------------------------- measures


def test_participation_ratio_limits():
    e2 = np.zeros(7, dtype=complex)
    e2[2] = 1.0
    assert participation_ratio(e2) == pytest.approx(1.0)
    uniform = np.full(16, 0.25, dtype=complex)
    assert participation_ratio(uniform) == pytest.approx(16.0)
    pair = np.zeros(5, dtype=complex)
    pair[1] = pair[3] = np.sqrt(0.5)
    assert participation_ratio(pair) == pytest.approx(2.0)


def test_participation_ratio_requires_normalization():
    with pytest.raises(ValueError, match="not normalized"):
        participation_ratio(np.array([1.0, 1.0]))


def test_max_fidelity_argmax_and_tie():
    amps = np.sqrt(np.array([0.1, 0.6, 0.3]))
    n, f = max_fidelity(amps)
    assert n == 1
    assert f == pytest.approx(0.6)
    tie = np.sqrt(np.array([0.5, 0.0, 0.5, 0.0]))
    assert max_fidelity(tie)[0] == 0


def test_fidelity_complement_matches_direct_sum():
    weights = np.array([0.6, 0.3, 0.1])
    amps = np.sqrt(weights)
    assert fidelity_complement(amps, 0) == pytest.approx(0.4, rel=1e-12)


def test_fidelity_complement_keeps_precision_near_one():
    small = np.array([2e-10, 1e-10])
    weights = np.concatenate([[1.0 - small.sum()], small])
    amps = np.sqrt(weights).astype(complex)
    assert fidelity_complement(amps, 0) == pytest.approx(3e-10, rel=1e-4)


# ---------------------------------------------------------- coherent states


def test_coherent_state_poles():
    rep = AngularMomentumRep(j=10.0, dim=21)
    south = coherent_state(rep, 0.0, 0.0)
    assert south[0] == 1.0 and np.all(south[1:] == 0)
    north = coherent_state(rep, 2.0, 0.0)
    assert north[-1] == 1.0 and np.all(north[:-1] == 0)
    with pytest.raises(ValueError, match="disk"):
        coherent_state(rep, 2.1, 0.0)


@pytest.mark.parametrize("q,p", [(0.7, -0.4), (1.2, 0.9), (-0.3, 1.5), (0.0, 1.0)])
def test_coherent_state_bloch_expectations(q, p):
    # the planar chart fixes <Jz> = j(r^2/2 - 1), <Jx> = jQ s, <Jy> = jP s
    # with s = sqrt(1 - r^2/4); these follow from alpha = (Q - iP)/sqrt(4 - r^2)
    # acting through exp(alpha J+) on the lowest-weight state
    j = 12.0
    rep = AngularMomentumRep(j=j, dim=25)
    state = coherent_state(rep, q, p)
    jx, jy, jz = (op.matrix for op in angular_momentum_matrices(j))
    r_sq = q * q + p * p
    s = np.sqrt(1.0 - r_sq / 4.0)
    assert np.vdot(state, jz @ state).real == pytest.approx(j * (r_sq / 2 - 1), abs=1e-10)
    assert np.vdot(state, jx @ state).real == pytest.approx(j * q * s, abs=1e-10)
    assert np.vdot(state, jy @ state).real == pytest.approx(j * p * s, abs=1e-10)


def test_coherent_state_overlap_formula():
    # |<alpha|beta>|^2 = [(1+2Re(conj(a)b)+|a|^2|b|^2+...)]: use the closed form
    # |<a|b>|^2 = ((1 + conj(a) b)(1 + a conj(b)) / ((1+|a|^2)(1+|b|^2)))^(2j)
    j = 15.0
    rep = AngularMomentumRep(j=j, dim=31)

    def alpha(q, p):
        return (q - 1j * p) / np.sqrt(4.0 - q * q - p * p)

    za, zb = (0.5, -0.8), (1.1, 0.4)
    a, b = alpha(*za), alpha(*zb)
    expected = (
        (1 + np.conj(a) * b) * (1 + a * np.conj(b)) / ((1 + abs(a) ** 2) * (1 + abs(b) ** 2))
    ) ** (2 * j)
    got = abs(np.vdot(coherent_state(rep, *za), coherent_state(rep, *zb))) ** 2
    assert got == pytest.approx(expected.real, rel=1e-10)


def test_coherent_state_large_j_stays_finite():
    rep = AngularMomentumRep(j=400.0, dim=801)
    state = coherent_state(rep, 1.9, 0.0)
    assert np.all(np.isfinite(state))
    assert np.linalg.norm(state) == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------------ husimi


def test_husimi_peaks_at_coherent_center():
    rep = AngularMomentumRep(j=20.0, dim=41)
    state = coherent_state(rep, 0.8, -0.6)
    grid = husimi(state, rep, n_grid=41)
    finite = np.nan_to_num(grid.values, nan=-1.0)
    i, k = np.unravel_index(np.argmax(finite), finite.shape)
    assert grid.q_axis[k] == pytest.approx(0.8)
    assert grid.p_axis[i] == pytest.approx(-0.6)
    inside = ~np.isnan(grid.values)
    assert np.all(grid.values[inside] >= 0)
    assert np.all(grid.values[inside] <= 1 + 1e-12)
    # corners sit outside the disk
    assert np.isnan(grid.values[0, 0])


def test_husimi_matches_direct_overlap():
    rep = AngularMomentumRep(j=8.0, dim=17)
    rng = np.random.default_rng(11)
    state = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    state /= np.linalg.norm(state)
    grid = husimi(state, rep, n_grid=21)
    for i, k in [(10, 10), (7, 13), (14, 5)]:
        q, p = grid.q_axis[k], grid.p_axis[i]
        direct = abs(np.vdot(coherent_state(rep, q, p), state)) ** 2
        assert grid.values[i, k] == pytest.approx(direct, rel=1e-10)
    # center of the disk exercises the alpha = 0 limit
    assert not np.isnan(grid.values[10, 10])


def test_husimi_chunking_is_invisible():
    rep = AngularMomentumRep(j=5.0, dim=11)
    state = coherent_state(rep, -0.5, 0.3)
    small = husimi(state, rep, n_grid=17, chunk=7)
    big = husimi(state, rep, n_grid=17, chunk=10**6)
    np.testing.assert_array_equal(small.values, big.values)


def test_husimi_shape_guard():
    rep = AngularMomentumRep(j=5.0, dim=11)
    with pytest.raises(ValueError, match="shape"):
        husimi(np.zeros(10, dtype=complex), rep)


# ------------------------------------------------------------- epsilon_max


def test_epsilon_max_converges_on_small_model():
    h0_spec, kick_spec = small_spectra()
    sel = nr_like_selection()
    before = solve_count()
    res = epsilon_max(h0_spec, kick_spec, sel)
    assert res.status == "converged"
    assert res.j == 20.0 and res.k == 10
    assert abs(res.f_at_eps_max - 0.5) <= 1e-4
    lo, hi = res.bracket
    assert lo <= res.eps_max <= hi
    assert (hi - lo) <= 2e-7 * hi
    # the scan stops at the first sub-1/2 grid point
    assert np.all(res.scan_f[:-1] >= 0.5)
    assert res.scan_f[-1] < 0.5
    assert res.scan_eps[-2] <= res.eps_max <= res.scan_eps[-1]
    assert res.n_floquet_solves == solve_count() - before


def test_epsilon_max_agrees_with_fidelity_curve():
    # follow the branch along an ascending grid ending at the threshold; a
    # single-point jump cannot disambiguate the 50/50 mixture right at the
    # crossing, which is what the ascending-order contract is for
    h0_spec, kick_spec = small_spectra()
    sel = nr_like_selection()
    res = epsilon_max(h0_spec, kick_spec, sel)
    eps = np.linspace(res.eps_max / 4, res.eps_max, 8)
    f = fidelity_curve(h0_spec, kick_spec, sel, eps)
    assert abs(f[-1] - 0.5) <= 2e-4


def test_epsilon_max_reports_no_crossing():
    h0_spec, kick_spec = small_spectra()
    sel = nr_like_selection()
    config = EpsMaxSolverConfig(n_geom=6, eps_ceiling_scale=1e-4)
    res = epsilon_max(h0_spec, kick_spec, sel, config=config)
    assert res.status == "no_crossing"
    assert np.isnan(res.eps_max)
    assert res.bracket[1] == np.inf
    assert len(res.scan_eps) == 6


def test_epsilon_max_budget_guard():
    h0_spec, kick_spec = small_spectra()
    sel = nr_like_selection()
    config = EpsMaxSolverConfig(max_solves=3)
    with pytest.raises(RuntimeError, match="budget"):
        epsilon_max(h0_spec, kick_spec, sel, config=config)


def test_epsilon_max_rejects_unknown_condition():
    h0_spec, kick_spec = small_spectra()
    sel = StateSelection(
        j=20.0,
        k=10,
        label=ResonanceLabel(1, 1),
        condition="XX",
        tau_used=TAU,
        mismatch=0.0,
        energy_over_j=0.0,
    )
    with pytest.raises(ValueError, match="condition"):
        epsilon_max(h0_spec, kick_spec, sel)


def test_epsilon_max_exact_resonance_branch():
    # ER seeding starts from the kick-selected member of the degenerate pair
    h0_spec, kick_spec = small_spectra()
    sel = tune_tau_er(h0_spec, ResonanceLabel(1, 1), TAU)
    assert sel.condition == "ER"
    res = epsilon_max(h0_spec, kick_spec, sel)
    assert res.status == "converged"
    assert abs(res.f_at_eps_max - 0.5) <= 1e-4
    assert res.eps_max > 0


def test_fidelity_curve_order_and_guards():
    h0_spec, kick_spec = small_spectra()
    sel = nr_like_selection()
    eps = np.array([3e-3, 1e-3, 2e-3])
    f = fidelity_curve(h0_spec, kick_spec, sel, eps)
    f_sorted = fidelity_curve(h0_spec, kick_spec, sel, np.sort(eps))
    assert f[1] == f_sorted[0] and f[2] == f_sorted[1] and f[0] == f_sorted[2]
    # below threshold the anchored weight decays monotonically with the kick
    assert np.all(np.diff(f_sorted) < 0)
    assert np.all(f > 0.5)
    with pytest.raises(ValueError, match="positive"):
        fidelity_curve(h0_spec, kick_spec, sel, np.array([0.0, 1e-3]))
