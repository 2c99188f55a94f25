"""Perturbative fidelity coefficients checked against exact diagonalization.

The split form exp(-i tau H0) exp(-i eps K) admits a unitary perturbation
series whose quadratic coefficient a2 controls 1 - F_max at small kick
strength, with small denominators sin(tau dE / 2) doing the bookkeeping.
This demo verifies a2 against the exact complement at machine-small eps,
shows the cubic residual above it, and evaluates the degenerate two-level
version that predicts the exact-resonance decay.
"""

import numpy as np

from kickedspin import (
    FloquetBuilder,
    ModelParams,
    ResonanceLabel,
    a2_coefficient,
    a3_coefficient,
    build_h0,
    build_kick,
    degenerate_block,
    diagonalize,
    diagonalize_unitary,
    er_fidelity_curve,
    fidelity_complement,
    find_nr_state,
    kick_in_eigenbasis,
    select_state,
)
from kickedspin.classical import classical_period

J, TAU = 30.0, 8.0
GAMMA_X, GAMMA_Y = -0.95, 0.0

params = ModelParams(j=J, gamma_x=GAMMA_X, gamma_y=GAMMA_Y, tau=TAU)
h0_spec = diagonalize(build_h0(params))
kick_spec = diagonalize(build_kick(params))
kick_eig = kick_in_eigenbasis(build_kick(params), h0_spec)

sel = find_nr_state(h0_spec, -0.85, TAU, lambda e: classical_period(e, GAMMA_X, GAMMA_Y))
a2 = a2_coefficient(h0_spec.energies, kick_eig, TAU, sel.k)
a3 = a3_coefficient(h0_spec.energies, kick_eig, TAU, sel.k)
print(f"J = {J:.0f}, non-resonant level k = {sel.k}: a2 = {a2:.6f}, a3 = {a3:.6f}")

builder = FloquetBuilder(h0_spec, kick_spec)
eps_probe = 1e-6
eig = diagonalize_unitary(builder.in_h0_basis(TAU, eps_probe))
i_star = int(np.argmax(np.abs(eig.states[sel.k]) ** 2))
comp = fidelity_complement(eig.states[:, i_star], sel.k)
print(f"exact (1 - F)/eps^2 at eps = {eps_probe:.0e}: {comp / eps_probe**2:.6f}  (a2 above)")

print("\ncubic residual (1 - F - a2 eps^2) / eps^3:")
for eps in np.geomspace(3e-4, 3e-3, 4):
    eig = diagonalize_unitary(builder.in_h0_basis(TAU, eps))
    i_star = int(np.argmax(np.abs(eig.states[sel.k]) ** 2))
    comp = fidelity_complement(eig.states[:, i_star], sel.k)
    print(f"  eps = {eps:.2e}  residual/eps^3 = {(comp - a2 * eps**2) / eps**3:+.4f}")

# degenerate branch: tune tau onto the 1:1 resonance and predict the decay
er_sel = select_state(h0_spec, "ER", TAU, label=ResonanceLabel(1, 1))
deg = degenerate_block(h0_spec.energies, kick_eig, er_sel.tau_used, er_sel.k, 1)
eps_grid = np.array([1e-4, 3e-4, 1e-3])
pred = er_fidelity_curve(deg.a2_er, deg.c_k1_sq, eps_grid)
print(
    f"\nexact resonance at tau = {er_sel.tau_used:.6f}: "
    f"|c_k1|^2 = {deg.c_k1_sq:.4f}, a2_er = {deg.a2_er:.4f}"
)
print("predicted pair-member weight:", ", ".join(f"{p:.4f}" for p in pred))
