#!/usr/bin/env python3
"""Two attacks that need no detector mismatch at all, only imperfections of
the receiver's linear optics.

1. Phase-modulator deviation: if Bob's modulator systematically overshoots
   by a small angle, Eve overshoots her own phase by twice that, making the
   two hot detectors' energies slightly unequal (0.998 vs 0.983 of a pulse)
   -- enough for a threshold to separate.

2. Wavelength-dependent splitting: at a shifted wavelength Bob's couplers
   split 44:56 and 46:54 instead of 50:50; with a matching polarization
   weight Eve again de-degenerates each hot pair."""

import math

import numpy as np

from ddiqkd import (
    PhaseDeviation,
    ReceiverConfig,
    SessionConfig,
    WavelengthBS,
    enumerate_exact,
    general_port_amplitudes,
    phase_deviation_energies,
    run_session,
    threshold_window,
)
from ddiqkd.receiver import BB84_PHASES

PI = math.pi

print("--- phase-modulator deviation ---")
dev_b, dev_e = PI / 36, PI / 18
e_plus = phase_deviation_energies(1.0, PI / 2 + dev_e, PI / 2 + dev_b)
print(f"matched slot energies with deviations (+5deg receiver, +10deg Eve):")
print(f"  D1={e_plus[0]:.6f}  D2={e_plus[1]:.6f}  D3={e_plus[2]:.6f}  D4={e_plus[3]:.6f}")

table = np.array(
    [
        [phase_deviation_energies(1.0, pe + dev_e, pb + dev_b) for pb in BB84_PHASES]
        for pe in BB84_PHASES
    ]
)
low, high = threshold_window(table, (True,) * 4, True)
print(f"feasible click-threshold window: ({low:.6f}, {high:.6f}] of a pulse")

cfg = SessionConfig(
    n_slots=100_000,
    seed=55,
    receiver=ReceiverConfig(phi_b=dev_b),
    attack=PhaseDeviation(delta_phi_e=dev_e, mu=1.0, mu_th=0.99),
)
print("exact :", enumerate_exact(cfg).to_dict())
print("MC    :", run_session(cfg).to_dict())

print("\n--- wavelength-dependent splitting ---")
t1, t2, gamma = 0.44, 0.46, 0.2
grid = np.linspace(0, 2 * PI, 721)
norm = np.abs(general_port_amplitudes(1.0, grid, gamma, t1, t2, PI / 2)) ** 2
print("normalized energy maxima over the sender phase (receiver phase pi/2):")
for k, det in enumerate(("D1", "D2", "D3", "D4")):
    print(f"  {det}: {norm[k].max():.4f} at phi_E = {grid[norm[k].argmax()]/PI:.2f} pi")

wl_table = np.array(
    [
        [np.abs(general_port_amplitudes(1.0, pe, gamma, t1, t2, pb)) ** 2 for pb in BB84_PHASES]
        for pe in BB84_PHASES
    ]
)
low, high = threshold_window(wl_table, (True,) * 4, True)
print(f"feasible click-threshold window: ({low:.6f}, {high:.6f}] of a pulse")

cfg = SessionConfig(
    n_slots=100_000, seed=56, attack=WavelengthBS(gamma=gamma, t1=t1, t2=t2, mu=1.0, mu_th=0.89)
)
print("exact :", enumerate_exact(cfg).to_dict())
print("MC    :", run_session(cfg).to_dict())
