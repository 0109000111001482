#!/usr/bin/env python3
"""Excitation dynamics at a clean/disordered interface.

A symmetric Dicke state is launched in the disordered half of a chirally
coupled chain. Under weak disorder the excitation sloshes between the two
halves and drains out of the chain; under strong disorder it stays pinned in
the disordered zone, with a thin tail leaking into the clean zone near the
interface. This script prints the imbalance / right-half population /
half-chain entropy at a few probe times and the interface excitation profile
at the final time.

Run:  python demos/01_interface_dynamics.py
"""

import numpy as np

from chiralchain import (
    EnsembleSpec,
    SystemConfig,
    interface_profile,
    log_time_grid,
    run_ensemble,
)

N = 60
GRID = log_time_grid(1e-2, 1e4, 120)
PROBES = (1.0, 1e2, 1e4)

print(f"chain: N = {N}, half clean / half disordered, xi = pi/4, D = 0.2")
print(f"{'w':>5} | " + " | ".join(f"imb@{t:g}  pop@{t:g}  S@{t:g}" for t in PROBES))

profiles = {}
for w in (0.0, 0.1, 0.5):
    config = SystemConfig(N, N // 2, N // 2, xi=0.25 * np.pi,
                          directionality=0.2, disorder_strength=w)
    spec = EnsembleSpec(config, n_realizations=1 if w == 0.0 else 100,
                        master_seed=7, grid=GRID,
                        observables=("imbalance", "right_population", "entropy"),
                        profile_time=1e4)
    result = run_ensemble(spec, workers=2)
    cells = []
    for t in PROBES:
        k = GRID.index_of(t)
        cells.append(
            f"{result.series['imbalance'].values[k]:+.3f}  "
            f"{result.series['right_population'].values[k]:.3f}  "
            f"{result.series['entropy'].values[k]:.3f}"
        )
    print(f"{w:5.2f} | " + " | ".join(cells))
    profiles[w] = result.site_profile

print("\ninterface profile at gamma t = 1e4 (population per 6-site block):")
for w, profile in profiles.items():
    config = SystemConfig(N, N // 2, N // 2, xi=0.25 * np.pi,
                          directionality=0.2, disorder_strength=w)
    wrapped, width = interface_profile(profile, config, 1e4)
    blocks = " ".join(f"{profile[i:i + 6].sum():.3f}" for i in range(0, N, 6))
    print(f"  w = {w:<4} blocks: {blocks}   clean-side 1/e width: {width:g} sites")

print("\nstronger disorder pins the excitation against the interface; the")
print("disorder-free chain spreads it across the whole array before it decays.")
