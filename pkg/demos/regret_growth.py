"""Regret growth with the horizon: doubling T should not double regret.

Run: python3 demos/regret_growth.py
"""

import math

import numpy as np

from specfilt import (
    asymmetric_regret,
    build_filter_bank,
    build_predictor_spec,
    gen_inputs,
    make_random_system,
    ogd_regret_bound,
    region_a,
    run_online,
    sample_region,
    simulate,
    solve_comparator,
)

k, seeds = 24, (0, 1, 2)

print(f"{'T':>6} {'mean regret':>12} {'regret/sqrt(T)lnT':>18} {'bound':>12}")
prev = None
for T in (256, 512, 1024, 2048):
    bank = build_filter_bank(T, k)
    L = round(T**0.875)
    total = 0.0
    for seed in seeds:
        ss = np.random.SeedSequence(seed).generate_state(3)
        eig = sample_region(region_a(T), 64, seed=int(ss[0]))
        system = make_random_system(64, 8, 8, eig, seed=int(ss[1]))
        inputs = gen_inputs("unit-sphere", 8, T, seed=int(ss[2]))
        outputs = simulate(system, inputs)
        spec = build_predictor_spec("vanilla", T, L, k, eta0=0.5, bank=bank)
        report = asymmetric_regret(
            run_online(spec, inputs, outputs),
            solve_comparator(spec, inputs, outputs),
        )
        total += report.regret
    mean = total / len(seeds)
    norm = mean / (math.sqrt(T) * math.log(T))
    note = "" if prev is None else f"  ({mean / prev:.2f}x at 2x steps)"
    print(
        f"{T:>6} {mean:>12.3f} {norm:>18.4f} "
        f"{ogd_regret_bound(k, 1.0, T):>12.0f}{note}"
    )
    prev = mean
