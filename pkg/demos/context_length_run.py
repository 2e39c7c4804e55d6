"""One system, several context caps: how loss and regret react to L = T^q.

Run: python3 demos/context_length_run.py
"""

import numpy as np

from specfilt import (
    asymmetric_regret,
    build_filter_bank,
    build_predictor_spec,
    final_window_mean,
    gen_inputs,
    make_random_system,
    region_a,
    run_online,
    sample_region,
    simulate,
    solve_comparator,
)

T, d_hidden, k = 2048, 64, 24

eig = sample_region(region_a(T), d_hidden, seed=10)
system = make_random_system(d_hidden, 8, 8, eig, seed=11)
inputs = gen_inputs("unit-sphere", 8, T, seed=12)
outputs = simulate(system, inputs)
print(f"system: {d_hidden} modes in [{eig.min():.6f}, {eig.max():.6f}], T={T}")

bank = build_filter_bank(T, k)
comp = None
print(f"{'q':>6} {'L':>6} {'final-window loss':>18} {'regret':>10}")
for q in (0.5, 0.75, 0.875, 1.0):
    L = max(1, min(T, round(T**q)))
    spec = build_predictor_spec("vanilla", T, L, k, eta0=0.5, bank=bank)
    record = run_online(spec, inputs, outputs)
    if comp is None:  # the comparator always sees full context; solve once
        comp = solve_comparator(spec, inputs, outputs)
    report = asymmetric_regret(record, comp)
    fw = final_window_mean(record.losses, max(1, T // 100))
    print(f"{q:>6g} {L:>6} {fw:>18.3e} {report.regret:>10.3f}")

print(f"comparator loss at full context: {comp.total_loss:.3e}")
