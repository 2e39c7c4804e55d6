"""The loss dichotomy grids: vanilla vs two-ar on the hard eigenvalue band.

Writes three sweep directories (reusable by the plotting frontend) and
prints the smoothed final-window loss per grid cell.

Run: python3 demos/dichotomy_sweep.py [out_root]
"""

import sys

from specfilt import ExperimentConfig, run_sweep

out_root = sys.argv[1] if len(sys.argv) > 1 else "demo-sweeps"

# Smaller than the acceptance-gate grids so the demo stays under a minute.
common = dict(T=1024, d_hidden=64, seeds=(0, 1, 2), eta0=0.5)
grids = {
    "a-vanilla": ExperimentConfig(
        variant="vanilla", region="a", q_grid=(0.5, 0.875, 1.0), **common
    ),
    "b-vanilla": ExperimentConfig(
        variant="vanilla", region="b", q_grid=(0.5,), **common
    ),
    "b-two-ar": ExperimentConfig(
        variant="two-ar", region="b", q_grid=(0.5,), **common
    ),
}

for name, config in grids.items():
    out_dir = f"{out_root}/{name}"
    result = run_sweep(config, out_dir)
    status = "ok" if result.ok else f"{len(result.failures)} failures"
    print(f"{name}: {status}, wall {result.wall_time_s:.1f}s -> {out_dir}")
    for cell in result.cells:
        print(
            f"  q={cell.q:<6g} seed={cell.seed} L={cell.L:<5} "
            f"final-window={cell.final_window_mean:.3e} "
            f"regret={cell.regret:.3f}"
        )
