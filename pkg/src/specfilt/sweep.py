"""Batch experiment driver.

A sweep fixes one system family (eigenvalue region, hidden size, variant)
and runs the online learner over a grid of context exponents q and seeds,
with the context length set to L = round(T^q).  Each seed draws its own
eigenvalues, system matrices and input sequence from independent child
seeds, and the best fixed comparator is solved once per seed at full
context, so every cell on the q grid is scored against the same target.

Output directory layout::

    runs/q<q>_seed<s>.csv    per-cell loss curve (run.csv schema)
    runs/q<q>_seed<s>.json   per-cell metadata
    aggregate_q<q>.csv       step, mean_loss, smoothed_loss over seeds
    regret.csv               q, seed, learner_loss, comparator_loss, regret
    manifest.json            resolved config, conditioning, failures, stats
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .filters import FilterBank
from .learner import TENSOR, TWO_AR, VANILLA, build_predictor_spec, run_online
from .lds import (
    EigRegion,
    conditioning_check,
    conditioning_threshold,
    explicit_interval,
    gen_inputs,
    make_random_system,
    region_a,
    region_b,
    sample_region,
    simulate,
)
from .regret import asymmetric_regret, solve_comparator

_VARIANTS = (VANILLA, TWO_AR, TENSOR)
_INPUT_KINDS = ("unit-sphere", "rademacher-scaled", "constant")


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a q grid by seed grid over a fixed system family."""

    variant: str = VANILLA
    T: int = 4096
    k: int = 24
    d_hidden: int = 64
    d_in: int = 8
    d_out: int = 8
    region: str = "a"
    q_grid: tuple = (0.5, 0.625, 0.75, 0.875, 1.0)
    seeds: tuple = (0, 1, 2)
    r: float = 1.0
    eta0: float | None = None
    input_kind: str = "unit-sphere"
    d_kind: str = "zero"
    smoothing_window: int | None = None
    tol_eig: float = 1e-10
    tol_opt: float | None = None

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.input_kind not in _INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.input_kind!r}")
        if not self.q_grid:
            raise ValueError("q_grid must be non-empty")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        for q in self.q_grid:
            if not 0.0 <= q <= 1.0:
                raise ValueError(f"q must lie in [0, 1], got {q}")
        object.__setattr__(self, "q_grid", tuple(float(q) for q in self.q_grid))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        self.resolve_region()  # validate the region string eagerly

    def resolve_region(self) -> EigRegion:
        if self.region == "a":
            return region_a(self.T)
        if self.region == "b":
            return region_b(self.T)
        if self.region.startswith("interval:"):
            parts = self.region[len("interval:"):].split(",")
            if len(parts) != 2:
                raise ValueError(f"bad interval region {self.region!r}")
            return explicit_interval(float(parts[0]), float(parts[1]))
        raise ValueError(f"unknown region {self.region!r}")

    def context_length(self, q: float) -> int:
        return max(1, min(self.T, round(self.T**q)))

    def resolved_smoothing_window(self) -> int:
        if self.smoothing_window is not None:
            return max(1, int(self.smoothing_window))
        return max(1, self.T // 100)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["q_grid"] = list(self.q_grid)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


# Step-size scale used by the named presets.  The formula default is far
# too conservative for the desk-scale dichotomy runs; this value was tuned
# on in-region instances and is recorded per run in the manifest.
PRESET_ETA0 = 0.5

PRESETS = {
    # Hug-band systems, vanilla learner across the q grid: loss should
    # collapse once q reaches 7/8 and stay high at q = 1/2.
    "desk-a-vanilla": ExperimentConfig(
        variant=VANILLA, region="a", q_grid=(0.5, 0.625, 0.75, 0.875, 1.0),
        eta0=PRESET_ETA0,
    ),
    # Bad-band systems at q = 1/2: vanilla stalls ...
    "desk-b-vanilla": ExperimentConfig(
        variant=VANILLA, region="b", q_grid=(0.5,), eta0=PRESET_ETA0,
    ),
    # ... while the double-autoregressive variant tracks them.
    "desk-b-two-ar": ExperimentConfig(
        variant=TWO_AR, region="b", q_grid=(0.5,), eta0=PRESET_ETA0,
    ),
    # Full-size reference configuration; hours of compute, not minutes.
    "paper-scale": ExperimentConfig(
        variant=VANILLA, T=2**14, d_hidden=512, region="a",
        q_grid=(0.5, 0.625, 0.75, 0.875, 1.0), eta0=PRESET_ETA0,
    ),
}


@dataclass(frozen=True)
class CellResult:
    q: float
    seed: int
    status: str
    L: int = 0
    learner_loss: float = math.nan
    comparator_loss: float = math.nan
    regret: float = math.nan
    final_window_mean: float = math.nan
    error: str = ""
    losses: np.ndarray | None = field(default=None, repr=False, compare=False)
    prediction_norms: np.ndarray | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    cells: tuple
    out_dir: str
    wall_time_s: float

    @property
    def ok(self) -> bool:
        return all(c.status == "ok" for c in self.cells)

    @property
    def failures(self) -> tuple:
        return tuple(c for c in self.cells if c.status != "ok")


def _qtag(q: float) -> str:
    return f"{q:g}"


def smooth_curve(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with truncated edges."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(values)))
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, n)
    return (csum[hi] - csum[lo]) / (hi - lo)


def final_window_mean(losses: np.ndarray, window: int) -> float:
    """Mean smoothed loss over the last 5% of steps."""
    smoothed = smooth_curve(losses, window)
    tail = max(1, math.ceil(0.05 * smoothed.shape[0]))
    return float(np.mean(smoothed[-tail:]))


def _child_seeds(seed: int) -> tuple[int, int, int]:
    eig, sys_, inp = np.random.SeedSequence(seed).generate_state(3)
    return int(eig), int(sys_), int(inp)


def run_seed(config: ExperimentConfig, seed: int, bank: FilterBank) -> dict:
    """All q cells for one seed.  Module level so worker pools can pickle it."""
    region = config.resolve_region()
    eig_seed, sys_seed, input_seed = _child_seeds(seed)
    eigenvalues = sample_region(region, config.d_hidden, seed=eig_seed)
    system = make_random_system(
        config.d_hidden, config.d_in, config.d_out, eigenvalues,
        seed=sys_seed, d_kind=config.d_kind,
    )
    inputs = gen_inputs(config.input_kind, config.d_in, config.T, seed=input_seed)
    outputs = simulate(system, inputs)

    threshold = conditioning_threshold(system, config.T)
    lam_min, well_conditioned = conditioning_check(inputs, threshold)

    full_spec = build_predictor_spec(
        config.variant, config.T, config.T, config.k,
        r=config.r, eta0=config.eta0, bank=bank,
    )
    comparator = solve_comparator(
        full_spec, inputs, outputs, tol_opt=config.tol_opt, full_context=True,
    )

    window = config.resolved_smoothing_window()
    cells = []
    for q in config.q_grid:
        L = config.context_length(q)
        try:
            spec = build_predictor_spec(
                config.variant, config.T, L, config.k,
                r=config.r, eta0=config.eta0, bank=bank,
            )
            record = run_online(spec, inputs, outputs)
            report = asymmetric_regret(record, comparator)
            cells.append(
                CellResult(
                    q=q, seed=seed, status="ok", L=L,
                    learner_loss=report.learner_loss,
                    comparator_loss=report.comparator_loss,
                    regret=report.regret,
                    final_window_mean=final_window_mean(record.losses, window),
                    losses=record.losses,
                    prediction_norms=record.prediction_norms,
                )
            )
        except Exception as exc:  # keep the rest of the grid alive
            cells.append(
                CellResult(q=q, seed=seed, status="failed", L=L,
                           error=f"{type(exc).__name__}: {exc}")
            )
    return {
        "seed": seed,
        "cells": cells,
        "conditioning": {
            "lambda_min": lam_min,
            "threshold": threshold,
            "passed": bool(well_conditioned),
        },
        "comparator": {
            "total_loss": comparator.total_loss,
            "iterations": comparator.iterations,
            "fallback": comparator.fallback,
            "constrained": comparator.constrained,
        },
        "data_hash": comparator.data_hash,
        "eta0": full_spec.resolved_eta0(),
        "eigenvalues": {
            "min": float(np.min(eigenvalues)),
            "max": float(np.max(eigenvalues)),
        },
    }


def _write_cell_files(config: ExperimentConfig, seed_report: dict, runs_dir: str) -> None:
    for cell in seed_report["cells"]:
        stem = os.path.join(runs_dir, f"q{_qtag(cell.q)}_seed{cell.seed}")
        meta = {
            "q": cell.q,
            "seed": cell.seed,
            "L": cell.L,
            "status": cell.status,
            "variant": config.variant,
            "T": config.T,
            "k": config.k,
            "r": config.r,
            "eta0": seed_report["eta0"],
            "data_hash": seed_report["data_hash"],
        }
        if cell.status == "ok":
            meta.update(
                learner_loss=cell.learner_loss,
                comparator_loss=cell.comparator_loss,
                regret=cell.regret,
                final_window_mean=cell.final_window_mean,
            )
            with open(stem + ".csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["step", "loss", "cumulative_loss", "prediction_norm"])
                cum = 0.0
                for t, loss in enumerate(cell.losses, start=1):
                    cum += loss
                    pnorm = cell.prediction_norms[t - 1]
                    writer.writerow([t, f"{loss:.17g}", f"{cum:.17g}", f"{pnorm:.17g}"])
        else:
            meta["error"] = cell.error
        with open(stem + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _write_aggregates(config: ExperimentConfig, cells: list, out_dir: str) -> dict:
    window = config.resolved_smoothing_window()
    stats = {}
    for q in config.q_grid:
        curves = [c.losses for c in cells
                  if c.q == q and c.status == "ok" and c.losses is not None]
        if not curves:
            continue
        mean_loss = np.mean(np.stack(curves), axis=0)
        smoothed = smooth_curve(mean_loss, window)
        tail = max(1, math.ceil(0.05 * mean_loss.shape[0]))
        stats[_qtag(q)] = {
            "seeds": len(curves),
            "final_window_mean": float(np.mean(smoothed[-tail:])),
        }
        path = os.path.join(out_dir, f"aggregate_q{_qtag(q)}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "mean_loss", "smoothed_loss"])
            for t in range(mean_loss.shape[0]):
                writer.writerow(
                    [t + 1, f"{mean_loss[t]:.17g}", f"{smoothed[t]:.17g}"]
                )
    return stats


def _write_regret_csv(cells: list, out_dir: str) -> None:
    with open(os.path.join(out_dir, "regret.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "seed", "learner_loss", "comparator_loss", "regret"])
        for c in cells:
            if c.status != "ok":
                continue
            writer.writerow(
                [f"{c.q:g}", c.seed, f"{c.learner_loss:.17g}",
                 f"{c.comparator_loss:.17g}", f"{c.regret:.17g}"]
            )


def run_sweep(config: ExperimentConfig, out_dir: str, jobs: int = 1) -> SweepResult:
    """Execute every (q, seed) cell and write the sweep directory.

    Cells for one seed share a system, its data and its comparator, so the
    unit of parallelism is the seed.  Failures in one cell are recorded in
    the manifest and do not stop the others.
    """
    start = time.perf_counter()
    os.makedirs(out_dir, exist_ok=True)
    runs_dir = os.path.join(out_dir, "runs")
    os.makedirs(runs_dir, exist_ok=True)

    # One eigendecomposition serves every seed.
    probe = build_predictor_spec(
        config.variant, config.T, config.T, config.k,
        r=config.r, tol_eig=config.tol_eig,
    )
    bank = probe.bank

    reports = []
    if jobs > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_seed, config, s, bank) for s in config.seeds]
            reports = [f.result() for f in futures]
    else:
        reports = [run_seed(config, s, bank) for s in config.seeds]

    cells = [c for rep in reports for c in rep["cells"]]
    for rep in reports:
        _write_cell_files(config, rep, runs_dir)
    stats = _write_aggregates(config, cells, out_dir)
    _write_regret_csv(cells, out_dir)

    wall = time.perf_counter() - start
    manifest = {
        "version": __version__,
        "config": config.to_dict(),
        "bank": {
            "kind": bank.kind,
            "T": bank.horizon,
            "count": bank.filters.shape[0],
            "window": bank.filters.shape[1],
        },
        "seeds": {
            str(rep["seed"]): {
                "conditioning": rep["conditioning"],
                "comparator": rep["comparator"],
                "data_hash": rep["data_hash"],
                "eta0": rep["eta0"],
                "eigenvalues": rep["eigenvalues"],
            }
            for rep in reports
        },
        "cells": [
            {
                "q": c.q, "seed": c.seed, "L": c.L, "status": c.status,
                **(
                    {
                        "learner_loss": c.learner_loss,
                        "comparator_loss": c.comparator_loss,
                        "regret": c.regret,
                        "final_window_mean": c.final_window_mean,
                    }
                    if c.status == "ok"
                    else {"error": c.error}
                ),
            }
            for c in cells
        ],
        "aggregates": stats,
        "wall_time_s": wall,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return SweepResult(
        config=config,
        cells=tuple(cells),
        out_dir=out_dir,
        wall_time_s=wall,
    )
