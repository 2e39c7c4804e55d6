"""Command-line front end.

Subcommands:

* ``filters build``: eigendecompose a Hankel matrix and save the bank.
* ``lds make``: draw a random system with eigenvalues from a named region.
* ``lds simulate``: run a saved system on generated inputs, dump a CSV.
* ``lds region``: print or export band boundaries over a range of T.
* ``run``: one online run against a saved system, saved as a run directory.
* ``regret``: recompute the best fixed comparator for a saved run and
  report the gap.
* ``sweep``: q-by-seed experiment grid from a JSON config or a preset.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .filters import build_filter_bank, build_tensor_bank, save_bank
from .learner import build_predictor_spec, run_online
from .lds import (
    explicit_interval,
    gen_inputs,
    load_system,
    make_random_system,
    region_a,
    region_b,
    region_bounds,
    sample_region,
    save_system,
    simulate,
)
from .records import load_run_dir, save_run_dir
from .regret import asymmetric_regret, solve_comparator
from .sweep import PRESETS, ExperimentConfig, run_sweep

_INPUT_KIND_CHOICES = ("unit-sphere", "rademacher-scaled", "constant")


def _context_length(T: int, q: float) -> int:
    return max(1, min(T, round(T**q)))


def _resolve_region(spec: str, T: int, q: float):
    if spec == "a":
        return region_a(T)
    if spec == "b":
        # b defaults to the q = 7/8 band; --q moves it
        return region_b(T) if q == 0.875 else region_bounds(T, q, "vanilla")
    if spec.startswith("interval:"):
        parts = spec[len("interval:"):].split(",")
        if len(parts) != 2:
            raise ValueError(f"bad region {spec!r}, expected interval:LO,HI")
        return explicit_interval(float(parts[0]), float(parts[1]))
    raise ValueError(f"unknown region {spec!r}")


def _cmd_filters_build(args) -> int:
    if args.kind == "tensor":
        bank = build_tensor_bank(args.T, args.k)
    else:
        bank = build_filter_bank(args.T, args.k, kind=args.kind)
    save_bank(bank, args.out)
    print(
        f"wrote {args.out}: kind={bank.kind} T={bank.horizon} "
        f"filters={bank.num_filters} window={bank.filter_length}"
    )
    return 0


def _cmd_lds_make(args) -> int:
    region = _resolve_region(args.region, args.T, args.q)
    eig_seed, sys_seed = (
        int(s) for s in np.random.SeedSequence(args.seed).generate_state(2)
    )
    eigenvalues = sample_region(region, args.d_hidden, seed=eig_seed)
    system = make_random_system(
        args.d_hidden, args.d_in, args.d_out, eigenvalues,
        seed=sys_seed, d_kind=args.d_kind,
    )
    save_system(system, args.out)
    print(
        f"wrote {args.out}: d_hidden={system.d_hidden} d_in={system.d_in} "
        f"d_out={system.d_out} eigenvalues in "
        f"[{eigenvalues.min():.6g}, {eigenvalues.max():.6g}]"
    )
    return 0


def _cmd_lds_simulate(args) -> int:
    system = load_system(args.system)
    inputs = gen_inputs(args.inputs, system.d_in, args.T, seed=args.seed)
    outputs = simulate(system, inputs)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = (
            ["step"]
            + [f"u{i + 1}" for i in range(system.d_in)]
            + [f"y{i + 1}" for i in range(system.d_out)]
        )
        writer.writerow(header)
        for t in range(args.T):
            row = [t + 1]
            row.extend(f"{v:.17g}" for v in inputs.values[t])
            row.extend(f"{v:.17g}" for v in outputs[t])
            writer.writerow(row)
    print(f"wrote {args.out}: {args.T} steps, d_in={system.d_in} d_out={system.d_out}")
    return 0


def _cmd_lds_region(args) -> int:
    if args.Tmin < 2 or args.Tmax < args.Tmin:
        raise ValueError(f"need 2 <= Tmin <= Tmax, got {args.Tmin}..{args.Tmax}")
    grid = np.unique(
        np.round(
            np.logspace(np.log10(args.Tmin), np.log10(args.Tmax), args.points)
        ).astype(int)
    )
    rows = []
    for q in args.q:
        for T in grid:
            reg = region_bounds(int(T), q, args.variant)
            rows.append((args.variant, q, int(T), reg.left, reg.right, reg.is_empty))
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["variant", "q", "T", "left", "right", "empty"])
            for variant, q, T, left, right, empty in rows:
                writer.writerow(
                    [variant, f"{q:g}", T, f"{left:.17g}", f"{right:.17g}",
                     int(empty)]
                )
        print(f"wrote {args.emit_csv}: {len(rows)} rows")
    else:
        for variant, q, T, left, right, empty in rows:
            tag = " (empty)" if empty else ""
            print(f"{variant} q={q:g} T={T}: ({left:.12g}, {right:.12g}){tag}")
    return 0


def _cmd_run(args) -> int:
    system = load_system(args.system)
    L = _context_length(args.T, args.q)
    spec = build_predictor_spec(
        args.variant, args.T, L, args.k, r=args.r, eta0=args.eta0,
    )
    inputs = gen_inputs(args.inputs, system.d_in, args.T, seed=args.seed)
    outputs = simulate(system, inputs)
    record = run_online(spec, inputs, outputs)
    extra = {
        "q": args.q,
        "seed": args.seed,
        "input_kind": args.inputs,
        "system_path": args.system,
        "system": {
            "d_hidden": system.d_hidden,
            "d_in": system.d_in,
            "d_out": system.d_out,
        },
    }
    save_run_dir(record, args.out, inputs.values, outputs, extra_meta=extra)
    print(
        f"wrote {args.out}: T={args.T} L={L} total_loss={record.total_loss:.6g} "
        f"wall={record.wall_time_s:.3g}s"
    )
    return 0


def _cmd_regret(args) -> int:
    run = load_run_dir(args.run)
    meta = run["meta"]["spec"]
    spec = build_predictor_spec(
        meta["variant"], meta["T"], meta["L"], meta["k"],
        r=meta["r"], eta0=meta["eta0"],
    )
    comparator = solve_comparator(
        spec, run["inputs"], run["outputs"],
        tol_opt=args.tol, full_context=True,
    )
    learner_loss = float(run["cumulative_loss"][-1])
    report = {
        "learner_loss": learner_loss,
        "comparator_loss": comparator.total_loss,
        "regret": learner_loss - comparator.total_loss,
        "regret_over_sqrtT_logT": (learner_loss - comparator.total_loss)
        / (np.sqrt(meta["T"]) * np.log(max(meta["T"], 2))),
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_sweep(args) -> int:
    if args.preset:
        config = PRESETS[args.preset]
    else:
        config = ExperimentConfig.from_json(args.config)
    result = run_sweep(config, args.out, jobs=args.jobs)
    for cell in result.cells:
        if cell.status == "ok":
            print(
                f"q={cell.q:g} seed={cell.seed} L={cell.L}: "
                f"loss={cell.learner_loss:.6g} regret={cell.regret:.6g} "
                f"final_window={cell.final_window_mean:.6g}"
            )
        else:
            print(
                f"q={cell.q:g} seed={cell.seed}: FAILED ({cell.error})",
                file=sys.stderr,
            )
    print(f"wrote {result.out_dir} in {result.wall_time_s:.3g}s")
    return 0 if result.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specfilt",
        description="Spectral-filter sequence prediction toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_filters = sub.add_parser("filters", help="filter bank operations")
    f_sub = p_filters.add_subparsers(dest="subcommand", required=True)
    p_fb = f_sub.add_parser("build", help="build and save a filter bank")
    p_fb.add_argument("--T", type=int, required=True)
    p_fb.add_argument("--k", type=int, required=True)
    p_fb.add_argument("--kind", choices=("h", "n", "tensor"), default="h")
    p_fb.add_argument("--out", required=True)
    p_fb.set_defaults(func=_cmd_filters_build)

    p_lds = sub.add_parser("lds", help="linear dynamical system operations")
    l_sub = p_lds.add_subparsers(dest="subcommand", required=True)

    p_make = l_sub.add_parser("make", help="draw a random system from a region")
    p_make.add_argument("--d-hidden", type=int, required=True)
    p_make.add_argument("--region", required=True,
                        help="a, b, or interval:LO,HI")
    p_make.add_argument("--T", type=int, required=True)
    p_make.add_argument("--q", type=float, default=0.875)
    p_make.add_argument("--seed", type=int, required=True)
    p_make.add_argument("--out", required=True)
    p_make.add_argument("--d-in", type=int, default=8)
    p_make.add_argument("--d-out", type=int, default=8)
    p_make.add_argument("--d-kind", choices=("zero", "identity"), default="zero")
    p_make.set_defaults(func=_cmd_lds_make)

    p_sim = l_sub.add_parser("simulate", help="run a saved system on inputs")
    p_sim.add_argument("--system", required=True)
    p_sim.add_argument("--inputs", choices=_INPUT_KIND_CHOICES,
                       default="unit-sphere")
    p_sim.add_argument("--T", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_lds_simulate)

    p_reg = l_sub.add_parser("region", help="band boundaries over a T range")
    p_reg.add_argument("--q", type=float, action="append", required=True,
                       help="context exponent; repeatable")
    p_reg.add_argument("--Tmin", type=int, required=True)
    p_reg.add_argument("--Tmax", type=int, required=True)
    p_reg.add_argument("--points", type=int, default=64)
    p_reg.add_argument("--variant", choices=("vanilla", "two-ar"),
                       default="vanilla")
    p_reg.add_argument("--emit-csv", default=None)
    p_reg.set_defaults(func=_cmd_lds_region)

    p_run = sub.add_parser("run", help="one online run against a saved system")
    p_run.add_argument("--system", required=True)
    p_run.add_argument("--variant", choices=("vanilla", "two-ar", "tensor"),
                       default="vanilla")
    p_run.add_argument("--T", type=int, required=True)
    p_run.add_argument("--q", type=float, required=True,
                       help="context length is round(T^q)")
    p_run.add_argument("--k", type=int, required=True)
    p_run.add_argument("--r", type=float, default=1.0)
    p_run.add_argument("--seed", type=int, required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--eta0", type=float, default=None,
                       help="step-size scale; default from the radius bound")
    p_run.add_argument("--inputs", choices=_INPUT_KIND_CHOICES,
                       default="unit-sphere")
    p_run.set_defaults(func=_cmd_run)

    p_rg = sub.add_parser("regret", help="score a saved run against the best "
                                         "fixed predictor")
    p_rg.add_argument("--run", required=True)
    p_rg.add_argument("--tol", type=float, default=None)
    p_rg.add_argument("--out", default=None)
    p_rg.set_defaults(func=_cmd_regret)

    p_sw = sub.add_parser("sweep", help="grid of runs over q and seeds")
    group = p_sw.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="JSON experiment config")
    group.add_argument("--preset", choices=sorted(PRESETS))
    p_sw.add_argument("--jobs", type=int, default=1)
    p_sw.add_argument("--out", required=True)
    p_sw.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
