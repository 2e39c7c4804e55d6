"""On-disk layout for single online runs.

A run directory holds four text files:

* ``run.csv``: header ``step,loss,cumulative_loss,prediction_norm``, one row
  per step, floats at 17 significant digits.
* ``run.json``: spec and bank metadata, step-size scale, data hash, seeds
  where known, wall-clock time.
* ``inputs.csv`` / ``outputs.csv``: the data the run saw, one row per step,
  so regret against the best fixed comparator can be recomputed later and
  checked against the recorded hash.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .learner import RunRecord, data_hash

RUN_CSV = "run.csv"
RUN_JSON = "run.json"
INPUTS_CSV = "inputs.csv"
OUTPUTS_CSV = "outputs.csv"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_run_csv(record: RunRecord, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "loss", "cumulative_loss", "prediction_norm"])
        pnorms = record.prediction_norms
        for t in range(record.T):
            writer.writerow(
                [
                    t + 1,
                    _fmt(record.losses[t]),
                    _fmt(record.cumulative_loss[t]),
                    _fmt(pnorms[t]),
                ]
            )


def _write_matrix_csv(values: np.ndarray, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in values:
            writer.writerow([_fmt(v) for v in row])


def _read_matrix_csv(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows)


def save_run_dir(
    record: RunRecord,
    out_dir: str,
    inputs: np.ndarray,
    outputs: np.ndarray,
    extra_meta: dict | None = None,
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    write_run_csv(record, os.path.join(out_dir, RUN_CSV))
    meta = {
        "spec": record.spec_meta,
        "eta0": record.eta0,
        "data_hash": record.data_hash,
        "wall_time_s": record.wall_time_s,
        "total_loss": record.total_loss,
    }
    if extra_meta:
        meta.update(extra_meta)
    with open(os.path.join(out_dir, RUN_JSON), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_matrix_csv(np.asarray(inputs), os.path.join(out_dir, INPUTS_CSV))
    _write_matrix_csv(np.asarray(outputs), os.path.join(out_dir, OUTPUTS_CSV))


def load_run_dir(run_dir: str) -> dict:
    """Metadata, loss curves and data of a saved run.

    Verifies that the stored data still matches the recorded hash; a
    mismatch means the directory was edited and regret numbers would lie.
    """
    meta_path = os.path.join(run_dir, RUN_JSON)
    if not os.path.exists(meta_path):
        raise ValueError(f"{run_dir}: not a run directory (missing {RUN_JSON})")
    with open(meta_path) as fh:
        meta = json.load(fh)
    with open(os.path.join(run_dir, RUN_CSV), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["step", "loss", "cumulative_loss", "prediction_norm"]:
            raise ValueError(f"{run_dir}/{RUN_CSV}: unexpected header {header}")
        rows = [row for row in reader if row]
    losses = np.array([float(r[1]) for r in rows])
    cumulative = np.array([float(r[2]) for r in rows])
    inputs = _read_matrix_csv(os.path.join(run_dir, INPUTS_CSV))
    outputs = _read_matrix_csv(os.path.join(run_dir, OUTPUTS_CSV))
    stored = meta.get("data_hash")
    actual = data_hash(inputs, outputs)
    if stored is not None and stored != actual:
        raise ValueError(
            f"{run_dir}: stored data does not match recorded hash; "
            "refusing to compute regret on tampered data"
        )
    return {
        "meta": meta,
        "losses": losses,
        "cumulative_loss": cumulative,
        "inputs": inputs,
        "outputs": outputs,
    }
