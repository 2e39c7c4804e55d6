"""Online gradient-descent predictors over spectral-filter features.

Three variants share one loop.  Each keeps a matrix per feature slot and
predicts a baseline plus the slot matrices applied to their features:

* ``vanilla``: baseline y_{t-1}; k windowed slots whose features convolve
  the filter bank against inputs u_{t-1}, u_{t-2}, ... (lag 1 onward).
* ``two-ar``: baseline 2 y_{t-1} - y_{t-2}; slots 1-2 are the raw inputs
  u_{t-1} and u_{t-2}; slots 3..k convolve the top k-2 squared-kind filters
  against u_{t-3} onward (slot i uses filter i-2).
* ``tensor``: same baseline and direct slots as two-ar, plus k^2 windowed
  slots using the tensorized bank, also from u_{t-3} onward.

Context length L truncates every windowed feature: lags beyond L are
dropped, so filter entry j contributes only while j <= L (vanilla) or
j <= L - 2 (two-ar, tensor).  Inputs before the start of time are zero.

Features for a whole run are precomputed with FFT convolution; the loop is
then a handful of small dense operations per step.  Updates are projected
gradient descent with step eta_0 / sqrt(t) and per-slot Frobenius-ball
projection onto radius r.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .filters import BANK_H, BANK_N, BANK_TENSOR, FilterBank
from .lds import InputSequence

VANILLA = "vanilla"
TWO_AR = "two-ar"
TENSOR = "tensor"
VARIANTS = (VANILLA, TWO_AR, TENSOR)

_EXPECTED_BANK = {VANILLA: BANK_H, TWO_AR: BANK_N, TENSOR: BANK_TENSOR}


@dataclass(frozen=True)
class PredictorSpec:
    """Variant, horizon, context length, filter count, radius, bank.

    ``k`` is the filter count for vanilla and two-ar (two-ar spends two of
    its k slots on direct input terms) and the component count for tensor
    (2 + k^2 slots).  ``eta0`` of None means the default step scale
    1 / (2 sqrt(slots) ln T), the ratio of the comparator-set diameter to
    the worst-case gradient bound.
    """

    variant: str
    T: int
    L: int
    k: int
    r: float
    bank: FilterBank
    eta0: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 1 <= self.L <= self.T:
            raise ValueError(f"need 1 <= L <= T, got L={self.L} T={self.T}")
        if self.variant == TWO_AR and self.k < 3:
            raise ValueError(f"two-ar needs k >= 3, got {self.k}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.r <= 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.bank.kind != _EXPECTED_BANK[self.variant]:
            raise ValueError(
                f"variant {self.variant!r} needs a {_EXPECTED_BANK[self.variant]!r} "
                f"bank, got {self.bank.kind!r}"
            )
        if self.bank.horizon != self.T:
            raise ValueError(
                f"bank was built for T={self.bank.horizon}, spec has T={self.T}"
            )
        if self.variant == VANILLA and self.bank.num_filters < self.k:
            raise ValueError("bank holds fewer filters than k")
        if self.variant == TWO_AR and self.bank.num_filters < self.k - 2:
            raise ValueError("bank holds fewer filters than k - 2")
        if self.variant == TENSOR and self.bank.component_count != self.k:
            # row-major (i, j) slot layout only lines up for an exact match
            raise ValueError(
                f"tensor bank has component count {self.bank.component_count}, "
                f"spec has k={self.k}"
            )

    @property
    def num_windowed(self) -> int:
        if self.variant == VANILLA:
            return self.k
        if self.variant == TWO_AR:
            return self.k - 2
        return self.k * self.k

    @property
    def num_direct(self) -> int:
        return 0 if self.variant == VANILLA else 2

    @property
    def num_slots(self) -> int:
        return self.num_direct + self.num_windowed

    @property
    def lag_offset(self) -> int:
        """Lag of the first windowed filter entry: 1 for vanilla, 3 otherwise."""
        return 1 if self.variant == VANILLA else 3

    def default_eta0(self) -> float:
        diameter = 2.0 * math.sqrt(self.num_slots) * self.r
        grad_bound = 4.0 * self.num_slots * self.r * math.log(self.T)
        return diameter / grad_bound

    def resolved_eta0(self) -> float:
        return self.default_eta0() if self.eta0 is None else self.eta0

    def scaled_windowed_filters(self) -> np.ndarray:
        """The filters the windowed slots use, eigenvalue^(1/4) applied."""
        return self.bank.scaled_filters()[: self.num_windowed]


def build_predictor_spec(
    variant: str,
    T: int,
    L: int,
    k: int,
    r: float = 1.0,
    eta0: float | None = None,
    tol_eig: float = 1e-10,
    bank: FilterBank | None = None,
) -> PredictorSpec:
    """Convenience constructor that builds the matching bank when not given."""
    from .filters import build_filter_bank, build_tensor_bank

    if bank is None:
        if variant == VANILLA:
            bank = build_filter_bank(T, k, BANK_H, tol_eig)
        elif variant == TWO_AR:
            bank = build_filter_bank(T, k - 2, BANK_N, tol_eig)
        elif variant == TENSOR:
            bank = build_tensor_bank(T, k, tol_eig)
        else:
            raise ValueError(f"unknown variant {variant!r}")
    return PredictorSpec(variant=variant, T=T, L=L, k=k, r=r, bank=bank, eta0=eta0)


def compute_features(spec: PredictorSpec, inputs: InputSequence | np.ndarray) -> np.ndarray:
    """Per-step features, shape (T, num_slots, d_in); row t-1 belongs to step t.

    Windowed slot features are X_{t,s} = sum_j w_s[j] * u_{t - offset + 1 - j}
    for the eigenvalue^(1/4)-scaled filters w_s, computed in one FFT
    convolution pass.  Direct slots (two-ar, tensor) carry u_{t-1} and
    u_{t-2}.  Out-of-range inputs are zero.
    """
    U = inputs.values if isinstance(inputs, InputSequence) else np.asarray(inputs)
    if U.ndim != 2:
        raise ValueError(f"inputs must be 2-d, got shape {U.shape}")
    T = spec.T
    if U.shape[0] != T:
        raise ValueError(f"inputs cover {U.shape[0]} steps, spec has T={T}")
    d_in = U.shape[1]
    feats = np.zeros((T, spec.num_slots, d_in))

    if spec.num_direct:
        feats[1:, 0, :] = U[:-1]  # u_{t-1}
        feats[2:, 1, :] = U[:-2]  # u_{t-2}

    scaled = spec.scaled_windowed_filters()
    max_lag_entries = spec.L - spec.lag_offset + 1  # filter entries the context admits
    J = min(scaled.shape[1], max_lag_entries, T)
    if J >= 1 and spec.num_windowed:
        kernels = scaled[:, :J]
        conv = fftconvolve(U[None, :, :], kernels[:, :, None], axes=1)
        # conv[s, m] = sum_j kernels[s, j] U[m - j]; step t reads m = t - 1 - offset
        start = spec.lag_offset
        feats[start:, spec.num_direct:, :] = np.moveaxis(
            conv[:, : T - start, :], 0, 1
        )
    return feats


@dataclass
class PredictorState:
    """Mutable loop state: slot matrices plus the precomputed features."""

    M: np.ndarray  # (num_slots, d_out, d_in)
    features: np.ndarray  # (T, num_slots, d_in)
    t: int = 1


@dataclass(frozen=True)
class StepOutcome:
    prediction: np.ndarray
    loss: float
    grad_norm: float


def init_state(
    spec: PredictorSpec, inputs: InputSequence | np.ndarray, d_out: int
) -> PredictorState:
    feats = compute_features(spec, inputs)
    M = np.zeros((spec.num_slots, d_out, feats.shape[2]))
    return PredictorState(M=M, features=feats)


def baseline(variant: str, outputs: np.ndarray, t: int) -> np.ndarray:
    """Autoregressive part of the prediction; past outputs, zero before start."""
    d_out = outputs.shape[1]
    prev1 = outputs[t - 2] if t >= 2 else np.zeros(d_out)
    if variant == VANILLA:
        return prev1
    prev2 = outputs[t - 3] if t >= 3 else np.zeros(d_out)
    return 2.0 * prev1 - prev2


def predict(
    state: PredictorState, spec: PredictorSpec, outputs: np.ndarray, t: int
) -> np.ndarray:
    """Prediction for step t (1-based) given true outputs up to t-1."""
    x = state.features[t - 1]
    return baseline(spec.variant, outputs, t) + np.einsum("sij,sj->i", state.M, x)


def loss_and_grad(
    state: PredictorState,
    spec: PredictorSpec,
    prediction: np.ndarray,
    target: np.ndarray,
    t: int,
) -> tuple[float, np.ndarray]:
    """Squared-error loss and its gradient in every slot matrix."""
    err = prediction - target
    x = state.features[t - 1]
    grads = 2.0 * err[None, :, None] * x[:, None, :]
    return float(err @ err), grads


def ogd_step(
    state: PredictorState, spec: PredictorSpec, grads: np.ndarray, t: int
) -> PredictorState:
    """Gradient step with rate eta0 / sqrt(t), then per-slot projection.

    Each slot matrix is pulled back onto the Frobenius ball of radius r.
    Mutates and returns the state.
    """
    eta = spec.resolved_eta0() / math.sqrt(t)
    M = state.M
    M -= eta * grads
    norms = np.sqrt(np.sum(M * M, axis=(1, 2)))
    over = norms > spec.r
    if np.any(over):
        M[over] *= (spec.r / norms[over])[:, None, None]
    state.t = t + 1
    return state


@dataclass(frozen=True)
class RunRecord:
    """Everything one online run produced, plus provenance metadata."""

    spec_meta: dict
    losses: np.ndarray
    cumulative_loss: np.ndarray
    predictions: np.ndarray
    grad_norms: np.ndarray
    M_final: np.ndarray
    data_hash: str
    eta0: float
    wall_time_s: float

    @property
    def T(self) -> int:
        return self.losses.shape[0]

    @property
    def total_loss(self) -> float:
        return float(self.cumulative_loss[-1])

    @property
    def prediction_norms(self) -> np.ndarray:
        return np.linalg.norm(self.predictions, axis=1)


def data_hash(inputs: np.ndarray, outputs: np.ndarray) -> str:
    """Identity of a dataset; regret refuses to mix runs over different data."""
    h = hashlib.sha256()
    for arr in (np.ascontiguousarray(inputs), np.ascontiguousarray(outputs)):
        h.update(str(arr.shape).encode())
        h.update(arr.tobytes())
    return h.hexdigest()


def spec_metadata(spec: PredictorSpec) -> dict:
    return {
        "variant": spec.variant,
        "T": spec.T,
        "L": spec.L,
        "k": spec.k,
        "r": spec.r,
        "eta0": spec.resolved_eta0(),
        "num_slots": spec.num_slots,
        "bank": {
            "kind": spec.bank.kind,
            "T": spec.bank.horizon,
            "num_filters": spec.bank.num_filters,
            "filter_length": spec.bank.filter_length,
            "scaled": spec.bank.scaled,
        },
    }


def fixed_loss_curve(
    spec: PredictorSpec,
    inputs: InputSequence | np.ndarray,
    outputs: np.ndarray,
    M: np.ndarray,
) -> np.ndarray:
    """Per-step losses of a constant slot assignment M, no updates.

    This is the loss curve a comparator point incurs; the online learner's
    regret is measured against the best such curve.
    """
    U = inputs.values if isinstance(inputs, InputSequence) else np.asarray(inputs)
    Y = np.asarray(outputs)
    feats = compute_features(spec, U)
    contrib = np.einsum("soi,tsi->to", M, feats)
    base = np.empty_like(Y)
    for t in range(1, spec.T + 1):
        base[t - 1] = baseline(spec.variant, Y, t)
    err = base + contrib - Y
    return np.einsum("to,to->t", err, err)


def run_online(
    spec: PredictorSpec,
    inputs: InputSequence | np.ndarray,
    outputs: np.ndarray,
) -> RunRecord:
    """Full online pass: predict, observe, incur loss, update, repeat."""
    U = inputs.values if isinstance(inputs, InputSequence) else np.asarray(inputs)
    Y = np.asarray(outputs)
    if Y.ndim != 2 or Y.shape[0] != spec.T:
        raise ValueError(f"outputs must have shape (T={spec.T}, d_out)")
    start = time.perf_counter()
    state = init_state(spec, U, Y.shape[1])
    T = spec.T
    losses = np.empty(T)
    preds = np.empty_like(Y)
    grad_norms = np.empty(T)
    for t in range(1, T + 1):
        yhat = predict(state, spec, Y, t)
        loss, grads = loss_and_grad(state, spec, yhat, Y[t - 1], t)
        losses[t - 1] = loss
        preds[t - 1] = yhat
        grad_norms[t - 1] = math.sqrt(float(np.sum(grads * grads)))
        ogd_step(state, spec, grads, t)
    wall = time.perf_counter() - start
    for arr in (losses, preds, grad_norms):
        arr.flags.writeable = False
    return RunRecord(
        spec_meta=spec_metadata(spec),
        losses=losses,
        cumulative_loss=np.cumsum(losses),
        predictions=preds,
        grad_norms=grad_norms,
        M_final=state.M.copy(),
        data_hash=data_hash(U, Y),
        eta0=spec.resolved_eta0(),
        wall_time_s=wall,
    )
