"""Linear dynamical systems with controlled eigenvalue spectra.

Systems here are diagonal in the hidden state: the transition matrix is a
vector of eigenvalues in [0, 1].  Eigenvalues are drawn from named regions
whose boundaries depend on the horizon T and a context exponent q:

* bad band: the open interval (1 - ln(T) / (8 T^q), 1 - 1 / (2 T^p)) with
  p = 5/4 for the vanilla predictor and p = 1/4 for the two-AR one.  A
  length-T^q context is provably enough outside this band, so spectra
  inside it are the adversarial case.
* hug band: the complement region used for benign experiments, two closed
  components surrounding the q = 7/8 bad band on both sides.

The simulation recursion is the source of truth for time indexing:
with state x_0 (zero unless given), step t emits y_t = C x_{t-1} + D u_{t-1}
and then absorbs u_t via x_t = A x_{t-1} + B u_t.  Hence y_1 = 0 for zero
initial state and y_t depends on inputs u_1 .. u_{t-1} only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

REGION_BAD = "bad-band"
REGION_HUG = "hug-band"
REGION_INTERVAL = "explicit-interval"

INPUT_KINDS = ("unit-sphere", "rademacher-scaled", "constant")

_VARIANT_RIGHT_EXP = {"vanilla": 1.25, "two-ar": 0.25}


@dataclass(frozen=True)
class EigRegion:
    """One or two intervals of admissible eigenvalues.

    ``components`` is a tuple of (lo, hi) pairs; ``open_interval`` marks
    whether endpoints are excluded (true for bad bands).  An empty component
    tuple represents an empty region; for bad bands the raw formula
    endpoints stay available as ``left``/``right`` even then (an empty band
    is exactly the case left >= right).
    """

    kind: str
    components: tuple[tuple[float, float], ...]
    T: int = 0
    q: float = 0.0
    left: float = float("nan")
    right: float = float("nan")

    @property
    def open_interval(self) -> bool:
        return self.kind == REGION_BAD

    @property
    def is_empty(self) -> bool:
        return len(self.components) == 0


def region_bounds(T: int, q: float, variant: str = "vanilla") -> EigRegion:
    """Bad band for horizon T, context exponent q and predictor variant.

    Natural logarithm throughout.  The band is empty whenever the left
    endpoint meets or passes the right one, which happens for small T or
    large q; emptiness falls out of the endpoint comparison rather than a
    special case.
    """
    if T < 2:
        raise ValueError(f"T must be >= 2, got {T}")
    if variant not in _VARIANT_RIGHT_EXP:
        raise ValueError(f"unknown variant {variant!r}")
    left = 1.0 - math.log(T) / (8.0 * T ** q)
    right = 1.0 - 1.0 / (2.0 * T ** _VARIANT_RIGHT_EXP[variant])
    components = ((left, right),) if left < right else ()
    return EigRegion(
        kind=REGION_BAD, components=components, T=T, q=q, left=left, right=right
    )


def region_a(T: int) -> EigRegion:
    """Benign two-component region hugging the q = 7/8 bad band.

    Left component [0.9 (1 - ln T / (8 T^(7/8))), 1 - ln T / (8 T^(7/8))],
    right component [1 - 1 / (2 T^(5/4)), 1].
    """
    if T < 2:
        raise ValueError(f"T must be >= 2, got {T}")
    edge = 1.0 - math.log(T) / (8.0 * T ** 0.875)
    right_lo = 1.0 - 1.0 / (2.0 * T ** 1.25)
    return EigRegion(
        kind=REGION_HUG,
        components=((0.9 * edge, edge), (right_lo, 1.0)),
        T=T,
        q=0.875,
    )


def region_b(T: int) -> EigRegion:
    """Adversarial region: the q = 7/8 vanilla bad band."""
    return region_bounds(T, 0.875, "vanilla")


def explicit_interval(lo: float, hi: float) -> EigRegion:
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    return EigRegion(kind=REGION_INTERVAL, components=((lo, hi),))


def sample_region(region: EigRegion, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` eigenvalues uniformly from the region.

    Two-component regions contribute ceil(count/2) draws from the first
    component and the rest from the second.  Open intervals never return
    an endpoint.  Deterministic for a fixed seed.
    """
    if region.is_empty:
        raise ValueError("cannot sample from an empty region")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    if len(region.components) == 1:
        sizes = [count]
    else:
        sizes = [math.ceil(count / 2), count - math.ceil(count / 2)]
    chunks = []
    for (lo, hi), n in zip(region.components, sizes):
        draw = lo + (hi - lo) * rng.random(n)
        if region.open_interval:
            # rng.random can return exactly 0; nudge off the left endpoint
            draw = np.where(draw == lo, np.nextafter(lo, hi), draw)
        chunks.append(draw)
    out = np.concatenate(chunks)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class LdsSystem:
    """Diagonal-transition system (eigenvalues, B, C, D)."""

    eigenvalues: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def d_hidden(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def d_in(self) -> int:
        return self.B.shape[1]

    @property
    def d_out(self) -> int:
        return self.C.shape[0]

    @property
    def norm_b(self) -> float:
        return float(np.linalg.norm(self.B, 2))

    @property
    def norm_c(self) -> float:
        return float(np.linalg.norm(self.C, 2))


def make_random_system(
    d_hidden: int,
    d_in: int,
    d_out: int,
    eigenvalues: np.ndarray,
    seed: int,
    d_kind: str = "zero",
) -> LdsSystem:
    """Random B and C rescaled to unit spectral norm; D zero or identity."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.shape != (d_hidden,):
        raise ValueError(
            f"need {d_hidden} eigenvalues, got shape {eigenvalues.shape}"
        )
    if np.any(eigenvalues < 0.0) or np.any(eigenvalues > 1.0):
        raise ValueError("eigenvalues must lie in [0, 1]")
    if d_kind not in ("zero", "identity"):
        raise ValueError(f"unknown d_kind {d_kind!r}")
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((d_hidden, d_in))
    C = rng.standard_normal((d_out, d_hidden))
    B /= np.linalg.norm(B, 2)
    C /= np.linalg.norm(C, 2)
    D = np.zeros((d_out, d_in)) if d_kind == "zero" else np.eye(d_out, d_in)
    eig = eigenvalues.copy()
    for arr in (eig, B, C, D):
        arr.flags.writeable = False
    return LdsSystem(eigenvalues=eig, B=B, C=C, D=D)


@dataclass(frozen=True)
class InputSequence:
    kind: str
    seed: int
    values: np.ndarray  # (T, d_in)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def d_in(self) -> int:
        return self.values.shape[1]


def gen_inputs(kind: str, d_in: int, T: int, seed: int) -> InputSequence:
    """Unit-norm input sequences of the named kind, deterministic per seed."""
    if T < 1 or d_in < 1:
        raise ValueError(f"need T >= 1 and d_in >= 1, got T={T} d_in={d_in}")
    rng = np.random.default_rng(seed)
    if kind == "unit-sphere":
        g = rng.standard_normal((T, d_in))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        # a zero draw has probability zero; regenerate defensively anyway
        while np.any(norms == 0.0):
            bad = norms[:, 0] == 0.0
            g[bad] = rng.standard_normal((int(bad.sum()), d_in))
            norms = np.linalg.norm(g, axis=1, keepdims=True)
        values = g / norms
    elif kind == "rademacher-scaled":
        values = (2.0 * rng.integers(0, 2, (T, d_in)) - 1.0) / math.sqrt(d_in)
    elif kind == "constant":
        values = np.full((T, d_in), 1.0 / math.sqrt(d_in))
    else:
        raise ValueError(f"unknown input kind {kind!r}")
    values.flags.writeable = False
    return InputSequence(kind=kind, seed=seed, values=values)


def simulate(
    system: LdsSystem, inputs: InputSequence | np.ndarray, x0: np.ndarray | None = None
) -> np.ndarray:
    """Run the recursion and return outputs of shape (T, d_out).

    y_t = C x_{t-1} + D u_{t-1}, then x_t = A x_{t-1} + B u_t; the exact
    double-precision recursion, no closed forms.
    """
    U = inputs.values if isinstance(inputs, InputSequence) else np.asarray(inputs)
    if U.ndim != 2 or U.shape[1] != system.d_in:
        raise ValueError(f"inputs must have shape (T, {system.d_in})")
    T = U.shape[0]
    a = system.eigenvalues
    x = np.zeros(system.d_hidden) if x0 is None else np.asarray(x0, dtype=float).copy()
    if x.shape != (system.d_hidden,):
        raise ValueError(f"x0 must have shape ({system.d_hidden},)")
    y = np.empty((T, system.d_out))
    for t in range(T):
        y[t] = system.C @ x
        if t >= 1:
            y[t] += system.D @ U[t - 1]
        x = a * x + system.B @ U[t]
    y.flags.writeable = False
    return y


def conditioning_threshold(system: LdsSystem, T: int) -> float:
    return 2.0 * system.norm_c * system.norm_b / math.sqrt(T)


def conditioning_check(
    inputs: InputSequence | np.ndarray, threshold: float
) -> tuple[float, bool]:
    """Smallest eigenvalue of the decay-weighted input Gram matrix.

    The weight of u at array position s (0-based) is T - s, so the oldest
    input weighs T and the newest weighs 1.  Requires T >= d_in, otherwise
    the Gram matrix is singular by construction.
    """
    U = inputs.values if isinstance(inputs, InputSequence) else np.asarray(inputs)
    T, d_in = U.shape
    if T < d_in:
        raise ValueError(f"need T >= d_in for a full-rank check, got {T} < {d_in}")
    weights = np.arange(T, 0, -1, dtype=float)
    gram = (U * weights[:, None]).T @ U
    lam_min = float(np.linalg.eigvalsh(gram)[0])
    return lam_min, lam_min >= threshold


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmt_row(values: np.ndarray) -> str:
    return ",".join(_fmt(v) for v in np.asarray(values).ravel())


def save_system(system: LdsSystem, path: str) -> None:
    """Line-oriented text format, matrices flattened row-major at 17 digits."""
    lines = [
        f"sf-lds v1 d_hidden={system.d_hidden} d_in={system.d_in} d_out={system.d_out}",
        f"eigs={_fmt_row(system.eigenvalues)}",
        f"B={_fmt_row(system.B)}",
        f"C={_fmt_row(system.C)}",
        f"D={_fmt_row(system.D)}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_system(path: str) -> LdsSystem:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty system file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "sf-lds" or head[1] != "v1":
        raise ValueError(f"{path}:1: expected 'sf-lds v1 ...' header")
    try:
        dims = {k: int(v) for k, _, v in (tok.partition("=") for tok in head[2:])}
        d_hidden, d_in, d_out = dims["d_hidden"], dims["d_in"], dims["d_out"]
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}:1: bad header field ({exc})") from exc

    fields = {}
    for ln_no, line in enumerate(lines[1:], start=2):
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{ln_no}: expected key=value line")
        try:
            fields[key] = np.array(val.split(","), dtype=float)
        except ValueError as exc:
            raise ValueError(f"{path}:{ln_no}: bad float ({exc})") from exc
    shapes = {
        "eigs": (d_hidden,),
        "B": (d_hidden, d_in),
        "C": (d_out, d_hidden),
        "D": (d_out, d_in),
    }
    arrays = {}
    for key, shape in shapes.items():
        if key not in fields:
            raise ValueError(f"{path}: missing field {key!r}")
        flat = fields[key]
        if flat.size != int(np.prod(shape)):
            raise ValueError(
                f"{path}: field {key!r} has {flat.size} values, expected "
                f"{int(np.prod(shape))}"
            )
        arr = flat.reshape(shape)
        arr.flags.writeable = False
        arrays[key] = arr
    return LdsSystem(
        eigenvalues=arrays["eigs"], B=arrays["B"], C=arrays["C"], D=arrays["D"]
    )
