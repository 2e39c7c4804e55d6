"""Spectral filter banks for convolutional sequence prediction.

The predictors in this package convolve input history against a small, fixed
set of filters.  The filters are the top eigenvectors of one of two symmetric
positive semi-definite Hankel matrices:

* ``h``: the second moment of the geometric impulse vector
  mu_alpha = (1 - alpha) * (1, alpha, alpha^2, ...) integrated over
  alpha in [0, 1].  Entries have the closed form 2 / ((s-1) s (s+1)) at
  1-based position (i, j) with s = i + j.
* ``n``: the second moment of the squared-decay impulse vector
  (1 - alpha)^2 * (1, alpha, alpha^2, ...), with closed-form entries
  24 / ((s-1) s (s+1) (s+2) (s+3)).

A third bank kind, ``tensor``, takes pairwise Kronecker products of a small
component bank with itself.  This keeps the stored filters short (length
sqrt of the horizon) while the effective filters cover a quadratically
longer window.

Eigenvalue^(1/4) scaling is applied at feature-computation time, never baked
into the stored filters, so orthonormality of a saved bank is preserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KIND_PLAIN = "plain"
KIND_SQUARED = "squared"

BANK_H = "h"
BANK_N = "n"
BANK_TENSOR = "tensor"

# Component of an eigenvector counts as nonzero for the sign convention.
_SIGN_EPS = 1e-12


class EigenResidualError(ArithmeticError):
    """Raised when an eigenpair fails its residual check.

    Carries the worst achieved relative residual in ``residual``.
    """

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"eigenpair residual {residual:.3e} exceeds tolerance {tol:.3e}"
        )


@dataclass(frozen=True)
class ImpulseVector:
    """Geometric decay profile of a scalar mode with eigenvalue ``alpha``.

    ``values[j]`` (0-based) is (1 - alpha) * alpha^j for the plain kind and
    (1 - alpha)^2 * alpha^j for the squared kind.
    """

    alpha: float
    kind: str
    values: np.ndarray

    @property
    def length(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class HankelMatrix:
    size: int
    kind: str
    entries: np.ndarray


@dataclass(frozen=True)
class FilterBank:
    """A set of filters plus the eigenvalues they came from.

    ``filters`` has shape (num_filters, filter_length) and is orthonormal
    row-wise for the ``h`` and ``n`` kinds.  ``scaled`` records whether the
    eigenvalue^(1/4) weights are already folded in (they are not, for banks
    produced by this module).  For ``tensor`` banks, ``component_count`` is
    the size k of the component bank (num_filters == k**2, ordered row-major
    in the component index pair) and ``t_prime`` is the padded horizon whose
    window the tensor filters cover.
    """

    kind: str
    horizon: int
    filters: np.ndarray
    eigenvalues: np.ndarray
    scaled: bool = False
    component_count: int | None = None
    t_prime: int | None = None

    @property
    def num_filters(self) -> int:
        return self.filters.shape[0]

    @property
    def filter_length(self) -> int:
        return self.filters.shape[1]

    def scaled_filters(self) -> np.ndarray:
        """Filters multiplied by eigenvalue^(1/4), ready for features."""
        if self.scaled:
            return self.filters
        return self.filters * self.eigenvalues[:, None] ** 0.25


def impulse_vector(alpha: float, n: int, kind: str = KIND_PLAIN) -> ImpulseVector:
    """Length-``n`` impulse profile for eigenvalue ``alpha`` in [0, 1]."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if kind not in (KIND_PLAIN, KIND_SQUARED):
        raise ValueError(f"unknown impulse kind {kind!r}")
    powers = np.power(alpha, np.arange(n, dtype=float))
    scale = (1.0 - alpha) if kind == KIND_PLAIN else (1.0 - alpha) ** 2
    values = scale * powers
    values.flags.writeable = False
    return ImpulseVector(alpha=alpha, kind=kind, values=values)


def build_hankel(T: int, kind: str = BANK_H) -> HankelMatrix:
    """Closed-form Hankel matrix of size T.

    ``h`` entries are 2 / ((s-1) s (s+1)) and ``n`` entries are
    24 / ((s-1) s (s+1) (s+2) (s+3)), with s = i + j in 1-based indices.
    Entries are evaluated directly from these formulas; the integrals they
    equal are only used as a cross-check in the test suite.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    idx = np.arange(1, T + 1, dtype=float)
    s = np.add.outer(idx, idx)
    if kind == BANK_H:
        entries = 2.0 / ((s - 1.0) * s * (s + 1.0))
    elif kind == BANK_N:
        entries = 24.0 / ((s - 1.0) * s * (s + 1.0) * (s + 2.0) * (s + 3.0))
    else:
        raise ValueError(f"unknown hankel kind {kind!r}")
    entries.flags.writeable = False
    return HankelMatrix(size=T, kind=kind, entries=entries)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvectors so the first component above _SIGN_EPS is positive."""
    out = vectors.copy()
    for row in out:
        nz = np.flatnonzero(np.abs(row) > _SIGN_EPS)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return out


def eig_sym_topk(
    matrix: HankelMatrix | np.ndarray, k: int, tol_eig: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """Top-k eigenpairs of a symmetric PSD matrix, eigenvalues descending.

    Returns ``(eigenvalues, vectors)`` with ``vectors[i]`` the unit
    eigenvector for ``eigenvalues[i]``.  Residuals ||A v - sigma v|| are
    checked against ``tol_eig`` relative to the largest eigenvalue;
    EigenResidualError carries the worst residual on failure.  Eigenvalues
    within round-off below zero are clamped to zero.
    """
    entries = matrix.entries if isinstance(matrix, HankelMatrix) else np.asarray(matrix)
    n = entries.shape[0]
    if entries.shape != (n, n):
        raise ValueError(f"matrix must be square, got shape {entries.shape}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    sigmas, vecs = np.linalg.eigh(entries)
    order = np.argsort(sigmas)[::-1][:k]
    sigmas = sigmas[order]
    vecs = _fix_signs(vecs[:, order].T)

    top = max(sigmas[0], np.finfo(float).tiny)
    residual = float(
        np.max(np.linalg.norm(entries @ vecs.T - vecs.T * sigmas[None, :], axis=0))
    )
    if residual > tol_eig * top:
        raise EigenResidualError(residual / top, tol_eig)
    sigmas = np.maximum(sigmas, 0.0)
    sigmas.flags.writeable = False
    vecs.flags.writeable = False
    return sigmas, vecs


def build_filter_bank(
    T: int, k: int, kind: str = BANK_H, tol_eig: float = 1e-10
) -> FilterBank:
    """Top-k filters for prediction horizon ``T``.

    ``h`` banks cover the window of the T-1 most recent inputs and ``n``
    banks the T-2 inputs preceding the two most recent ones, so the
    underlying matrix sizes are T-1 and T-2 respectively.
    """
    if kind == BANK_H:
        size = T - 1
        if T < 2:
            raise ValueError(f"T must be >= 2 for kind 'h', got {T}")
    elif kind == BANK_N:
        size = T - 2
        if T < 3:
            raise ValueError(f"T must be >= 3 for kind 'n', got {T}")
    else:
        raise ValueError(f"unknown bank kind {kind!r}")
    if not 1 <= k <= size:
        raise ValueError(f"k must lie in [1, {size}] for T={T} kind={kind!r}, got {k}")
    sigmas, vecs = eig_sym_topk(build_hankel(size, kind), k, tol_eig)
    return FilterBank(kind=kind, horizon=T, filters=vecs, eigenvalues=sigmas)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor varying fastest.

    Entry p of the result is a[p % len(a)] * b[p // len(a)].  With this
    layout the geometric impulse over a long window factors exactly:
    within-chunk decay comes from ``a`` and across-chunk decay from ``b``.
    """
    return np.kron(np.asarray(b), np.asarray(a))


def build_tensor_bank(T: int, k: int, tol_eig: float = 1e-10) -> FilterBank:
    """Tensorized bank: pairwise products of a sqrt-length component bank.

    The horizon is padded up to T' = ceil(sqrt(T-2))^2 + 2 so the window
    length T'-2 is a perfect square m^2.  The component filters are the top
    k eigenvectors of the size-m ``h`` matrix; the bank holds the k^2
    products phi_i (x) phi_j ordered row-major in (i, j), with eigenvalue
    entry sigma_i * sigma_j so feature-time scaling contributes
    (sigma_i * sigma_j)^(1/4).
    """
    if T < 6:
        raise ValueError(f"T must be >= 6 for tensor banks, got {T}")
    m = math.isqrt(T - 3) + 1  # ceil(sqrt(T - 2))
    t_prime = m * m + 2
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}] for T={T}, got {k}")
    sigmas, vecs = eig_sym_topk(build_hankel(m, BANK_H), k, tol_eig)
    filters = np.empty((k * k, m * m))
    eigenvalues = np.empty(k * k)
    for i in range(k):
        for j in range(k):
            filters[i * k + j] = tensor_product(vecs[i], vecs[j])
            eigenvalues[i * k + j] = sigmas[i] * sigmas[j]
    filters.flags.writeable = False
    eigenvalues.flags.writeable = False
    return FilterBank(
        kind=BANK_TENSOR,
        horizon=T,
        filters=filters,
        eigenvalues=eigenvalues,
        component_count=k,
        t_prime=t_prime,
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save_bank(bank: FilterBank, path: str) -> None:
    """Write a bank in the line-oriented text format.

    Header: ``sf-bank v1 kind=<kind> T=<T> k=<k>`` where k is the component
    count for tensor banks and the filter count otherwise.  One line per
    filter: ``sigma=<value> phi=<comma-separated components>`` with floats
    at 17 significant digits (round-trip exact for doubles).
    """
    k = bank.component_count if bank.kind == BANK_TENSOR else bank.num_filters
    lines = [f"sf-bank v1 kind={bank.kind} T={bank.horizon} k={k}"]
    for sigma, phi in zip(bank.eigenvalues, bank.filters):
        comps = ",".join(_fmt(v) for v in phi)
        lines.append(f"sigma={_fmt(sigma)} phi={comps}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_bank(path: str) -> FilterBank:
    """Read a bank written by save_bank; raises ValueError on malformed input."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty bank file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "sf-bank" or head[1] != "v1":
        raise ValueError(f"{path}:1: expected 'sf-bank v1 kind=.. T=.. k=..' header")
    fields = {}
    for tok in head[2:]:
        key, _, val = tok.partition("=")
        fields[key] = val
    try:
        kind = fields["kind"]
        horizon = int(fields["T"])
        k = int(fields["k"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}:1: bad header field ({exc})") from exc
    if kind not in (BANK_H, BANK_N, BANK_TENSOR):
        raise ValueError(f"{path}:1: unknown bank kind {kind!r}")

    sigmas, filters = [], []
    for ln_no, line in enumerate(lines[1:], start=2):
        try:
            sig_part, phi_part = line.split(" phi=", 1)
            if not sig_part.startswith("sigma="):
                raise ValueError("missing sigma field")
            sigmas.append(float(sig_part[len("sigma="):]))
            filters.append(np.array(phi_part.split(","), dtype=float))
        except ValueError as exc:
            raise ValueError(f"{path}:{ln_no}: malformed filter line ({exc})") from exc
    if not filters:
        raise ValueError(f"{path}: bank has no filters")
    lengths = {f.shape[0] for f in filters}
    if len(lengths) != 1:
        raise ValueError(f"{path}: inconsistent filter lengths {sorted(lengths)}")

    expected = k * k if kind == BANK_TENSOR else k
    if len(filters) != expected:
        raise ValueError(
            f"{path}: header promises {expected} filters, found {len(filters)}"
        )
    filt = np.vstack(filters)
    eig = np.asarray(sigmas)
    filt.flags.writeable = False
    eig.flags.writeable = False
    if kind == BANK_TENSOR:
        return FilterBank(
            kind=kind,
            horizon=horizon,
            filters=filt,
            eigenvalues=eig,
            component_count=k,
            t_prime=filt.shape[1] + 2,
        )
    return FilterBank(kind=kind, horizon=horizon, filters=filt, eigenvalues=eig)
