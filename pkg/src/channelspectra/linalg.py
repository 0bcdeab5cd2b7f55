"""Dense complex linear algebra and a matrix-free Kronecker-sum operator.

Conventions used throughout the package:

* matrices are dense ``complex128`` numpy arrays in row-major order;
* vectorization is row-major, ``vec(X)[i*n + j] = X[i, j]``, under which
  ``(A (x) B) vec(X) = vec(A X B^T)``.

The eigensolver is LAPACK's Hermitian driver (tridiagonalization plus
implicitly shifted QR/divide-and-conquer); its output is checked against
trace identities so a silent numerical failure cannot leak into reports.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .seeding import Seed, as_generator

#: Largest dense side length allowed for n^2-dimensional objects. 8192^2
#: complex doubles is ~1 GiB; beyond that only matrix-free paths make sense.
DEFAULT_MAX_DENSE_DIM = 8192

#: Environment variable overriding the dense-dimension guard.
MAX_DENSE_DIM_ENV = "SPECTRA_MAX_DENSE_DIM"

#: Relative tolerance of the Hermiticity check. Inputs failing it are
#: rejected, never symmetrized: silent symmetrization hides sampler bugs.
HERMITIAN_RTOL = 1e-10


class ResourceGuardError(Exception):
    """A dense operation would exceed the configured dimension cap."""


class NumericalError(Exception):
    """The eigensolver failed to converge or violated its postconditions."""


def max_dense_dim() -> int:
    """Current dense-dimension cap (env override or default)."""
    raw = os.environ.get(MAX_DENSE_DIM_ENV)
    if raw is None:
        return DEFAULT_MAX_DENSE_DIM
    value = int(raw)
    if value < 1:
        raise ValueError(f"{MAX_DENSE_DIM_ENV} must be a positive integer")
    return value


def as_complex_matrix(a: np.ndarray) -> np.ndarray:
    """View ``a`` as a 2-d complex128 array without copying when possible."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def hermiticity_defect(a: np.ndarray) -> float:
    """Max-entry magnitude of ``a - a*``."""
    a = as_complex_matrix(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    return hermiticity_defect(a) <= rtol * scale


def require_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Return ``a`` if it passes the Hermiticity invariant, else raise."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix is not square: shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    defect = hermiticity_defect(a)
    if defect > rtol * scale:
        raise ValueError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds "
            f"{rtol:.1e} * {scale:.3e}"
        )
    return a


def kron(a: np.ndarray, b: np.ndarray, max_dim: Optional[int] = None) -> np.ndarray:
    """Kronecker product with a resource guard on the result dimensions.

    ``kron(a, b)[(i*b.rows + k), (j*b.cols + l)] = a[i, j] * b[k, l]``.
    """
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    cap = max_dense_dim() if max_dim is None else max_dim
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > cap:
        raise ResourceGuardError(
            f"kron result would be {rows}x{cols}, beyond the dense cap {cap} "
            f"(override with {MAX_DENSE_DIM_ENV} or use the matrix-free path)"
        )
    return np.kron(a, b)


def entrywise_conj(a: np.ndarray) -> np.ndarray:
    """Entry-wise complex conjugate; equals the transpose for Hermitian input."""
    return np.conj(as_complex_matrix(a))


def normalized_trace(a: np.ndarray) -> complex:
    """Trace divided by the dimension."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"normalized trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a)) / a.shape[0]


def hermitian_eigenvalues(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Postconditions (checked): the eigenvalue sum matches ``tr(h)`` within
    ``1e-8 * dim`` and the sum of squares matches ``tr(h^2)`` to relative
    1e-8. Violations raise :class:`NumericalError` with diagnostics.
    """
    h = require_hermitian(h, rtol=rtol)
    dim = h.shape[0]
    try:
        values = np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigensolver did not converge at dim {dim}: {exc}")
    trace = float(np.trace(h).real)
    # tr(h^2) = sum |h_ij|^2 for Hermitian h; avoids an O(n^3) product.
    trace_sq = float(np.sum(np.abs(h) ** 2))
    sum_vals = float(np.sum(values))
    sum_sq = float(np.sum(values**2))
    if abs(sum_vals - trace) > 1e-8 * dim:
        raise NumericalError(
            f"eigenvalue sum {sum_vals:.12g} vs trace {trace:.12g} at dim {dim}"
        )
    if abs(sum_sq - trace_sq) > 1e-8 * max(1.0, trace_sq):
        raise NumericalError(
            f"eigenvalue square-sum {sum_sq:.12g} vs tr(h^2) {trace_sq:.12g}"
        )
    return values


@dataclass(frozen=True)
class MatFreeOperator:
    """Sum of scaled Kronecker products plus an optional dense shift.

    Represents ``sum_t coeff_t * (left_t (x) right_t) + shift`` acting on
    vectors of length ``n**2`` without ever forming the n^2 x n^2 matrix,
    via ``(A (x) B) vec(X) = vec(A X B^T)``.
    """

    n: int
    terms: tuple
    shift: Optional[np.ndarray] = None

    def __post_init__(self):
        for _, left, right in self.terms:
            if left.shape != (self.n, self.n) or right.shape != (self.n, self.n):
                raise ValueError("all Kronecker factors must be n x n")
        if self.shift is not None and self.shift.shape != (self.n**2, self.n**2):
            raise ValueError("shift must act on the n^2-dimensional space")

    @property
    def dim(self) -> int:
        return self.n**2

    def apply(self, v: np.ndarray) -> np.ndarray:
        return matfree_apply(self, v)

    def to_dense(self, max_dim: Optional[int] = None) -> np.ndarray:
        """Materialize the operator densely (guarded)."""
        cap = max_dense_dim() if max_dim is None else max_dim
        if self.dim > cap:
            raise ResourceGuardError(
                f"dense form would be {self.dim}x{self.dim}, beyond cap {cap}"
            )
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for coeff, left, right in self.terms:
            out += coeff * np.kron(left, right)
        if self.shift is not None:
            out += self.shift
        return out


def matfree_apply(op: MatFreeOperator, v: np.ndarray) -> np.ndarray:
    """Apply the operator to a vector of length ``n**2``."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (op.dim,):
        raise ValueError(f"vector must have length {op.dim}, got shape {v.shape}")
    x = v.reshape(op.n, op.n)
    out = np.zeros_like(x)
    for coeff, left, right in op.terms:
        out += coeff * (left @ x @ right.T)
    result = out.reshape(-1)
    if op.shift is not None:
        result = result + op.shift @ v
    return result


def hutchinson_normalized_trace_power(
    op: MatFreeOperator,
    p: int,
    probes: int,
    rng: "Seed | np.random.Generator | int",
) -> "tuple[float, float]":
    """Unbiased sign-probe estimate of the normalized trace of ``op**p``.

    Averages ``Re(z* op^p z) / n^2`` over ``probes`` independent Rademacher
    vectors z (entries +-1). Returns ``(estimate, standard_error)``; the
    standard error is the sample one, 0.0 when ``probes == 1``.
    """
    if p < 1:
        raise ValueError("power p must be >= 1")
    if probes < 1:
        raise ValueError("probes must be >= 1")
    gen = as_generator(rng)
    dim = op.dim
    samples = np.empty(probes)
    for k in range(probes):
        z = gen.integers(0, 2, size=dim).astype(np.float64) * 2.0 - 1.0
        w = z.astype(np.complex128)
        for _ in range(p):
            w = matfree_apply(op, w)
        samples[k] = float(np.real(z @ w)) / dim
    estimate = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / np.sqrt(probes)) if probes > 1 else 0.0
    return estimate, stderr
