"""Kraus sets, channel matrices and the centered rescaled operator.

A Kraus family (K_i) acts on matrices as X -> sum_i K_i X K_i*; the same
map acts on row-major vectorized matrices through the n^2 x n^2 matrix
sum_i K_i (x) conj(K_i). For Hermitian Kraus operators that matrix is
Hermitian, and after centering by the expected tensor square and rescaling
by 1/sqrt(d) its spectrum is the object the limit predictions describe.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ensembles import (
    EnsembleSpec,
    GUE,
    ROTATED_DETERMINISTIC,
    ROTATED_RADEMACHER,
    sample,
)
from .linalg import (
    MatFreeOperator,
    ResourceGuardError,
    as_complex_matrix,
    kron,
    max_dense_dim,
    require_hermitian,
)
from .seeding import EXPECTATION_SALT, Seed


class CenteringWarning(UserWarning):
    """Zero expectation model used where the expectation is not exactly zero."""


def hermitian_split(k: np.ndarray) -> "tuple[np.ndarray, np.ndarray]":
    """Split a square matrix K into Hermitian parts with K = K_R + i K_I."""
    k = as_complex_matrix(k)
    if k.shape[0] != k.shape[1]:
        raise ValueError(f"hermitian_split needs a square matrix, got {k.shape}")
    adj = k.conj().T
    k_r = (k + adj) / 2.0
    k_i = (k - adj) / 2.0j
    return k_r, k_i


@dataclass(frozen=True)
class KrausSet:
    """d Hermitian Kraus operators K_i = W_i / sqrt(d) of one channel."""

    d: int
    n: int
    operators: tuple
    source_spec: Optional[EnsembleSpec] = None
    seed: Optional[Seed] = None

    def __post_init__(self):
        if self.d < 1 or self.d != len(self.operators):
            raise ValueError("need d >= 1 operators")
        for op in self.operators:
            if op.shape != (self.n, self.n):
                raise ValueError("all Kraus operators must be n x n")

    @classmethod
    def from_family(
        cls,
        family: Sequence[np.ndarray],
        spec: Optional[EnsembleSpec] = None,
        seed: Optional[Seed] = None,
    ) -> "KrausSet":
        """Scale a family (W_i) into Kraus operators W_i / sqrt(d)."""
        family = [require_hermitian(w) for w in family]
        if not family:
            raise ValueError("family must be nonempty")
        n = family[0].shape[0]
        d = len(family)
        ops = tuple(w / math.sqrt(d) for w in family)
        return cls(d=d, n=n, operators=ops, source_spec=spec, seed=seed)


def _tensor_square_sum(mats: Sequence[np.ndarray]) -> np.ndarray:
    """sum_i A_i (x) conj(A_i), computed as one flat Gram product.

    kron(A, conj(A))[(i,k),(j,l)] = A[i,j] * conj(A[k,l]), so stacking the
    matrices as rows of a (d, n^2) array turns the sum into a single GEMM
    followed by an axis permutation; much faster than d separate krons.
    """
    n = mats[0].shape[0]
    flat = np.stack([m.reshape(-1) for m in mats])
    gram = flat.T @ flat.conj()
    return gram.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)


def build_channel_matrix(ks: KrausSet, max_dim: Optional[int] = None) -> np.ndarray:
    """Dense n^2 x n^2 matrix sum_i K_i (x) conj(K_i) of the channel.

    Acts on row-major vectorized matrices: matrix @ vec(X) = vec(sum_i
    K_i X K_i*). Raises the resource guard when n^2 exceeds the dense cap.
    """
    cap = max_dense_dim() if max_dim is None else max_dim
    dim = ks.n * ks.n
    if dim > cap:
        raise ResourceGuardError(
            f"dense channel matrix would be {dim}x{dim}, beyond the cap {cap}; "
            "use the matrix-free path"
        )
    return _tensor_square_sum(ks.operators)


def apply_channel(ks: KrausSet, x: np.ndarray) -> np.ndarray:
    """sum_i K_i x K_i* without forming the n^2 x n^2 matrix."""
    x = as_complex_matrix(x)
    if x.shape != (ks.n, ks.n):
        raise ValueError(f"input must be {ks.n} x {ks.n}, got {x.shape}")
    out = np.zeros_like(x)
    for k in ks.operators:
        out += k @ x @ k.conj().T
    return out


def kraus_defects(ks: KrausSet) -> "tuple[float, float]":
    """Max-entry deviations of sum K_i* K_i and sum K_i K_i* from the identity.

    The first is the trace-preserving defect, the second the unital defect;
    they coincide for Hermitian Kraus operators.
    """
    eye = np.eye(ks.n)
    tp = np.zeros((ks.n, ks.n), dtype=np.complex128)
    unital = np.zeros((ks.n, ks.n), dtype=np.complex128)
    for k in ks.operators:
        adj = k.conj().T
        tp += adj @ k
        unital += k @ adj
    tp_defect = float(np.max(np.abs(tp - eye)))
    unital_defect = float(np.max(np.abs(unital - eye)))
    return tp_defect, unital_defect


def max_entangled_vector(n: int) -> np.ndarray:
    """sum_k e_k (x) e_k / sqrt(n), as a vector of length n^2."""
    psi = np.eye(n, dtype=np.complex128).reshape(-1)
    return psi / math.sqrt(n)


def flip_operator(n: int) -> np.ndarray:
    """Swap operator on C^n (x) C^n: F (u (x) v) = v (x) u."""
    f = np.zeros((n * n, n * n), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            f[k * n + l, l * n + k] = 1.0
    return f


def flip_minus_diag(n: int) -> np.ndarray:
    """Flip operator with its product-basis diagonal removed.

    Spectrum: +1 and -1 each with multiplicity n(n-1)/2 (symmetric and
    antisymmetric two-index vectors), 0 with multiplicity n.
    """
    f = flip_operator(n)
    return f - np.diag(np.diagonal(f))


def expected_tensor_gue(n: int, max_dim: Optional[int] = None) -> np.ndarray:
    """Exact E[W (x) conj(W)] for the Gaussian unitary ensemble.

    Equals psi psi* + (F - diag F) / n with psi the maximally entangled
    unit vector and F the flip operator; trace 1 because the flip part is
    traceless.
    """
    cap = max_dense_dim() if max_dim is None else max_dim
    if n * n > cap:
        raise ResourceGuardError(f"dense expectation at n={n} exceeds the cap {cap}")
    psi = max_entangled_vector(n)
    return np.outer(psi, psi.conj()) + flip_minus_diag(n) / n


def expected_tensor_twirl(
    n: int, mean_trace_squared: float, mean_trace_of_square: float, max_dim: Optional[int] = None
) -> np.ndarray:
    """E[(U A U*) (x) conj(U A U*)] over Haar U, for a random Hermitian A.

    Haar conjugation projects the tensor-square expectation onto the span
    of the identity and the maximally entangled projector, so the result is
    alpha Id + beta (n psi psi*) where alpha, beta are fixed by the two
    scalars the input distribution enters through:

        trace:        n^2 alpha + n beta   = E[(tr A)^2]
        psi overlap:  n alpha   + n^2 beta = E[tr(A^2)]

    (the overlap of A (x) conj(A) with psi is tr(A^2)/n). For the rotated
    Rademacher ensemble both right-hand sides equal n, giving
    alpha = 1/(n+1) and n beta = n/(n+1).
    """
    if n < 2:
        raise ValueError("the twirl system is singular at n=1")
    cap = max_dense_dim() if max_dim is None else max_dim
    if n * n > cap:
        raise ResourceGuardError(f"dense expectation at n={n} exceeds the cap {cap}")
    s = float(mean_trace_squared)
    q = float(mean_trace_of_square)
    # Solve the 2x2 system above for alpha, beta.
    c = (s - q) / (n * (n - 1.0))
    alpha = (s + n * c) / (n * (n + 1.0))
    beta = alpha - c
    psi = max_entangled_vector(n)
    return alpha * np.eye(n * n, dtype=np.complex128) + beta * n * np.outer(psi, psi.conj())


def twirl_parameters(spec: EnsembleSpec) -> "tuple[float, float]":
    """(E[(tr A)^2], E[tr(A^2)]) of the pre-rotation matrix of a rotated kind."""
    if spec.kind == ROTATED_RADEMACHER:
        # tr A = sum of n independent signs; tr(A^2) = n exactly.
        return float(spec.n), float(spec.n)
    if spec.kind == ROTATED_DETERMINISTIC:
        lam = np.asarray(spec.spectrum, dtype=np.float64)
        return float(lam.sum() ** 2), float(np.sum(lam**2))
    raise ValueError(f"the twirl expectation applies to rotated ensembles, not {spec.kind}")


def expected_tensor_empirical(
    spec: EnsembleSpec, trials: int, seed: Seed, max_dim: Optional[int] = None
) -> np.ndarray:
    """Monte Carlo estimate of E[W (x) conj(W)], re-symmetrized.

    Accumulation runs in ascending trial order with deterministic per-trial
    streams, so the estimate is bitwise reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cap = max_dense_dim() if max_dim is None else max_dim
    n = spec.n
    if n * n > cap:
        raise ResourceGuardError(f"dense expectation at n={n} exceeds the cap {cap}")
    acc = np.zeros((n * n, n * n), dtype=np.complex128)
    for t in range(trials):
        w = sample(spec, seed.substream(t))
        acc += _tensor_square_sum([w])
    acc /= trials
    return (acc + acc.conj().T) / 2.0


@dataclass(frozen=True)
class ZeroExpectation:
    """Skip centering; only sound when the expectation is negligible."""

    def label(self) -> str:
        return "zero"


@dataclass(frozen=True)
class AnalyticGUEExpectation:
    """Closed-form Gaussian-unitary expectation."""

    def label(self) -> str:
        return "analytic-gue"


@dataclass(frozen=True)
class AnalyticTwirlExpectation:
    """Closed-form expectation for Haar-conjugated ensembles."""

    mean_trace_squared: float
    mean_trace_of_square: float

    def label(self) -> str:
        return "analytic-twirl"


@dataclass(frozen=True)
class EmpiricalExpectation:
    """Monte Carlo expectation over independent draws."""

    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("empirical expectation needs trials >= 1")

    def label(self) -> str:
        return f"empirical({self.trials})"


ExpectationModel = object  # any of the four model dataclasses above


def resolve_expectation(
    model,
    n: int,
    spec: Optional[EnsembleSpec] = None,
    seed: Optional[Seed] = None,
    max_dim: Optional[int] = None,
) -> Optional[np.ndarray]:
    """Dense E[W (x) conj(W)] for the model, or None for the zero model."""
    if isinstance(model, ZeroExpectation):
        return None
    if isinstance(model, AnalyticGUEExpectation):
        return expected_tensor_gue(n, max_dim=max_dim)
    if isinstance(model, AnalyticTwirlExpectation):
        return expected_tensor_twirl(
            n, model.mean_trace_squared, model.mean_trace_of_square, max_dim=max_dim
        )
    if isinstance(model, EmpiricalExpectation):
        if spec is None:
            raise ValueError("the empirical model needs the ensemble spec")
        base = seed if seed is not None else Seed(0)
        return expected_tensor_empirical(
            spec, model.trials, base.salted(EXPECTATION_SALT), max_dim=max_dim
        )
    raise TypeError(f"unknown expectation model {model!r}")


@dataclass(frozen=True)
class DeltaOperator:
    """The centered rescaled channel matrix, dense and/or matrix-free."""

    n: int
    d: int
    dense: Optional[np.ndarray]
    matfree: Optional[MatFreeOperator]
    expectation_label: str

    def __post_init__(self):
        if self.dense is None and self.matfree is None:
            raise ValueError("at least one representation must be present")

    @property
    def dim(self) -> int:
        return self.n * self.n


def build_delta(
    family: Sequence[np.ndarray],
    model,
    dense: Optional[bool] = None,
    spec: Optional[EnsembleSpec] = None,
    seed: Optional[Seed] = None,
    max_dim: Optional[int] = None,
) -> DeltaOperator:
    """(1/sqrt(d)) sum_i (W_i (x) conj(W_i) - E[W_i (x) conj(W_i)]).

    ``dense=None`` builds the dense form whenever n^2 fits the cap;
    ``dense=True`` insists (raising the guard if it cannot); ``dense=False``
    skips it. The matrix-free form is always attached; with a non-zero
    expectation model its shift is the dense centering matrix, so beyond
    the cap only the zero model is available matrix-free.
    """
    family = [require_hermitian(w) for w in family]
    if not family:
        raise ValueError("family must be nonempty")
    n = family[0].shape[0]
    for w in family:
        if w.shape != (n, n):
            raise ValueError("family members must share one dimension")
    d = len(family)
    cap = max_dense_dim() if max_dim is None else max_dim
    dim = n * n

    if isinstance(model, ZeroExpectation) and spec is not None:
        trivially_zero = spec.kind == ROTATED_DETERMINISTIC and not any(spec.spectrum)
        if not trivially_zero:
            warnings.warn(
                f"zero expectation model with the {spec.kind} ensemble: the finite-n "
                "expectation of W (x) conj(W) is not exactly zero, spectra are uncentered",
                CenteringWarning,
                stacklevel=2,
            )

    expectation = resolve_expectation(model, n, spec=spec, seed=seed, max_dim=cap)
    scale = 1.0 / math.sqrt(d)

    want_dense = dense if dense is not None else dim <= cap
    dense_matrix = None
    if want_dense:
        if dim > cap:
            raise ResourceGuardError(
                f"dense delta would be {dim}x{dim}, beyond the cap {cap}; "
                "use the matrix-free path"
            )
        dense_matrix = _tensor_square_sum(family)
        if expectation is not None:
            dense_matrix -= d * expectation
        dense_matrix *= scale

    shift = None
    if expectation is not None:
        shift = -math.sqrt(d) * expectation
    matfree = MatFreeOperator(
        n=n,
        terms=tuple((scale, w, np.conj(w)) for w in family),
        shift=shift,
    )
    label = model.label() if hasattr(model, "label") else str(model)
    return DeltaOperator(n=n, d=d, dense=dense_matrix, matfree=matfree, expectation_label=label)


def expected_channel_map_gue(x: np.ndarray) -> np.ndarray:
    """Mean Gaussian-unitary channel: X -> tr(X) Id/n + (X^T - diag X)/n.

    Up to the 1/n correction this is the fully randomizing channel; it is
    the matrix map whose vectorized form is ``expected_tensor_gue``.
    """
    x = as_complex_matrix(x)
    if x.shape[0] != x.shape[1]:
        raise ValueError("input must be square")
    n = x.shape[0]
    return np.trace(x) * np.eye(n, dtype=np.complex128) / n + (x.T - np.diag(np.diagonal(x))) / n
