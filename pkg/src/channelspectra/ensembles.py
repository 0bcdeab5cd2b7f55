"""Seeded samplers for the random Hermitian matrix ensembles.

Every sampler is a pure function of ``(spec, seed)``: the Philox stream is
keyed by the seed, so identical seeds reproduce identical matrices bitwise
regardless of thread scheduling. All Hermitian ensembles are normalized so
the mean normalized trace is 0 and the expected normalized trace of the
square is 1 (exactly for the rotated-Rademacher and Gaussian-unitary kinds,
asymptotically for centered Wishart, whose finite-n bias is noted in
reports rather than rescaled away).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import NumericalError, require_hermitian
from .seeding import Seed

ROTATED_RADEMACHER = "rotated-rademacher"
GUE = "gue"
WISHART_CENTERED = "wishart-centered"
ROTATED_DETERMINISTIC = "rotated-deterministic"
GINIBRE = "ginibre"

ENSEMBLE_KINDS = (ROTATED_RADEMACHER, GUE, WISHART_CENTERED, ROTATED_DETERMINISTIC, GINIBRE)

HERMITIAN_KINDS = (ROTATED_RADEMACHER, GUE, WISHART_CENTERED, ROTATED_DETERMINISTIC)


@dataclass(frozen=True)
class EnsembleSpec:
    """Declarative description of a random-matrix ensemble."""

    kind: str
    n: int
    spectrum: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {ENSEMBLE_KINDS}")
        if self.n < 1:
            raise ValueError("dimension n must be >= 1")
        if self.kind == ROTATED_DETERMINISTIC:
            if self.spectrum is None or len(self.spectrum) != self.n:
                raise ValueError("rotated-deterministic needs a spectrum of length n")
            if not all(math.isfinite(x) for x in self.spectrum):
                raise ValueError("spectrum entries must be finite")
        elif self.spectrum is not None:
            raise ValueError(f"{self.kind} takes no spectrum")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        if self.spectrum is not None:
            out["spectrum"] = list(self.spectrum)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleSpec":
        spectrum = data.get("spectrum")
        return cls(
            kind=data["kind"],
            n=int(data["n"]),
            spectrum=tuple(float(x) for x in spectrum) if spectrum is not None else None,
        )


@dataclass(frozen=True)
class MatrixSample:
    """A drawn matrix together with its provenance."""

    matrix: np.ndarray
    spec: EnsembleSpec
    seed: Seed


def sample_ginibre(n: int, seed: Seed) -> np.ndarray:
    """n x n matrix of i.i.d. complex Gaussians, mean 0, variance 1/n."""
    return _ginibre(n, seed.generator())


def _ginibre(n: int, gen: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("dimension n must be >= 1")
    re = gen.standard_normal((n, n))
    im = gen.standard_normal((n, n))
    return (re + 1j * im) / math.sqrt(2 * n)


def sample_haar_unitary(n: int, seed: Seed) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre draw.

    The unitary factor is rephased so the triangular factor has positive
    real diagonal, which makes the QR output exactly Haar rather than
    merely unitary.
    """
    return _haar_unitary(n, seed.generator())


def _haar_unitary(n: int, gen: np.random.Generator) -> np.ndarray:
    for attempt in range(2):
        z = _ginibre(n, gen)
        q, r = np.linalg.qr(z)
        diag = np.diagonal(r)
        if np.all(np.abs(diag) > 0):
            return q * (diag / np.abs(diag))
    raise NumericalError("Ginibre draw was singular twice in a row")


def sample_rotated_rademacher(n: int, seed: Seed) -> np.ndarray:
    """U diag(eps) U* with i.i.d. signs eps and an independent Haar U.

    Squares to the identity, so Kraus sets built from these give exactly
    trace-preserving, unital channels.
    """
    gen = seed.generator()
    eps = gen.integers(0, 2, size=n).astype(np.float64) * 2.0 - 1.0
    u = _haar_unitary(n, gen)
    return (u * eps) @ u.conj().T


def sample_gue(n: int, seed: Seed) -> np.ndarray:
    """Gaussian Wigner matrix: i.i.d. N(0, 1/n) entries up to symmetry.

    Every entry, diagonal included, is a real centered Gaussian of variance
    1/n with W[l, k] = W[k, l]. This makes the expected normalized trace of
    W^2 exactly 1 and gives the tensor-square expectation its closed form
    psi psi* + (F - diag F)/n, which requires E[W_kl^2] = E|W_kl|^2 (complex
    off-diagonal entries would kill the flip part).
    """
    gen = seed.generator()
    g = gen.standard_normal((n, n)) / math.sqrt(n)
    w = np.triu(g) + np.triu(g, 1).T
    return w.astype(np.complex128)


def sample_wishart_centered(n: int, seed: Seed) -> np.ndarray:
    """X X* - Id for a square Ginibre X; eigenvalues are >= -1."""
    x = _ginibre(n, seed.generator())
    return x @ x.conj().T - np.eye(n)


def sample_rotated_deterministic(spectrum, seed: Seed) -> np.ndarray:
    """U diag(spectrum) U* with a Haar-random U."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.ndim != 1 or spectrum.size == 0:
        raise ValueError("spectrum must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(spectrum)):
        raise ValueError("spectrum entries must be finite")
    u = _haar_unitary(spectrum.size, seed.generator())
    return (u * spectrum) @ u.conj().T


def sample(spec: EnsembleSpec, seed: Seed) -> np.ndarray:
    """Draw one matrix from the ensemble; Hermitian kinds are validated."""
    if spec.kind == ROTATED_RADEMACHER:
        w = sample_rotated_rademacher(spec.n, seed)
    elif spec.kind == GUE:
        w = sample_gue(spec.n, seed)
    elif spec.kind == WISHART_CENTERED:
        w = sample_wishart_centered(spec.n, seed)
    elif spec.kind == ROTATED_DETERMINISTIC:
        w = sample_rotated_deterministic(spec.spectrum, seed)
    elif spec.kind == GINIBRE:
        return sample_ginibre(spec.n, seed)
    else:  # pragma: no cover - guarded by EnsembleSpec
        raise ValueError(f"unknown kind {spec.kind}")
    return require_hermitian(w)


def sample_family(spec: EnsembleSpec, d: int, seed: Seed) -> "list[np.ndarray]":
    """d independent, identically distributed draws.

    The i-th member uses stream ``seed.stream * d + i``, so families for
    different base streams never overlap and re-running with the same root
    reproduces the family bitwise.
    """
    if d < 1:
        raise ValueError("family size d must be >= 1")
    return [sample(spec, Seed(seed.root, seed.stream * d + i)) for i in range(d)]
