"""Exact limiting-moment predictions via free cumulants.

Mixed moments of free variables are evaluated as sums over noncrossing
partitions with monochromatic blocks, each block contributing a free
cumulant of its color's law. Tensor-convolution moments (the fixed-Kraus-
count limit) follow by grouping index tuples by their equality kernel and
counting colorings with falling factorials.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Optional, Sequence, Union

from .partitions import (
    catalan,
    enumerate_partitions,
    noncrossing_partitions,
    partition_class_count,
)

#: Moment-order guard: the kernel sum walks all Bell(p) partitions.
MAX_MOMENT_ORDER = 10

DEFAULT_LAW_ORDER = 10


@dataclass(frozen=True)
class MarginalLaw:
    """A probability law on the reals, known through its first moments."""

    name: str
    moments: tuple

    def __post_init__(self):
        if len(self.moments) < 2:
            raise ValueError("a law needs at least two moments")

    @property
    def order(self) -> int:
        return len(self.moments)

    def moment(self, p: int) -> float:
        if not 1 <= p <= self.order:
            raise ValueError(f"moment of order {p} not available (law has {self.order})")
        return self.moments[p - 1]

    def cumulants(self) -> "CumulantSequence":
        return moments_to_free_cumulants(self)

    def is_centered(self, tol: float = 0.0) -> bool:
        return abs(self.moments[0]) <= tol

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.moments[0]) <= tol and abs(self.moments[1] - 1.0) <= tol


@dataclass(frozen=True)
class CumulantSequence:
    """Free cumulants kappa_1..kappa_P of a law."""

    kappas: tuple

    @property
    def order(self) -> int:
        return len(self.kappas)

    def kappa(self, s: int) -> float:
        if not 1 <= s <= self.order:
            raise ValueError(f"cumulant of order {s} not available")
        return self.kappas[s - 1]


def rademacher_law(order: int = DEFAULT_LAW_ORDER) -> MarginalLaw:
    """Symmetric +-1 law: moments alternate 0, 1."""
    return MarginalLaw("Rademacher", tuple(0.0 if p % 2 else 1.0 for p in range(1, order + 1)))


def semicircle_law(order: int = DEFAULT_LAW_ORDER) -> MarginalLaw:
    """Standard semicircle: odd moments 0, even moments Catalan numbers."""
    return MarginalLaw(
        "Semicircle",
        tuple(0.0 if p % 2 else float(catalan(p // 2)) for p in range(1, order + 1)),
    )


def centered_mp_law(order: int = DEFAULT_LAW_ORDER) -> MarginalLaw:
    """Law of cc* - 1 for a circular c: Marchenko-Pastur (square case) shifted
    to mean zero. Moments come from the binomial shift of the Catalan moments
    of MP itself."""
    mp = [1.0] + [float(catalan(k)) for k in range(1, order + 1)]  # m_0..m_order
    shifted = []
    for k in range(1, order + 1):
        shifted.append(sum(comb(k, j) * (-1) ** (k - j) * mp[j] for j in range(k + 1)))
    return MarginalLaw("CenteredMP", tuple(float(m) for m in shifted))


def law_from_moments(moments: Sequence[float], name: str = "FromMoments") -> MarginalLaw:
    return MarginalLaw(name, tuple(float(m) for m in moments))


def moments_to_free_cumulants(law: "MarginalLaw | Sequence[float]") -> CumulantSequence:
    """Invert m_p = sum over noncrossing partitions of the cumulant products.

    The recursion is triangular: the full one-block partition contributes
    kappa_p, every other noncrossing partition only lower-order cumulants.
    """
    moments = law.moments if isinstance(law, MarginalLaw) else tuple(float(m) for m in law)
    return CumulantSequence(_cumulants_of_moments(moments))


@lru_cache(maxsize=None)
def _cumulants_of_moments(moments: tuple) -> tuple:
    kappas: list = []
    for p in range(1, len(moments) + 1):
        rest = 0.0
        for pi in noncrossing_partitions(p):
            if pi.block_count == 1:
                continue
            prod = 1.0
            for block in pi.blocks:
                prod *= kappas[len(block) - 1]
            rest += prod
        kappas.append(moments[p - 1] - rest)
    return tuple(kappas)


def free_cumulants_to_moments(kappas: "CumulantSequence | Sequence[float]") -> tuple:
    """Forward moment-cumulant sum; inverse of :func:`moments_to_free_cumulants`."""
    ks = kappas.kappas if isinstance(kappas, CumulantSequence) else tuple(float(k) for k in kappas)
    moments = []
    for p in range(1, len(ks) + 1):
        total = 0.0
        for pi in noncrossing_partitions(p):
            prod = 1.0
            for block in pi.blocks:
                prod *= ks[len(block) - 1]
            total += prod
        moments.append(total)
    return tuple(moments)


def free_word_moment(colors: Sequence[int], laws: Sequence[MarginalLaw]) -> float:
    """Joint moment tau(a_{c_1} ... a_{c_p}) of free variables a_i ~ laws[i].

    Equals the sum over noncrossing partitions of [p] whose blocks are
    monochromatic under ``colors`` of the product of per-block free
    cumulants. Evaluated by the first-block recursion (the block containing
    position 0 splits the rest into independent gaps), which enumerates
    exactly the contributing partitions.
    """
    colors = tuple(int(c) for c in colors)
    if not colors:
        return 1.0
    p = len(colors)
    used = set(colors)
    if min(used) < 0 or max(used) >= len(laws):
        raise ValueError(f"colors must index into the {len(laws)} given laws")
    kappas = []
    for i, law in enumerate(laws):
        if i in used and law.order < p:
            raise ValueError(f"law {law.name} provides {law.order} moments, need {p}")
        kappas.append(moments_to_free_cumulants(law).kappas[:p])
    return _word_moment(colors, tuple(kappas))


@lru_cache(maxsize=200_000)
def _word_moment(colors: tuple, kappas_by_color: tuple) -> float:
    if not colors:
        return 1.0
    p = len(colors)
    first = colors[0]
    kappas = kappas_by_color[first]
    same = [j for j in range(1, p) if colors[j] == first]
    total = 0.0
    # The block through position 0 is any subset {0} u S of same-colored
    # positions; the gaps between consecutive block elements recurse.
    for mask in range(1 << len(same)):
        block = [0] + [same[j] for j in range(len(same)) if mask >> j & 1]
        size = len(block)
        if size > len(kappas):
            continue
        k = kappas[size - 1]
        if k == 0.0:
            continue
        prod = k
        bounds = block + [p]
        for lo, hi in zip(bounds, bounds[1:]):
            gap = colors[lo + 1 : hi]
            if gap:
                prod *= _word_moment(gap, kappas_by_color)
                if prod == 0.0:
                    break
        total += prod
    return total


def _as_law_list(
    laws: "MarginalLaw | Sequence[MarginalLaw]", d: int
) -> "tuple[list, bool]":
    """Normalize laws input to (per-index list of length d, iid flag)."""
    if isinstance(laws, MarginalLaw):
        return [laws] * d, True
    laws = list(laws)
    if len(laws) == 1:
        return laws * d, True
    if len(laws) != d:
        raise ValueError(f"need 1 or {d} marginal laws, got {len(laws)}")
    iid = all(law == laws[0] for law in laws)
    return laws, iid


def tensor_convolution_moment(
    p: int,
    d: int,
    laws: "MarginalLaw | Sequence[MarginalLaw]",
    dilated: bool = True,
) -> float:
    """p-th moment of the tensor convolution of d laws (dilated by default).

    Sums tau(a_{i_1} ... a_{i_p})^2 over all index tuples i in [d]^p,
    grouped by equality kernel: identically distributed entries make the
    squared word moment depend on the kernel partition only, each kernel
    class containing a falling-factorial number of tuples. The dilated
    variant divides by d^(p/2), matching the 1/sqrt(d) operator scaling.
    """
    if not 1 <= p <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must be in [1, {MAX_MOMENT_ORDER}]")
    if d < 1:
        raise ValueError("d must be >= 1")
    per_index, iid = _as_law_list(laws, d)
    total = 0.0
    if iid:
        law = per_index[0]
        skip_singletons = law.is_centered()
        for pi in enumerate_partitions(p):
            if pi.block_count > d:
                continue
            if skip_singletons and any(len(b) == 1 for b in pi.blocks):
                continue
            tau = free_word_moment(pi.labels(), [law] * pi.block_count)
            if tau == 0.0:
                continue
            total += partition_class_count(pi, d) * tau * tau
    else:
        from itertools import permutations

        centered = all(law.is_centered() for law in per_index)
        for pi in enumerate_partitions(p):
            k = pi.block_count
            if k > d:
                continue
            if centered and any(len(b) == 1 for b in pi.blocks):
                continue
            labels = pi.labels()
            for assignment in permutations(range(d), k):
                colors = tuple(assignment[lab] for lab in labels)
                tau = free_word_moment(colors, per_index)
                total += tau * tau
    if dilated:
        total /= float(d) ** (p / 2.0)
    return total


@dataclass(frozen=True)
class FixedD:
    """Fixed Kraus count: the limit is the dilated tensor convolution."""

    d: int
    laws: "MarginalLaw | tuple"


@dataclass(frozen=True)
class GrowingD:
    """Kraus count growing with the dimension: semicircle limit."""

    laws: "Optional[MarginalLaw | tuple]" = None


Regime = Union[FixedD, GrowingD]


def predict_limit_moments(regime: Regime, p_max: int) -> "list[float]":
    """Predicted limiting moments of the centered rescaled channel.

    Fixed d: dilated tensor-convolution moments for p = 1..p_max. Growing d:
    semicircle moments (0 at odd orders, Catalan numbers at even orders);
    this regime requires identically distributed, normalized marginals and
    refuses anything else.
    """
    if not 1 <= p_max <= MAX_MOMENT_ORDER:
        raise ValueError(f"p_max must be in [1, {MAX_MOMENT_ORDER}]")
    if isinstance(regime, GrowingD):
        laws = regime.laws
        if laws is not None:
            seq = [laws] if isinstance(laws, MarginalLaw) else list(laws)
            if any(law != seq[0] for law in seq):
                raise ValueError(
                    "the growing-d regime requires identically distributed marginals"
                )
            if not seq[0].is_normalized(tol=1e-9):
                raise ValueError(
                    "the growing-d regime requires a normalized marginal "
                    "(mean 0, second moment 1)"
                )
        return [0.0 if p % 2 else float(catalan(p // 2)) for p in range(1, p_max + 1)]
    if isinstance(regime, FixedD):
        return [
            tensor_convolution_moment(p, regime.d, regime.laws, dilated=True)
            for p in range(1, p_max + 1)
        ]
    raise TypeError(f"unknown regime {regime!r}")
