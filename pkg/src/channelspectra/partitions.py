"""Set partitions, pair partitions and the noncrossing predicate.

Ground sets are ``range(p)`` (0-based). Partitions are canonical: each block
sorted ascending, blocks ordered by their minima. Enumeration is guarded
because Bell numbers explode (Bell(12) is ~4.2 million).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

MAX_PARTITION_ORDER = 12
MAX_PAIRING_ORDER = 16


@dataclass(frozen=True)
class SetPartition:
    """Partition of ``range(p)`` into disjoint nonempty blocks."""

    p: int
    blocks: tuple

    def __post_init__(self):
        seen = sorted(x for block in self.blocks for x in block)
        if seen != list(range(self.p)):
            raise ValueError(f"blocks do not partition range({self.p}): {self.blocks}")
        for block in self.blocks:
            if list(block) != sorted(block):
                raise ValueError(f"block not sorted: {block}")
        if list(self.blocks) != sorted(self.blocks, key=lambda b: b[0]):
            raise ValueError("blocks not ordered by minimum")

    @classmethod
    def from_blocks(cls, p: int, blocks) -> "SetPartition":
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        return cls(p, canon)

    @classmethod
    def from_labels(cls, labels) -> "SetPartition":
        """Partition grouping positions with equal labels (the kernel)."""
        groups: dict = {}
        for pos, lab in enumerate(labels):
            groups.setdefault(lab, []).append(pos)
        return cls.from_blocks(len(tuple(labels)), groups.values())

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_of(self, x: int) -> int:
        for k, block in enumerate(self.blocks):
            if x in block:
                return k
        raise KeyError(x)

    def labels(self) -> tuple:
        """Block index of every position, as a length-p tuple."""
        out = [0] * self.p
        for k, block in enumerate(self.blocks):
            for x in block:
                out[x] = k
        return tuple(out)

    def __str__(self) -> str:
        return "|".join(",".join(str(x) for x in b) for b in self.blocks)


def enumerate_partitions(p: int) -> "list[SetPartition]":
    """All partitions of ``range(p)``, canonical order, Bell(p) of them."""
    if not 1 <= p <= MAX_PARTITION_ORDER:
        raise ValueError(f"partition order must be in [1, {MAX_PARTITION_ORDER}]")
    return list(_partitions_cached(p))


@lru_cache(maxsize=None)
def _partitions_cached(p: int) -> tuple:
    # Restricted-growth strings: element k joins an existing block or opens
    # a new one; this yields each partition exactly once, blocks already
    # ordered by minimum.
    results = []

    def grow(k: int, blocks: list):
        if k == p:
            results.append(SetPartition(p, tuple(tuple(b) for b in blocks)))
            return
        for b in blocks:
            b.append(k)
            grow(k + 1, blocks)
            b.pop()
        blocks.append([k])
        grow(k + 1, blocks)
        blocks.pop()

    grow(0, [])
    results.sort(key=lambda pi: pi.blocks)
    return tuple(results)


def enumerate_pair_partitions(p: int) -> "list[SetPartition]":
    """All (p-1)!! pairings of ``range(p)``; empty for odd p (odd moments vanish)."""
    if p < 0 or p > MAX_PAIRING_ORDER:
        raise ValueError(f"pairing order must be in [0, {MAX_PAIRING_ORDER}]")
    if p % 2 == 1:
        return []
    return list(_pairings_cached(p))


@lru_cache(maxsize=None)
def _pairings_cached(p: int) -> tuple:
    results = []

    def pair_up(remaining: tuple, blocks: list):
        if not remaining:
            results.append(SetPartition.from_blocks(p, list(blocks)))
            return
        first, rest = remaining[0], remaining[1:]
        for k, partner in enumerate(rest):
            blocks.append((first, partner))
            pair_up(rest[:k] + rest[k + 1 :], blocks)
            blocks.pop()

    pair_up(tuple(range(p)), [])
    results.sort(key=lambda pi: pi.blocks)
    return tuple(results)


def is_noncrossing(pi: SetPartition) -> bool:
    """True iff no two blocks interleave.

    Blocks A, B cross iff there are a < b < c < d with a, c in one and
    b, d in the other; equivalently their merged, labelled element sequence
    alternates through four or more runs.
    """
    blocks = pi.blocks
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if _blocks_cross(blocks[i], blocks[j]):
                return False
    return True


def _blocks_cross(a: tuple, b: tuple) -> bool:
    merged = sorted([(x, 0) for x in a] + [(x, 1) for x in b])
    runs = 1
    for (_, lab_prev), (_, lab) in zip(merged, merged[1:]):
        if lab != lab_prev:
            runs += 1
    return runs >= 4


def noncrossing_partitions(p: int) -> "list[SetPartition]":
    """All noncrossing partitions of ``range(p)`` (Catalan(p) of them).

    Generated directly by first-block decomposition (the block through the
    smallest element splits the remainder into independent gaps), so the
    cost is Catalan(p), not Bell(p)."""
    if not 1 <= p <= MAX_PARTITION_ORDER:
        raise ValueError(f"partition order must be in [1, {MAX_PARTITION_ORDER}]")
    return list(_noncrossing_cached(p))


@lru_cache(maxsize=None)
def _noncrossing_cached(p: int) -> tuple:
    results = [
        SetPartition.from_blocks(p, blocks) for blocks in _nc_blocks(0, p)
    ]
    results.sort(key=lambda pi: pi.blocks)
    return tuple(results)


@lru_cache(maxsize=None)
def _nc_blocks(lo: int, hi: int) -> tuple:
    """Noncrossing partitions of range(lo, hi) as tuples of blocks."""
    if lo >= hi:
        return ((),)
    rest = tuple(range(lo + 1, hi))
    out = []
    for mask in range(1 << len(rest)):
        block = (lo,) + tuple(rest[j] for j in range(len(rest)) if mask >> j & 1)
        gaps = []
        bounds = block + (hi,)
        for a, b in zip(bounds, bounds[1:]):
            gaps.append((a + 1, b))
        partial = [(block,)]
        for a, b in gaps:
            if a >= b:
                continue
            partial = [pref + tail for pref in partial for tail in _nc_blocks(a, b)]
        out.extend(partial)
    return tuple(out)


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def nc2_count(p: int) -> int:
    """Number of noncrossing pairings of [p]: 0 for odd p, Catalan(p/2) else."""
    if p < 0:
        raise ValueError("order must be nonnegative")
    if p % 2 == 1:
        return 0
    return catalan(p // 2)


def partition_class_count(pi: SetPartition, d: int) -> int:
    """Number of tuples i in [d]^p whose equality kernel is exactly ``pi``.

    Choosing a distinct index for each block gives the falling factorial
    d (d-1) ... (d - |pi| + 1); zero when there are more blocks than indices.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    k = pi.block_count
    if k > d:
        return 0
    return factorial(d) // factorial(d - k)


def double_factorial(p: int) -> int:
    """(p-1)!! pairing count for even p."""
    out = 1
    for k in range(p - 1, 0, -2):
        out *= k
    return out
