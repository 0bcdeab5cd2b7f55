"""Counter-based random streams keyed by (root, stream).

Every sampler in the package draws from a ``numpy`` Philox generator keyed
by a :class:`Seed`. Philox is counter-based, so identical ``(root, stream)``
pairs reproduce identical draws bitwise, independent of thread scheduling
or how many other streams were consumed in between.
"""

from __future__ import annotations

from dataclasses import dataclass

from numpy.random import Generator, Philox

_MASK64 = (1 << 64) - 1

# Salt mixed into the root when drawing auxiliary randomness (Monte Carlo
# expectation averaging, trace-estimation probes) so those streams can never
# collide with trial/family streams that share the same root.
EXPECTATION_SALT = 0x9E3779B97F4A7C15
PROBE_SALT = 0xC2B2AE3D27D4EB4F


@dataclass(frozen=True)
class Seed:
    """Deterministic randomness handle: a 64-bit root plus a stream index."""

    root: int
    stream: int = 0

    def generator(self) -> Generator:
        """Fresh Philox generator keyed by (root, stream)."""
        key = [self.root & _MASK64, self.stream & _MASK64]
        return Generator(Philox(key=key))

    def substream(self, index: int) -> "Seed":
        """Seed for the ``index``-th substream of this one."""
        return Seed(self.root, (self.stream + index) & _MASK64)

    def salted(self, salt: int) -> "Seed":
        """Seed in a disjoint stream space, for auxiliary randomness."""
        return Seed((self.root ^ salt) & _MASK64, self.stream)


def as_generator(rng: "Seed | Generator | int") -> Generator:
    """Coerce a Seed, Generator or plain integer root into a Generator."""
    if isinstance(rng, Generator):
        return rng
    if isinstance(rng, Seed):
        return rng.generator()
    return Seed(int(rng)).generator()
