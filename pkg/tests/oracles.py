"""Independent oracles the tests check the package against.

Everything here is deliberately written from first principles, by a
different route than the package: brute-force enumeration, the raw
freeness-identity recursion, direct definition transcription, and plain
quadrature on the un-substituted densities. Keep it that way; these must
stay independent of the code paths they certify.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np
from scipy.integrate import quad


# ---------------------------------------------------------------------------
# partitions


def brute_partitions(p):
    """All set partitions of range(p) as frozensets of frozensets."""
    if p == 0:
        return [frozenset()]
    out = []
    for smaller in brute_partitions(p - 1):
        last = p - 1
        smaller = list(smaller)
        for k in range(len(smaller)):
            blocks = [set(b) for b in smaller]
            blocks[k].add(last)
            out.append(frozenset(frozenset(b) for b in blocks))
        out.append(frozenset(list(smaller) + [frozenset([last])]))
    return out


def brute_pairings(p):
    """All perfect matchings of range(p) as frozensets of 2-frozensets."""
    if p % 2 == 1:
        return []
    if p == 0:
        return [frozenset()]

    def rec(elems):
        if not elems:
            return [frozenset()]
        first = elems[0]
        out = []
        for k in range(1, len(elems)):
            pair = frozenset((first, elems[k]))
            rest = elems[1:k] + elems[k + 1 :]
            for sub in rec(rest):
                out.append(sub | {pair})
        return out

    return rec(tuple(range(p)))


def crossing_by_definition(blocks):
    """Direct transcription: blocks cross iff a<b<c<d with a,c / b,d split."""
    blocks = [sorted(b) for b in blocks]
    for i in range(len(blocks)):
        for j in range(len(blocks)):
            if i == j:
                continue
            for a in blocks[i]:
                for c in blocks[i]:
                    for b in blocks[j]:
                        for dd in blocks[j]:
                            if a < b < c < dd:
                                return True
    return False


# ---------------------------------------------------------------------------
# free probability: the alternating-centering expansion
#
# tau of a word in free variables computed only from the freeness identity
# tau((x_1 - tau(x_1)) ... (x_m - tau(x_m))) = 0 for alternating colors,
# plus the marginal moments. Words are tuples of (color, power) syllables
# with adjacent colors distinct.


def _merge(syllables):
    out = []
    for color, power in syllables:
        if out and out[-1][0] == color:
            out[-1] = (color, out[-1][1] + power)
        else:
            out.append((color, power))
    return tuple(out)


def free_word_moment_oracle(colors, moments_by_color):
    """tau(a_{c_1} ... a_{c_p}) via the centering expansion of freeness."""
    word = _merge([(c, 1) for c in colors])
    moments = tuple(tuple(m) for m in moments_by_color)

    @lru_cache(maxsize=None)
    def tau(w):
        if not w:
            return 1.0
        if len(w) == 1:
            color, power = w[0]
            return moments[color][power - 1]
        m = len(w)
        marginal = [moments[c][k - 1] for c, k in w]
        total = 0.0
        # 0 = sum over subsets S of prod_{i in S} (-tau(x_i)) tau(word \ S),
        # with S = empty giving tau(w); solve for tau(w).
        for mask in range(1, 1 << m):
            coeff = 1.0
            keep = []
            for i in range(m):
                if mask >> i & 1:
                    coeff *= -marginal[i]
                else:
                    keep.append(w[i])
            total += coeff * tau(_merge(keep))
        return -total

    return tau(word)


def rademacher_moments(order=10):
    return tuple(0.0 if p % 2 else 1.0 for p in range(1, order + 1))


def semicircle_moments(order=10):
    def catalan(k):
        from math import comb

        return comb(2 * k, k) // (k + 1)

    return tuple(0.0 if p % 2 else float(catalan(p // 2)) for p in range(1, order + 1))


def tensor_convolution_moment_oracle(p, d, moments_by_color, dilated=True):
    """Brute force over all d^p index tuples of squared word moments."""
    total = 0.0
    for tup in product(range(d), repeat=p):
        tau = free_word_moment_oracle(tup, moments_by_color)
        total += tau * tau
    if dilated:
        total /= float(d) ** (p / 2.0)
    return total


# ---------------------------------------------------------------------------
# quadrature on the raw densities (no substitution)


def raw_integral(density, lo, hi, moment=0):
    value, _ = quad(lambda x: x**moment * density(x), lo, hi, limit=400)
    return value


# ---------------------------------------------------------------------------
# random matrices


def random_complex(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng, n):
    a = random_complex(rng, n, n)
    return (a + a.conj().T) / 2.0


def dense_kron_apply(a, b, v):
    """Reference (A (x) B) v via the explicit dense Kronecker matrix."""
    return np.kron(a, b) @ v
