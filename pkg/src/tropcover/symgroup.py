"""Partitions, permutations and monodromy-tuple counts over S_d.

Permutations act on the points 0..d-1 and are stored in word form: the
tuple ``p`` represents the map ``i -> p[i]``.  The composition order is
fixed once and for all as "right acts first":

    compose(p, q)[i] == p[q[i]]

so a relation written multiplicatively as ``x1 x2 ... xk = id`` means the
word obtained by folding with ``compose`` left to right is the identity.
External serialization (JSON, CLI) uses 1-based one-line image arrays to
match the usual convention for points 1..d.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .kernel import raw_tuple_count


class Partition:
    """A weakly decreasing sequence of positive integers.

    The empty partition of 0 is allowed only when constructed explicitly
    from an empty sequence.
    """

    __slots__ = ("parts",)

    def __init__(self, parts):
        parts = tuple(int(a) for a in parts)
        if any(a < 1 for a in parts):
            raise ValueError("partition parts must be positive, got %r" % (parts,))
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            parts = tuple(sorted(parts, reverse=True))
        self.parts = parts

    @property
    def size(self):
        return sum(self.parts)

    @property
    def length(self):
        return len(self.parts)

    def multiplicities(self):
        """Map part value -> number of occurrences."""
        mult = {}
        for a in self.parts:
            mult[a] = mult.get(a, 0) + 1
        return mult

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __eq__(self, other):
        if isinstance(other, Partition):
            return self.parts == other.parts
        if isinstance(other, tuple):
            return self.parts == other
        return NotImplemented

    def __lt__(self, other):
        return self.parts < (other.parts if isinstance(other, Partition) else tuple(other))

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return "Partition(%r)" % (self.parts,)

    def to_json(self):
        return list(self.parts)

    @classmethod
    def from_json(cls, data):
        return cls(data)


def partitions_of(n, max_part=None, max_length=None):
    """Yield all partitions of n as Partition objects, largest part first."""
    if n < 0:
        return
    if n == 0:
        yield Partition(())
        return
    top = n if max_part is None else min(n, max_part)

    def rec(remaining, cap, prefix):
        if remaining == 0:
            yield tuple(prefix)
            return
        if max_length is not None and len(prefix) >= max_length:
            return
        for a in range(min(cap, remaining), 0, -1):
            prefix.append(a)
            yield from rec(remaining - a, a, prefix)
            prefix.pop()

    for parts in rec(n, top, []):
        yield Partition(parts)


def simple_profile(d):
    """The simple-ramification profile (2, 1^{d-2}) for degree d >= 2."""
    if d < 2:
        raise ValueError("simple ramification needs degree >= 2")
    return Partition((2,) + (1,) * (d - 2))


# ---------------------------------------------------------------------------
# permutations in word form


def identity(d):
    return tuple(range(d))


def is_identity(p):
    return all(p[i] == i for i in range(len(p)))


def compose(p, q):
    """The permutation "apply q first, then p"."""
    if len(p) != len(q):
        raise ValueError("degree mismatch: %d vs %d" % (len(p), len(q)))
    return tuple(p[q[i]] for i in range(len(q)))


def inverse(p):
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def transposition(d, i, j):
    img = list(range(d))
    img[i], img[j] = img[j], img[i]
    return tuple(img)


def all_transpositions(d):
    return [transposition(d, i, j) for i in range(d) for j in range(i + 1, d)]


def from_cycles(d, cycles):
    """Permutation of degree d from disjoint cycles of 0-based points."""
    img = list(range(d))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return tuple(img)


def cycle_type(p):
    """Cycle lengths of p including fixed points, as a Partition."""
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if seen[i]:
            continue
        n = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            n += 1
        lengths.append(n)
    return Partition(lengths)


def conjugacy_class_size(lam):
    """|C_lam| = d!/z_lam with z_lam = prod_k k^{m_k} m_k!."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    z = 1
    for k, m in lam.multiplicities().items():
        z *= k**m * factorial(m)
    return factorial(lam.size) // z


def permutations_of_type(lam):
    """Yield each permutation in S_d with cycle type lam exactly once.

    Cycles are filled canonically: the smallest unplaced point opens a new
    cycle, and only distinct remaining cycle lengths are tried for it, so
    no permutation is produced twice.
    """
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    d = lam.size

    def rec(remaining_lengths, unused, acc):
        if not remaining_lengths:
            yield from_cycles(d, acc)
            return
        start = unused[0]
        rest = unused[1:]
        for length in sorted(set(remaining_lengths), reverse=True):
            next_remaining = list(remaining_lengths)
            next_remaining.remove(length)
            for tail in itertools.permutations(rest, length - 1):
                cyc = (start,) + tail
                left = [x for x in rest if x not in tail]
                yield from rec(next_remaining, left, acc + [cyc])

    yield from rec(list(lam.parts), list(range(d)), [])


def is_transitive(perms, d):
    """Whether the group generated by perms acts transitively on 0..d-1."""
    if d <= 1:
        return True
    if not perms:
        return False
    orbit = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for p in perms:
            y = p[x]
            if y not in orbit:
                orbit.add(y)
                frontier.append(y)
    return len(orbit) == d


def marking_factor(lam):
    """Number of ways to label the preimage points of a branch point.

    Points with equal ramification index are interchangeable, so this is
    prod_k m_k(lam)!.
    """
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    out = 1
    for m in lam.multiplicities().values():
        out *= factorial(m)
    return out


def orderings_of_parts(lam):
    """Labelings of the parts of lam consistent with the sorted profile.

    Equal parts may be ordered among themselves, giving prod_k m_k!.  This
    is the parts_labeled convention factor (one label per part).
    """
    return marking_factor(lam)


# ---------------------------------------------------------------------------
# Murnaghan-Nakayama characters and the Frobenius count


def _beta_set(lam):
    # first-column hook lengths: lam_i + (L - 1 - i)
    L = len(lam)
    return tuple(lam[i] + (L - 1 - i) for i in range(L))


def _partition_from_betas(betas):
    betas = sorted(betas, reverse=True)
    L = len(betas)
    parts = [betas[i] - (L - 1 - i) for i in range(L)]
    return tuple(a for a in parts if a > 0)


@lru_cache(maxsize=None)
def _mn(lam_parts, mu_parts):
    if not mu_parts:
        return 1 if not lam_parts else 0
    k = mu_parts[0]
    betas = _beta_set(lam_parts)
    beta_set = set(betas)
    total = 0
    for b in betas:
        if b >= k and (b - k) not in beta_set:
            ht = sum(1 for c in betas if b - k < c < b)
            new = tuple(x if x != b else b - k for x in betas)
            total += (-1) ** ht * _mn(_partition_from_betas(new), mu_parts[1:])
    return total


def mn_character(lam, mu):
    """Irreducible character chi^lam evaluated on the class mu."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    mu = mu if isinstance(mu, Partition) else Partition(mu)
    if lam.size != mu.size:
        raise ValueError("partition sizes differ: %d vs %d" % (lam.size, mu.size))
    return _mn(lam.parts, mu.parts)


def character_dimension(lam):
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    return mn_character(lam, Partition((1,) * lam.size))


def frobenius_tuple_count(h, profiles, d=None):
    """Number of tuples (a_1,b_1,..,a_h,b_h, s_1,..,s_r) in S_d with
    prod [a_i,b_i] prod s_j = id and cycle_type(s_j) = profiles[j], with
    no transitivity requirement, by the Frobenius character sum.
    """
    profiles = [p if isinstance(p, Partition) else Partition(p) for p in profiles]
    if d is None:
        if not profiles:
            raise ValueError("degree required when no profiles are given")
        d = profiles[0].size
    if any(p.size != d for p in profiles):
        raise ValueError("profiles must all partition %d" % d)
    if h < 0:
        raise ValueError("h must be nonnegative")
    order = factorial(d)
    total = Fraction(0)
    for lam in partitions_of(d):
        f = character_dimension(lam)
        term = Fraction(f * f, order) * Fraction(order, f) ** (2 * h)
        for mu in profiles:
            term *= Fraction(conjugacy_class_size(mu) * mn_character(lam, mu), f)
        total += term
    assert total.denominator == 1, "Frobenius sum must be an integer"
    return int(total)


def brute_tuple_count(h, profiles, n_transpositions=0, d=None, transitive=False, jobs=1):
    """Count tuples (a_i,b_i, s_j, t_k) with the product relation directly.

    s_j run over the conjugacy classes of `profiles`, t_k over
    transpositions; the product prod [a_i,b_i] prod s_j prod t_k must be
    the identity.  With transitive=True only tuples generating a
    transitive subgroup are counted.  This is the enumeration kernel used
    by the Hurwitz brute-force oracle.
    """
    profiles = [p if isinstance(p, Partition) else Partition(p) for p in profiles]
    if d is None:
        if not profiles:
            raise ValueError("degree required when no profiles are given")
        d = profiles[0].size
    if any(p.size != d for p in profiles):
        raise ValueError("profiles must all partition %d" % d)
    class_lists = [list(permutations_of_type(p)) for p in profiles]
    return raw_tuple_count(d, h, class_lists, n_transpositions, transitive, jobs=jobs)


def permutation_to_json(p):
    return [i + 1 for i in p]


def permutation_from_json(data):
    p = tuple(int(i) - 1 for i in data)
    if sorted(p) != list(range(len(p))):
        raise ValueError("not a permutation: %r" % (data,))
    return p
