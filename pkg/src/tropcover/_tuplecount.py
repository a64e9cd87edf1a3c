"""Pure-Python tuple-counting kernel.

Counts tuples (a_1,b_1,..,a_h,b_h, s_1,..,s_r, t_1,..,t_s) in S_d with

    [a_1,b_1]...[a_h,b_h] * s_1...s_r * t_1...t_s == id,

where s_j runs over a prescribed conjugacy class and t_k over
transpositions, optionally restricted to tuples whose entries generate a
transitive subgroup.  This is the hot loop of the Hurwitz brute-force
oracle; tropcover._tuplecount_c is the compiled twin with the same
algorithm, and tropcover.kernel picks whichever is importable.

For d <= TABLE_LIMIT the group S_d is indexed once and products become
table lookups; larger degrees (normally rejected by the resource guard
upstream) fall back to direct tuple composition.

Slot layout and pruning are shared with the compiled twin:

* slots are [commutator]*h + [class_j for j] + [transposition]*s,
* the last class/transposition slot is forced from the running product,
* a partial product is abandoned once the remaining transpositions
  cannot reach the identity (distance d - #cycles and parity).
"""

from __future__ import annotations

import itertools
from array import array
from functools import lru_cache

TABLE_LIMIT = 6

# slot kinds
COMM = 0
CLASS = 1
TRANS = 2

# forced-last modes
LAST_NONE = 0
LAST_TRANS = 1
LAST_CLASS = 2


def _compose(p, q):
    return tuple(p[q[i]] for i in range(len(q)))


def _inverse(p):
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def _ncycles(p):
    seen = [False] * len(p)
    n = 0
    for i in range(len(p)):
        if not seen[i]:
            n += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
    return n


@lru_cache(maxsize=8)
def group_tables(d):
    """Index S_d lexicographically and precompute product/inverse tables.

    Returns (perms, index, mul, inv, ncyc) where mul is the flat n*n
    array with mul[a*n+b] = index of perms[a] o perms[b] ("b acts
    first"), and ncyc[i] is the number of cycles of perms[i].
    """
    perms = sorted(itertools.permutations(range(d)))
    n = len(perms)
    index = {p: i for i, p in enumerate(perms)}
    mul = array("i", [0]) * (n * n)
    for a, p in enumerate(perms):
        base = a * n
        for b, q in enumerate(perms):
            mul[base + b] = index[_compose(p, q)]
    inv = array("i", (index[_inverse(p)] for p in perms))
    ncyc = array("b", (_ncycles(p) for p in perms))
    return perms, index, mul, inv, ncyc


def _build_slots(d, h, class_lists, n_transpositions):
    """Return (slots, last_mode) with each slot as (kind, contrib, gen2).

    contrib[i] is the index contributed to the running product by the
    i-th choice; for commutator slots contrib is the commutator [a,b] and
    the generating pair is (gen1, gen2) = (a, b); for the others the
    generator is the contribution itself (gen2 = -1).  The final
    class/transposition slot is dropped and forced from the prefix.
    """
    perms, index, mul, inv, ncyc = group_tables(d)
    n = len(perms)
    slots = []
    if h:
        comm = array("i", [0]) * (n * n)
        g1 = array("i", [0]) * (n * n)
        g2 = array("i", [0]) * (n * n)
        k = 0
        for a in range(n):
            for b in range(n):
                ab = mul[a * n + b]
                comm[k] = mul[mul[ab * n + inv[a]] * n + inv[b]]
                g1[k] = a
                g2[k] = b
                k += 1
        for _ in range(h):
            slots.append((COMM, comm, g1, g2))
    for elems in class_lists:
        contrib = array("i", (index[p] for p in elems))
        slots.append((CLASS, contrib, contrib, None))
    if n_transpositions:
        tr = array(
            "i", (i for i in range(n) if ncyc[i] == d - 1)
        )  # cycle type (2,1^{d-2})
        for _ in range(n_transpositions):
            slots.append((TRANS, tr, tr, None))

    last_mode = LAST_NONE
    if n_transpositions >= 1:
        slots.pop()
        last_mode = LAST_TRANS
    elif class_lists:
        slots.pop()
        last_mode = LAST_CLASS
    return slots, last_mode


def _orbit_size(d, perms, gens):
    orbit = 1 << 0
    stack = [0]
    size = 1
    while stack:
        x = stack.pop()
        for g in gens:
            y = perms[g][x]
            if not (orbit >> y) & 1:
                orbit |= 1 << y
                size += 1
                stack.append(y)
    return size


def _count_table(d, h, class_lists, n_transpositions, transitive, first_slot_range=None):
    perms, index, mul, inv, ncyc = group_tables(d)
    n = len(perms)
    id_idx = index[tuple(range(d))]
    slots, last_mode = _build_slots(d, h, class_lists, n_transpositions)

    if last_mode == LAST_CLASS:
        member = bytearray(n)
        for p in class_lists[-1]:
            member[index[p]] = 1
    else:
        member = None

    # per-level: are all enumerated slots from here on transpositions, and
    # how many transpositions (incl. the forced one) remain from here on
    L = len(slots)
    trans_left = [0] * (L + 1)
    all_trans = [True] * (L + 1)
    trans_left[L] = 1 if last_mode == LAST_TRANS else 0
    for lev in range(L - 1, -1, -1):
        kind = slots[lev][0]
        trans_left[lev] = trans_left[lev + 1] + (1 if kind == TRANS else 0)
        all_trans[lev] = all_trans[lev + 1] and kind == TRANS

    def feasible(lev, prefix):
        if not all_trans[lev]:
            return True
        need = d - ncyc[prefix]
        t = trans_left[lev]
        return t >= need and (t - need) % 2 == 0

    def finish(prefix, gens):
        if last_mode == LAST_TRANS:
            last = inv[prefix]
            if ncyc[last] != d - 1:
                return 0
        elif last_mode == LAST_CLASS:
            last = inv[prefix]
            if not member[last]:
                return 0
        else:
            if prefix != id_idx:
                return 0
            last = None
        if transitive:
            all_gens = gens if last is None else gens + [last]
            if _orbit_size(d, perms, all_gens) != d:
                return 0
        return 1

    gens = []

    def dfs(lev, prefix):
        if lev == L:
            return finish(prefix, gens)
        if not feasible(lev, prefix):
            return 0
        kind, contrib, g1, g2 = slots[lev]
        base = prefix * n
        total = 0
        rng = range(len(contrib))
        if lev == 0 and first_slot_range is not None:
            rng = range(first_slot_range[0], min(first_slot_range[1], len(contrib)))
        if transitive:
            for i in rng:
                gens.append(g1[i])
                if g2 is not None:
                    gens.append(g2[i])
                total += dfs(lev + 1, mul[base + contrib[i]])
                if g2 is not None:
                    gens.pop()
                gens.pop()
        else:
            for i in rng:
                total += dfs(lev + 1, mul[base + contrib[i]])
        return total

    if L == 0:
        return finish(id_idx, [])
    return dfs(0, id_idx)


def _count_direct(d, h, class_lists, n_transpositions, transitive):
    """Tuple-composition fallback for d > TABLE_LIMIT."""
    ident = tuple(range(d))
    transpositions = []
    for i in range(d):
        for j in range(i + 1, d):
            img = list(ident)
            img[i], img[j] = img[j], img[i]
            transpositions.append(tuple(img))

    slots = []
    if h:
        pairs = [
            (_compose(_compose(_compose(a, b), _inverse(a)), _inverse(b)), a, b)
            for a in itertools.permutations(range(d))
            for b in itertools.permutations(range(d))
        ]
        for _ in range(h):
            slots.append((COMM, pairs))
    for elems in class_lists:
        slots.append((CLASS, [(p, p, None) for p in elems]))
    for _ in range(n_transpositions):
        slots.append((TRANS, [(p, p, None) for p in transpositions]))

    last_mode = LAST_NONE
    last_class = None
    if n_transpositions >= 1:
        slots.pop()
        last_mode = LAST_TRANS
    elif class_lists:
        slots.pop()
        last_mode = LAST_CLASS
        last_class = set(class_lists[-1])

    L = len(slots)
    trans_left = [0] * (L + 1)
    all_trans = [True] * (L + 1)
    trans_left[L] = 1 if last_mode == LAST_TRANS else 0
    for lev in range(L - 1, -1, -1):
        kind = slots[lev][0]
        trans_left[lev] = trans_left[lev + 1] + (1 if kind == TRANS else 0)
        all_trans[lev] = all_trans[lev + 1] and kind == TRANS

    def is_transposition(p):
        return _ncycles(p) == d - 1

    def finish(prefix, gens):
        if last_mode == LAST_TRANS:
            last = _inverse(prefix)
            if not is_transposition(last):
                return 0
        elif last_mode == LAST_CLASS:
            last = _inverse(prefix)
            if last not in last_class:
                return 0
        else:
            if prefix != ident:
                return 0
            last = None
        if transitive:
            all_gens = list(gens) + ([last] if last is not None else [])
            orbit = {0}
            stack = [0]
            while stack:
                x = stack.pop()
                for g in all_gens:
                    y = g[x]
                    if y not in orbit:
                        orbit.add(y)
                        stack.append(y)
            if len(orbit) != d:
                return 0
        return 1

    gens = []

    def dfs(lev, prefix):
        if lev == L:
            return finish(prefix, gens)
        if all_trans[lev]:
            need = d - _ncycles(prefix)
            t = trans_left[lev]
            if t < need or (t - need) % 2:
                return 0
        total = 0
        for contrib, a, b in slots[lev][1]:
            gens.append(a)
            if b is not None:
                gens.append(b)
            total += dfs(lev + 1, _compose(prefix, contrib))
            if b is not None:
                gens.pop()
            gens.pop()
        return total

    if L == 0:
        return finish(ident, [])
    return dfs(0, ident)


def first_slot_size(d, h, class_lists, n_transpositions):
    """Number of choices in the first enumerated slot (for job chunking)."""
    slots, _ = _build_slots(d, h, class_lists, n_transpositions)
    if not slots:
        return 0
    return len(slots[0][1])


def raw_tuple_count(d, h, class_lists, n_transpositions, transitive, first_slot_range=None):
    if d < 1:
        raise ValueError("degree must be >= 1")
    class_lists = [list(c) for c in class_lists]
    if d <= TABLE_LIMIT:
        return _count_table(
            d, h, class_lists, n_transpositions, transitive, first_slot_range
        )
    if first_slot_range is not None:
        raise ValueError("chunked counting only supported in table mode")
    return _count_direct(d, h, class_lists, n_transpositions, transitive)
