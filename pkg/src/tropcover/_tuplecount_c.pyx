# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled twin of tropcover._tuplecount.

Same algorithm, same slot layout, same pruning; the group tables and
slot construction are reused from the pure module, only the search loop
is compiled.  Degrees above the table limit fall back to the pure
direct-composition path.
"""

from array import array as _array

from . import _tuplecount as _py

TABLE_LIMIT = _py.TABLE_LIMIT


cdef class _Search:
    cdef int n, d, L, last_mode, id_idx
    cdef bint transitive
    cdef int[::1] mul
    cdef int[::1] inv
    cdef signed char[::1] ncyc
    cdef int[::1] perms
    cdef signed char[::1] member
    cdef int[::1] contrib
    cdef int[::1] gen1
    cdef int[::1] gen2
    cdef int[::1] offset
    cdef int[::1] length
    cdef int[::1] trans_left
    cdef signed char[::1] all_trans
    cdef int[::1] genpath  # two generator indices per level (-1 absent)

    cdef long long run(self, int first_lo, int first_hi):
        if self.L == 0:
            return self.leaf(self.id_idx, 0)
        if not self.feasible(0, self.id_idx):
            return 0
        return self.dfs(0, self.id_idx, first_lo, first_hi)

    cdef bint feasible(self, int level, int prefix):
        cdef int need, t
        if not self.all_trans[level]:
            return True
        need = self.d - self.ncyc[prefix]
        t = self.trans_left[level]
        return t >= need and (t - need) % 2 == 0

    cdef long long leaf(self, int prefix, int n_gens):
        cdef int last = -1
        if self.last_mode == 1:  # forced transposition
            last = self.inv[prefix]
            if self.ncyc[last] != self.d - 1:
                return 0
        elif self.last_mode == 2:  # forced class element
            last = self.inv[prefix]
            if not self.member[last]:
                return 0
        else:
            if prefix != self.id_idx:
                return 0
        if not self.transitive:
            return 1
        return 1 if self.orbit_full(n_gens, last) else 0

    cdef bint orbit_full(self, int n_gens, int last):
        cdef int stack[8]
        cdef unsigned int seen = 1
        cdef int top = 1, size = 1, x, y, i, g
        stack[0] = 0
        while top:
            top -= 1
            x = stack[top]
            for i in range(n_gens):
                g = self.genpath[i]
                if g < 0:
                    continue
                y = self.perms[g * self.d + x]
                if not (seen >> y) & 1:
                    seen |= 1u << y
                    size += 1
                    stack[top] = y
                    top += 1
            if last >= 0:
                y = self.perms[last * self.d + x]
                if not (seen >> y) & 1:
                    seen |= 1u << y
                    size += 1
                    stack[top] = y
                    top += 1
        return size == self.d

    cdef long long dfs(self, int level, int prefix, int lo, int hi):
        cdef long long total = 0
        cdef int base = prefix * self.n
        cdef int off = self.offset[level]
        cdef int i, nxt
        for i in range(lo, hi):
            nxt = self.mul[base + self.contrib[off + i]]
            self.genpath[2 * level] = self.gen1[off + i]
            self.genpath[2 * level + 1] = self.gen2[off + i]
            if level + 1 == self.L:
                total += self.leaf(nxt, 2 * self.L)
            elif self.feasible(level + 1, nxt):
                total += self.dfs(level + 1, nxt, 0, self.length[level + 1])
        return total


def _count_table(int d, h, class_lists, n_transpositions, transitive, first_slot_range):
    perms, index, mul, inv, ncyc = _py.group_tables(d)
    n = len(perms)
    slots, last_mode = _py._build_slots(d, h, class_lists, n_transpositions)

    member = bytearray(n)
    if last_mode == _py.LAST_CLASS:
        # explicit positive index: wraparound is disabled module-wide
        for p in class_lists[len(class_lists) - 1]:
            member[index[p]] = 1

    L = len(slots)
    trans_left = [0] * (L + 1)
    all_trans = [1] * (L + 1)
    trans_left[L] = 1 if last_mode == _py.LAST_TRANS else 0
    for lev in range(L - 1, -1, -1):
        kind = slots[lev][0]
        trans_left[lev] = trans_left[lev + 1] + (1 if kind == _py.TRANS else 0)
        all_trans[lev] = 1 if (all_trans[lev + 1] and kind == _py.TRANS) else 0

    contrib = _array("i")
    gen1 = _array("i")
    gen2 = _array("i")
    offset = _array("i")
    length = _array("i")
    for kind, c, a, b in slots:
        offset.append(len(contrib))
        length.append(len(c))
        contrib.extend(c)
        gen1.extend(a)
        gen2.extend(b if b is not None else _array("i", [-1]) * len(c))

    perms_flat = _array("i", (x for p in perms for x in p))

    cdef _Search s = _Search()
    s.n = n
    s.d = d
    s.L = L
    s.last_mode = last_mode
    s.id_idx = index[tuple(range(d))]
    s.transitive = bool(transitive)
    s.mul = mul
    s.inv = inv
    s.ncyc = ncyc
    s.perms = perms_flat
    s.member = _array("b", member) if member else _array("b", [0])
    s.contrib = contrib if len(contrib) else _array("i", [0])
    s.gen1 = gen1 if len(gen1) else _array("i", [0])
    s.gen2 = gen2 if len(gen2) else _array("i", [0])
    s.offset = offset if len(offset) else _array("i", [0])
    s.length = length if len(length) else _array("i", [0])
    s.trans_left = _array("i", trans_left)
    s.all_trans = _array("b", all_trans)
    s.genpath = _array("i", [-1]) * (2 * L + 2)

    if L == 0:
        lo, hi = 0, 0
    else:
        lo, hi = 0, length[0]
        if first_slot_range is not None:
            lo = max(lo, first_slot_range[0])
            hi = min(hi, first_slot_range[1])
    return int(s.run(lo, hi))


def raw_tuple_count(d, h, class_lists, n_transpositions, transitive, first_slot_range=None):
    if d < 1:
        raise ValueError("degree must be >= 1")
    class_lists = [list(c) for c in class_lists]
    if d > TABLE_LIMIT:
        if first_slot_range is not None:
            raise ValueError("chunked counting only supported in table mode")
        return _py._count_direct(d, h, class_lists, n_transpositions, transitive)
    return _count_table(d, h, class_lists, n_transpositions, transitive, first_slot_range)
