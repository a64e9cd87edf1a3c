"""Enumeration of tropical admissible cover types over a fixed target.

The search places target vertices in breadth-first order.  At each
vertex it chooses the multiset of source vertices above it: a local
degree and one partition of it per tangent direction, with leg
directions forced to reproduce the prescribed profiles and back edges
forced to match the expansions already placed on the other side.  Edge
gluings are enumerated as contingency tables between equal-expansion
dart multisets.  Source vertex genera are determined by local
Riemann-Hurwitz (never searched); types needing negative genus, and
types with a vanishing local Hurwitz number, are pruned.

The preimages of all branch points are marked: each enumerated cover
carries labeled source legs ("<target leg>.<part index>"), and two
covers differing by which source vertex holds an equal part label are
different types.  Deduplication is by canonical key, so the output is
deterministic and duplicate-free.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .graphs import Graph, caterpillar_target, edge_dart, genus, trivalent_targets
from .hurwitz import (
    DEFAULT_CONVENTION,
    InfeasibleProblem,
    ResourceGuard,
    local_hurwitz,
    simple_branch_count,
)
from .symgroup import Partition, partitions_of, simple_profile
from .covers import (
    CoverType,
    automorphism_groups,
    bbm_multiplicity,
    cover_canonical_key,
    dilation_factor,
    edge_branch_factor,
    edge_dilation,
    validate,
    vertex_hurwitz_product,
    weight,
)


def _bfs_vertex_order(graph):
    verts = graph.vertices
    order = [verts[0]]
    seen = {verts[0]}
    queue = [verts[0]]
    while queue:
        v = queue.pop(0)
        for e in graph.edges:
            u, w = graph.edge_ends[e]
            for a, b in ((u, w), (w, u)):
                if a == v and b not in seen:
                    seen.add(b)
                    order.append(b)
                    queue.append(b)
    return order


def _distribute_parts(parts, sums):
    """All ways to split the multiset `parts` into blocks with the given
    sums; equal parts are placed in nondecreasing block order so each
    split is produced once.  Yields tuples of part-tuples."""

    parts = sorted(parts, reverse=True)

    def rec(i, min_block, blocks, remaining):
        if i == len(parts):
            yield tuple(tuple(sorted(b, reverse=True)) for b in blocks)
            return
        part = parts[i]
        start = min_block if i > 0 and parts[i - 1] == part else 0
        for j in range(start, len(blocks)):
            if remaining[j] >= part:
                blocks[j].append(part)
                remaining[j] -= part
                yield from rec(i + 1, j, blocks, remaining)
                remaining[j] += part
                blocks[j].pop()

    if sum(parts) != sum(sums):
        return
    yield from rec(0, 0, [[] for _ in sums], list(sums))


def _matchings(left, right):
    """Contingency tables between two equal multisets of (slot, value)
    entries: yields multisets of (left slot, right slot, value) triples
    covering every entry exactly once."""
    by_value = {}
    for slot, x in left:
        counts = by_value.setdefault(x, [{}, {}])[0]
        counts[slot] = counts.get(slot, 0) + 1
    for slot, x in right:
        counts = by_value.setdefault(x, [{}, {}])[1]
        counts[slot] = counts.get(slot, 0) + 1

    per_value = []
    for x, (lc, rc) in sorted(by_value.items()):
        if sum(lc.values()) != sum(rc.values()):
            return
        lslots = sorted(lc)
        rslots = sorted(rc)

        def tables(i, rows, rrem, lc=lc, rc=rc, lslots=lslots, rslots=rslots):
            if i == len(lslots):
                yield list(rows)
                return
            a = lslots[i]
            need = lc[a]

            def comps(j, left_need, row):
                if j == len(rslots):
                    if left_need == 0:
                        yield list(row)
                    return
                cap = min(left_need, rrem[j])
                for m in range(cap, -1, -1):
                    rrem[j] -= m
                    row.append(m)
                    yield from comps(j + 1, left_need - m, row)
                    row.pop()
                    rrem[j] += m

            for row in comps(0, need, []):
                rows.append((a, row))
                yield from tables(i + 1, rows, rrem)
                rows.pop()

        options = []
        for tab in tables(0, [], [rc[b] for b in rslots]):
            triples = []
            for a, row in tab:
                for j, m in enumerate(row):
                    triples.extend([(a, rslots[j], x)] * m)
            options.append(triples)
        per_value.append(options)

    for combo in itertools.product(*per_value):
        yield [t for triples in combo for t in triples]


def _slot_genus(k, h_target, profiles):
    """Local RH: 2-2g = k(2-2h) - sum over darts (m-1); None if the genus
    is not a nonnegative integer."""
    defect = sum(k - len(p) for p in profiles)
    num = 2 - k * (2 - 2 * h_target) + defect
    if num % 2:
        return None
    g = num // 2
    return g if g >= 0 else None


class _Enumerator:
    def __init__(
        self,
        target,
        d,
        g,
        leg_profiles,
        convention=DEFAULT_CONVENTION,
        cache=None,
        prune=True,
        max_degree=6,
    ):
        if d < 1:
            raise InfeasibleProblem("degree must be >= 1")
        if d > max_degree:
            raise ResourceGuard("degree %d exceeds the guard (%d)" % (d, max_degree))
        if not target.is_connected():
            raise ValueError("target must be connected")
        self.target = target
        self.d = d
        self.g = g
        self.convention = convention
        self.cache = cache
        self.prune = prune
        self.leg_profiles = {
            str(l): (p if isinstance(p, Partition) else Partition(p))
            for l, p in leg_profiles.items()
        }
        for l in target.legs:
            if l not in self.leg_profiles:
                raise ValueError("no profile for target leg %r" % l)
            if self.leg_profiles[l].size != d:
                raise InfeasibleProblem(
                    "profile %r on leg %r does not partition %d"
                    % (self.leg_profiles[l].parts, l, d)
                )
        self.order = _bfs_vertex_order(target)
        self.results = []

    # -- fiber configurations ------------------------------------------------

    def _fiber_configs(self, v, back_constraints):
        """Configurations above v: tuples of (k, {dart: parts tuple}).

        back_constraints: {dart: multiset of expansions} for directions
        already fixed from the other side; legs are constrained by their
        profiles; everything else is free.
        """
        target = self.target
        dirs = target.darts_at(v)
        constrained = {}
        for t in dirs:
            if t[0] == "l":
                constrained[t] = tuple(self.leg_profiles[t[1]].parts)
            elif t in back_constraints:
                constrained[t] = tuple(sorted(back_constraints[t], reverse=True))
        free_dirs = [t for t in dirs if t not in constrained]
        h_v = target.genus_of[v]

        configs = set()
        for ks in partitions_of(self.d):
            ks = list(ks.parts)
            options_per_dir = []
            ok = True
            for t in dirs:
                if t in constrained:
                    opts = list(_distribute_parts(constrained[t], ks))
                    if not opts:
                        ok = False
                        break
                    options_per_dir.append((t, opts))
            if not ok:
                continue
            free_opts = []
            for t in free_dirs:
                per_slot = [
                    [tuple(p.parts) for p in partitions_of(k)] for k in ks
                ]
                free_opts.append((t, [list(c) for c in itertools.product(*per_slot)]))
            for combo in itertools.product(
                *(opts for _, opts in options_per_dir + free_opts)
            ):
                slots = []
                feasible = True
                for i, k in enumerate(ks):
                    spec = {}
                    for (t, _), choice in zip(options_per_dir + free_opts, combo):
                        spec[t] = tuple(choice[i])
                    gw = _slot_genus(k, h_v, list(spec.values()))
                    if gw is None or (self.prune and self.g - gw < 0):
                        feasible = False
                        break
                    if self.prune and gw > self.g:
                        feasible = False
                        break
                    if self.prune:
                        try:
                            hval = local_hurwitz(
                                gw,
                                h_v,
                                k,
                                [Partition(spec[t]) for t in dirs],
                                self.convention,
                                cache=self.cache,
                            )
                        except InfeasibleProblem:
                            feasible = False
                            break
                        if hval == 0:
                            feasible = False
                            break
                    slots.append((k, gw, tuple(sorted(spec.items()))))
                if feasible:
                    configs.add(tuple(sorted(slots, reverse=True)))
        return sorted(configs, reverse=True)

    # -- search ----------------------------------------------------------------

    def run(self):
        self._place(0, {}, [], itertools.count())
        return self.results

    def _place(self, idx, fibers, glued, counter):
        target = self.target
        if idx == len(self.order):
            self._emit(fibers, glued)
            return
        v = self.order[idx]
        placed = set(self.order[:idx])

        back_edges = []
        loops = []
        for e in target.edges:
            u, w = target.edge_ends[e]
            if u == v and w == v:
                loops.append(e)
            elif u == v and w in placed:
                back_edges.append((e, 1, w))  # our side is end 0
            elif w == v and u in placed:
                back_edges.append((e, 0, u))  # our side is end 1

        back_constraints = {}
        for e, other_end, u in back_edges:
            our_dart = edge_dart(e, 1 - other_end)
            other_dart = edge_dart(e, other_end)
            exps = []
            for slot_id, k, gw, spec in fibers[u]:
                exps.extend(dict(spec)[other_dart])
            back_constraints[our_dart] = exps

        for config in self._fiber_configs(v, back_constraints):
            slots = []
            for k, gw, spec in config:
                slots.append((next(counter), k, gw, spec))
            new_fibers = dict(fibers)
            new_fibers[v] = slots

            glue_tasks = []
            ok = True
            for e, other_end, u in back_edges:
                our_dart = edge_dart(e, 1 - other_end)
                other_dart = edge_dart(e, other_end)
                left = []  # entries on end-0 side
                right = []
                for slot_id, k, gw, spec in fibers[u]:
                    for x in dict(spec)[other_dart]:
                        (left if other_end == 0 else right).append((slot_id, x))
                for slot_id, k, gw, spec in slots:
                    for x in dict(spec)[our_dart]:
                        (right if other_end == 0 else left).append((slot_id, x))
                opts = list(_matchings(left, right))
                if not opts:
                    ok = False
                    break
                glue_tasks.append((e, opts))
            if ok:
                for e in loops:
                    left = []
                    right = []
                    for slot_id, k, gw, spec in slots:
                        for x in dict(spec)[edge_dart(e, 0)]:
                            left.append((slot_id, x))
                        for x in dict(spec)[edge_dart(e, 1)]:
                            right.append((slot_id, x))
                    opts = list(_matchings(left, right))
                    if not opts:
                        ok = False
                        break
                    glue_tasks.append((e, opts))
            if not ok:
                continue

            for combo in itertools.product(*(opts for _, opts in glue_tasks)):
                new_glued = list(glued)
                for (e, _), triples in zip(glue_tasks, combo):
                    for a, b, x in triples:
                        new_glued.append((e, a, b, x))
                self._place(idx + 1, new_fibers, new_glued, counter)

    # -- assembly ----------------------------------------------------------------

    def _emit(self, fibers, glued):
        target = self.target
        vertices = {}
        vmap = {}
        degrees = {}
        leg_specs = []  # (provisional label, slot, target leg, expansion)
        for v, slots in fibers.items():
            for slot_id, k, gw, spec in slots:
                vertices[slot_id] = gw
                vmap[slot_id] = v
                degrees[slot_id] = k
                for t, parts in spec:
                    if t[0] == "l":
                        for i, x in enumerate(parts):
                            leg_specs.append(
                                ("%s#%d#%d" % (t[1], slot_id, i), slot_id, t[1], x)
                            )
        edges = {}
        edge_map = {}
        edge_exp = {}
        for i, (e, a, b, x) in enumerate(glued):
            eid = "s%d" % i
            edges[eid] = (a, b)
            edge_map[eid] = (e, 0)
            edge_exp[eid] = x
        legs = {lbl: slot for lbl, slot, _, _ in leg_specs}
        leg_map = {lbl: t for lbl, _, t, _ in leg_specs}
        leg_exp = {lbl: x for lbl, _, _, x in leg_specs}
        try:
            source = Graph(vertices, edges, legs)
        except ValueError:
            return
        if not source.is_connected():
            return
        cover = CoverType(
            source, target, vmap, edge_map, leg_map, edge_exp, leg_exp, degrees
        )
        if genus(source) != self.g:
            return
        if not validate(cover).ok:
            return
        if not self.prune:
            for v in target.vertices:
                if vertex_hurwitz_product(cover, v, self.convention, self.cache) == 0:
                    return
        self.results.append(cover)


def _relabel_source_legs(cover, relabeling):
    src = cover.source
    new_legs = {relabeling[l]: v for l, v in src.legs.items()}
    new_source = Graph(dict(src.genus_of), dict(src.edge_ends), new_legs)
    return CoverType(
        new_source,
        cover.target,
        cover.vertex_map,
        cover.edge_map,
        {relabeling[l]: t for l, t in cover.leg_map.items()},
        cover.edge_expansion,
        {relabeling[l]: x for l, x in cover.leg_expansion.items()},
        cover.local_degrees,
    )


def _leg_labelings(cover, leg_profiles):
    """Expand one anonymous cover into its marked types: all assignments
    of part labels to source legs, up to the within-vertex symmetry."""
    by_target = {}
    for l in cover.source.legs:
        t = cover.leg_map[l]
        by_target.setdefault(t, []).append(l)

    per_leg_options = []
    for t in sorted(by_target):
        profile = leg_profiles[t]
        indices_by_value = {}
        for i, x in enumerate(profile.parts):
            indices_by_value.setdefault(x, []).append(i + 1)
        legs_by_value = {}
        for l in by_target[t]:
            x = cover.leg_expansion[l]
            legs_by_value.setdefault(x, []).append(l)
        value_options = []
        for x in sorted(indices_by_value):
            indices = indices_by_value[x]
            legs = sorted(legs_by_value.get(x, []), key=lambda l: (cover.source.legs[l], l))
            if len(indices) != len(legs):
                return  # should not happen on valid covers
            groups = {}
            for l in legs:
                groups.setdefault(cover.source.legs[l], []).append(l)
            vertex_order = sorted(groups)
            sizes = [len(groups[w]) for w in vertex_order]

            def splits(pool, sizes):
                if not sizes:
                    yield []
                    return
                for chosen in itertools.combinations(pool, sizes[0]):
                    rest = [i for i in pool if i not in chosen]
                    for tail in splits(rest, sizes[1:]):
                        yield [list(chosen)] + tail

            opts = []
            for split in splits(indices, sizes):
                assignment = {}
                for w, chosen in zip(vertex_order, split):
                    for l, i in zip(groups[w], sorted(chosen)):
                        assignment[l] = "%s.%d" % (t, i)
                opts.append(assignment)
            value_options.append(opts)
        per_leg_options.append(value_options)

    flat = [opts for leg_opts in per_leg_options for opts in leg_opts]
    for combo in itertools.product(*flat):
        relabeling = {}
        for assignment in combo:
            relabeling.update(assignment)
        yield _relabel_source_legs(cover, relabeling)


def covers_over_target(
    target,
    d,
    g,
    leg_profiles,
    convention=DEFAULT_CONVENTION,
    cache=None,
    prune=True,
    max_degree=6,
):
    """All valid cover types over the target, up to isomorphism of
    marked covers, in canonical order.

    leg_profiles maps every target leg label to its partition of d
    (simple legs included, with profile (2,1^{d-2})).  Set prune=False
    for the reference search without feasibility pruning.
    """
    enum = _Enumerator(
        target, d, g, leg_profiles, convention, cache, prune, max_degree
    )
    raw = enum.run()
    anonymous = {}
    for cover in raw:
        key = cover_canonical_key(cover)
        anonymous.setdefault(key, cover)
    labeled = {}
    for cover in anonymous.values():
        for marked in _leg_labelings(cover, enum.leg_profiles) or []:
            labeled.setdefault(cover_canonical_key(marked), marked)
    return [labeled[k] for k in sorted(labeled)]


def default_target(g, h, d, profiles):
    """The caterpillar for genus-0 targets, else the first trivalent
    target, with profile legs mu1..mur and simple legs q1..qs."""
    profiles = [p if isinstance(p, Partition) else Partition(p) for p in profiles]
    s = simple_branch_count(g, h, d, profiles)
    mu_labels = ["mu%d" % (i + 1) for i in range(len(profiles))]
    leg_profiles = dict(zip(mu_labels, profiles))
    for i in range(s):
        leg_profiles["q%d" % (i + 1)] = simple_profile(d)
    if h == 0:
        target = caterpillar_target(mu_labels, s)
    else:
        options = trivalent_targets(h, mu_labels + ["q%d" % (i + 1) for i in range(s)])
        if not options:
            raise InfeasibleProblem("no trivalent genus-%d target with %d legs" % (h, len(leg_profiles)))
        target = options[0]
    return target, leg_profiles


def tropical_hurwitz(
    g,
    h,
    d,
    profiles,
    convention=DEFAULT_CONVENTION,
    target=None,
    cache=None,
    max_degree=6,
):
    """Degree of the tropical branch map: sum of weight x dilation over
    the cover types above the chosen maximally degenerate target.

    Every summand is asserted against the BBM multiplicity (the per-cone
    identity M_e N_e = prod of expansions).
    """
    report = branch_fiber_report(
        g, h, d, profiles, convention=convention, target=target, cache=cache,
        max_degree=max_degree,
    )
    return report.total


class FiberRow:
    def __init__(self, cover, convention, cache):
        auts = automorphism_groups(cover)
        self.cover = cover
        self.key = cover_canonical_key(cover)
        self.aut0 = auts.aut0_size
        self.aut = auts.aut_size
        self.vertex_h = {
            v: vertex_hurwitz_product(cover, v, convention, cache)
            for v in cover.target.vertices
        }
        self.edge_m = {t: edge_branch_factor(cover, t) for t in cover.target.edges}
        self.edge_n = {t: edge_dilation(cover, t) for t in cover.target.edges}
        self.weight = weight(cover, convention, cache=cache, auts=auts)
        self.dilation = dilation_factor(cover)
        self.contribution = self.weight * self.dilation
        self.bbm = bbm_multiplicity(cover, convention, cache=cache, auts=auts)
        assert self.contribution == self.bbm, (
            "per-cone identity failed: %s * %s != %s"
            % (self.weight, self.dilation, self.bbm)
        )

    def to_json(self):
        return {
            "key": self.key,
            "aut0": self.aut0,
            "aut": self.aut,
            "vertex_hurwitz": {str(v): str(h) for v, h in sorted(self.vertex_h.items())},
            "edge_m": {str(t): str(m) for t, m in sorted(self.edge_m.items())},
            "edge_n": {str(t): n for t, n in sorted(self.edge_n.items())},
            "weight": str(self.weight),
            "dilation": self.dilation,
            "contribution": str(self.contribution),
        }


class FiberReport:
    """One row per cover type; column sums reproduce the tropical count."""

    def __init__(self, rows, target, leg_profiles):
        self.rows = rows
        self.target = target
        self.leg_profiles = leg_profiles
        self.total = sum((r.contribution for r in rows), Fraction(0))

    def to_json(self):
        return {
            "total": str(self.total),
            "rows": [r.to_json() for r in self.rows],
        }


def branch_fiber_report(
    g,
    h,
    d,
    profiles,
    convention=DEFAULT_CONVENTION,
    target=None,
    cache=None,
    max_degree=6,
):
    profiles = [p if isinstance(p, Partition) else Partition(p) for p in profiles]
    s = simple_branch_count(g, h, d, profiles)
    if target is None:
        if d == 1 and s == 0:
            target, leg_profiles = default_target(g, h, d, profiles)
        elif d < 2 and s > 0:
            return FiberReport([], None, {})  # no transpositions in S_1
        else:
            target, leg_profiles = default_target(g, h, d, profiles)
    else:
        if d < 2 and s > 0:
            return FiberReport([], target, {})
        mu_labels = ["mu%d" % (i + 1) for i in range(len(profiles))]
        leg_profiles = dict(zip(mu_labels, profiles))
        for i in range(s):
            leg_profiles["q%d" % (i + 1)] = simple_profile(d)
        missing = set(target.legs) - set(leg_profiles)
        extra = set(leg_profiles) - set(target.legs)
        if missing or extra:
            raise ValueError(
                "target legs %r do not match expected %r"
                % (sorted(target.legs), sorted(leg_profiles))
            )
    covers = covers_over_target(
        target, d, g, leg_profiles, convention, cache=cache, max_degree=max_degree
    )
    rows = [FiberRow(c, convention, cache) for c in covers]
    return FiberReport(rows, target, leg_profiles)
