"""Vertex-weighted multigraphs with legs in half-edge representation.

A Graph has integer vertex ids with nonnegative genera, edges as
unordered dart pairs (loops and parallel edges allowed) and legs as
labeled unpaired darts.  Darts are the tuples ("e", eid, 0|1) and
("l", label); they are the faithful model for tangent directions, which
covers must distinguish.

Automorphisms fix every leg pointwise by default (all branch points and
their preimages are marked); pass fix_legs=False for the auxiliary
leg-permuting variant.
"""

from __future__ import annotations

import itertools
import json


def edge_dart(eid, end):
    return ("e", eid, end)


def leg_dart(label):
    return ("l", label)


class Graph:
    """Immutable vertex-weighted multigraph with labeled legs."""

    def __init__(self, vertices, edges=None, legs=None):
        """vertices: {vid: genus}; edges: {eid: (u, v)}; legs: {label: vid}."""
        self.genus_of = {int(v): int(g) for v, g in dict(vertices).items()}
        self.edge_ends = {e: (int(u), int(w)) for e, (u, w) in dict(edges or {}).items()}
        self.legs = {str(lbl): int(v) for lbl, v in dict(legs or {}).items()}
        if not self.genus_of:
            raise ValueError("graph needs at least one vertex")
        for v, g in self.genus_of.items():
            if g < 0:
                raise ValueError("vertex %r has negative genus" % v)
        for e, (u, w) in self.edge_ends.items():
            if u not in self.genus_of or w not in self.genus_of:
                raise ValueError("edge %r has unknown endpoint" % (e,))
        for lbl, v in self.legs.items():
            if v not in self.genus_of:
                raise ValueError("leg %r attached to unknown vertex" % lbl)
        self._darts_at = {v: [] for v in self.genus_of}
        for e in sorted(self.edge_ends, key=str):
            u, w = self.edge_ends[e]
            self._darts_at[u].append(edge_dart(e, 0))
            self._darts_at[w].append(edge_dart(e, 1))
        for lbl in sorted(self.legs):
            self._darts_at[self.legs[lbl]].append(leg_dart(lbl))

    # -- basic structure ---------------------------------------------------

    @property
    def vertices(self):
        return sorted(self.genus_of)

    @property
    def edges(self):
        return sorted(self.edge_ends, key=str)

    def darts_at(self, v):
        return list(self._darts_at[v])

    def darts(self):
        return [d for v in self.vertices for d in self._darts_at[v]]

    def vertex_of(self, dart):
        if dart[0] == "e":
            return self.edge_ends[dart[1]][dart[2]]
        return self.legs[dart[1]]

    def partner(self, dart):
        """The other dart of an edge; legs have no partner."""
        if dart[0] != "e":
            raise ValueError("leg darts have no partner")
        return edge_dart(dart[1], 1 - dart[2])

    def is_loop(self, eid):
        u, w = self.edge_ends[eid]
        return u == w

    def valence(self, v):
        return len(self._darts_at[v])

    def legs_at(self, v):
        return sorted(lbl for lbl, w in self.legs.items() if w == v)

    def n_loops_at(self, v):
        return sum(1 for e, (u, w) in self.edge_ends.items() if u == v and w == v)

    def is_connected(self):
        verts = self.vertices
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            v = stack.pop()
            for u, w in (self.edge_ends[e] for e in self.edge_ends):
                for a, b in ((u, w), (w, u)):
                    if a == v and b not in seen:
                        seen.add(b)
                        stack.append(b)
        return len(seen) == len(verts)

    def __repr__(self):
        return "Graph(V=%d, E=%d, legs=%d, genus=%d)" % (
            len(self.genus_of),
            len(self.edge_ends),
            len(self.legs),
            genus(self) if self.is_connected() else -1,
        )


def genus(graph):
    """First Betti number plus the sum of vertex genera."""
    if not graph.is_connected():
        raise ValueError("genus is defined for connected graphs only")
    betti = len(graph.edge_ends) - len(graph.genus_of) + 1
    return betti + sum(graph.genus_of.values())


def is_stable(graph):
    """Every genus-0 vertex at least trivalent, every genus-1 vertex
    incident to a dart (loops count twice, legs once)."""
    for v in graph.vertices:
        g = graph.genus_of[v]
        val = graph.valence(v)
        if g == 0 and val < 3:
            return False
        if g == 1 and val < 1:
            return False
    return True


# ---------------------------------------------------------------------------
# automorphisms


def _vertex_invariant(graph, v, fix_legs):
    legs = tuple(sorted(lbl for lbl, w in graph.legs.items() if w == v))
    if not fix_legs:
        legs = len(legs)
    return (graph.genus_of[v], graph.valence(v), graph.n_loops_at(v), legs)


def _edges_between(graph, u, w):
    return sorted(
        (e for e, ends in graph.edge_ends.items() if set(ends) == {u, w} or ends == (u, w)),
        key=str,
    )


def automorphism_group(graph, fix_legs=True):
    """All dart-level automorphisms as {dart: dart} maps.

    Preserves vertex genus and incidence; with fix_legs (the default)
    every leg is fixed pointwise.  Loops may be reversed, parallel edges
    permuted.
    """
    verts = graph.vertices
    inv = {v: _vertex_invariant(graph, v, fix_legs) for v in verts}
    classes = {}
    for v in verts:
        classes.setdefault(inv[v], []).append(v)

    vertex_maps = []
    class_items = sorted(classes.items(), key=lambda kv: str(kv[0]))
    pools = [itertools.permutations(vs) for _, vs in class_items]
    for images in itertools.product(*pools):
        f = {}
        for (_, vs), img in zip(class_items, images):
            f.update(dict(zip(vs, img)))
        ok = all(
            len(_edges_between(graph, u, w)) == len(_edges_between(graph, f[u], f[w]))
            for u, w in itertools.combinations_with_replacement(verts, 2)
        )
        if ok:
            vertex_maps.append(f)

    auts = []
    pairs = list(itertools.combinations_with_replacement(verts, 2))
    for f in vertex_maps:
        per_pair = []
        for u, w in pairs:
            src = _edges_between(graph, u, w)
            dst = _edges_between(graph, f[u], f[w])
            if not src:
                continue
            options = []
            for perm in itertools.permutations(dst):
                options.append(list(zip(src, perm)))
            per_pair.append((u, w, options))
        for combo in itertools.product(*(opts for _, _, opts in per_pair)):
            dart_map = {}
            valid = True
            loop_flip_choices = []
            for (u, w, _), matching in zip(per_pair, combo):
                for e, e2 in matching:
                    a, b = graph.edge_ends[e]
                    a2, b2 = graph.edge_ends[e2]
                    if a == b:  # loop onto loop: both orientations possible
                        loop_flip_choices.append((e, e2))
                        continue
                    if (f[a], f[b]) == (a2, b2):
                        dart_map[edge_dart(e, 0)] = edge_dart(e2, 0)
                        dart_map[edge_dart(e, 1)] = edge_dart(e2, 1)
                    elif (f[a], f[b]) == (b2, a2):
                        dart_map[edge_dart(e, 0)] = edge_dart(e2, 1)
                        dart_map[edge_dart(e, 1)] = edge_dart(e2, 0)
                    else:
                        valid = False
                        break
                if not valid:
                    break
            if not valid:
                continue
            base_leg_maps = [{}]
            if fix_legs:
                legmap = {leg_dart(lbl): leg_dart(lbl) for lbl in graph.legs}
                if any(f[graph.legs[lbl]] != graph.legs[lbl] for lbl in graph.legs):
                    continue
                base_leg_maps = [legmap]
            else:
                by_vertex = {}
                for lbl, v in graph.legs.items():
                    by_vertex.setdefault(v, []).append(lbl)
                vertex_opts = []
                ok = True
                for v, lbls in sorted(by_vertex.items()):
                    dest = sorted(by_vertex.get(f[v], []))
                    if len(dest) != len(lbls):
                        ok = False
                        break
                    vertex_opts.append(
                        [list(zip(sorted(lbls), perm)) for perm in itertools.permutations(dest)]
                    )
                if not ok:
                    continue
                base_leg_maps = []
                for legcombo in itertools.product(*vertex_opts):
                    m = {}
                    for matching in legcombo:
                        for a, b in matching:
                            m[leg_dart(a)] = leg_dart(b)
                    base_leg_maps.append(m)
            for flips in itertools.product((False, True), repeat=len(loop_flip_choices)):
                for legmap in base_leg_maps:
                    dm = dict(dart_map)
                    dm.update(legmap)
                    for (e, e2), flip in zip(loop_flip_choices, flips):
                        if flip:
                            dm[edge_dart(e, 0)] = edge_dart(e2, 1)
                            dm[edge_dart(e, 1)] = edge_dart(e2, 0)
                        else:
                            dm[edge_dart(e, 0)] = edge_dart(e2, 0)
                            dm[edge_dart(e, 1)] = edge_dart(e2, 1)
                    auts.append(dm)
    return auts


def aut_vertex_map(graph, dart_map):
    """Vertex map induced by a dart-level automorphism."""
    vm = {}
    for d, d2 in dart_map.items():
        vm[graph.vertex_of(d)] = graph.vertex_of(d2)
    for v in graph.vertices:  # isolated vertices are fixed
        vm.setdefault(v, v)
    return vm


def compose_auts(a, b):
    """Dart map of 'apply b first, then a'."""
    return {d: a[b[d]] for d in b}


# ---------------------------------------------------------------------------
# canonical form


def canonical_key(graph):
    """Label-invariant encoding; equal iff isomorphic as leg-labeled
    weighted graphs.  Plain backtracking over orderings refined by
    (genus, valence, loops, legs); graphs here are tiny.
    """
    verts = graph.vertices
    inv = {v: _vertex_invariant(graph, v, True) for v in verts}
    classes = {}
    for v in verts:
        classes.setdefault(inv[v], []).append(v)
    class_items = sorted(classes.items(), key=lambda kv: str(kv[0]))

    best = None
    pools = [itertools.permutations(vs) for _, vs in class_items]
    for images in itertools.product(*pools):
        order = [v for img in images for v in img]
        pos = {v: i for i, v in enumerate(order)}
        enc = (
            tuple(graph.genus_of[v] for v in order),
            tuple(
                sorted(
                    tuple(sorted((pos[u], pos[w])))
                    for u, w in graph.edge_ends.values()
                )
            ),
            tuple(sorted((lbl, pos[v]) for lbl, v in graph.legs.items())),
        )
        if best is None or enc < best:
            best = enc
    return json.dumps(best, sort_keys=True)


# ---------------------------------------------------------------------------
# contraction


def contract_edges(graph, contracted):
    """Contract a set of edge ids; returns (Graph, vertex map).

    Each new vertex's genus is the genus of its preimage subgraph: the
    sum of vertex genera plus the first Betti number of the contracted
    piece, so contracting a loop raises genus by one.
    """
    contracted = set(contracted)
    for e in contracted:
        if e not in graph.edge_ends:
            raise ValueError("unknown edge %r" % (e,))
    parent = {v: v for v in graph.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in contracted:
        u, w = graph.edge_ends[e]
        ru, rw = find(u), find(w)
        if ru != rw:
            parent[max(ru, rw)] = min(ru, rw)

    comp = {v: find(v) for v in graph.vertices}
    members = {}
    for v, r in comp.items():
        members.setdefault(r, []).append(v)

    new_genus = {}
    for r, vs in members.items():
        internal = sum(1 for e in contracted if comp[graph.edge_ends[e][0]] == r)
        betti = internal - (len(vs) - 1)
        new_genus[r] = sum(graph.genus_of[v] for v in vs) + betti

    new_edges = {
        e: (comp[u], comp[w])
        for e, (u, w) in graph.edge_ends.items()
        if e not in contracted
    }
    new_legs = {lbl: comp[v] for lbl, v in graph.legs.items()}
    return Graph(new_genus, new_edges, new_legs), comp


# ---------------------------------------------------------------------------
# target generators


def caterpillar_target(r_legs, s):
    """The trivalent totally degenerate genus-0 path with the given legs.

    Profile legs sit at the two end blocks, simple legs q1..qs fill the
    remaining slots left to right, as in the fixed maximally degenerate
    cell of the genus-0 target moduli.  Two legs give the degenerate
    single-vertex target of the two-point problems.
    """
    r_legs = [str(x) for x in r_legs]
    labels = r_legs + ["q%d" % (i + 1) for i in range(s)]
    n = len(labels)
    if n < 2:
        raise ValueError("a target needs at least 2 legs, got %d" % n)
    k = max(1, n - 2)
    vertices = {i: 0 for i in range(k)}
    edges = {"t%d" % i: (i, i + 1) for i in range(k - 1)}
    if len(r_legs) >= 2:
        ordered = [r_legs[0]] + r_legs[1:-1] + labels[len(r_legs):] + [r_legs[-1]]
    else:
        ordered = labels
    if k == 1:
        slots = [0] * n
    else:
        slots = [0, 0] + list(range(1, k - 1)) + [k - 1, k - 1]
    legs = {lbl: slots[i] for i, lbl in enumerate(ordered)}
    return Graph(vertices, edges, legs)


def _degree_multigraphs(deg):
    """All edge multisets on vertices 0..len(deg)-1 with the prescribed
    edge-valences (loops count twice)."""
    nv = len(deg)

    def rec(rem, acc):
        u = next((i for i in range(nv) if rem[i] > 0), None)
        if u is None:
            yield list(acc)
            return
        # choose u's remaining incidences at once: loops + partners > u
        def choose(budget, w, edges):
            if budget == 0:
                rem2 = list(rem)
                rem2[u] = 0
                for a, b in edges:
                    if a != u:
                        rem2[a] -= 1
                    if b != u and b != a:
                        rem2[b] -= 1
                # loops consume only u's budget; partners consume theirs
                yield from rec(rem2, acc + edges)
                return
            if w >= nv:
                return
            if w == u:  # loops at u
                max_loops = budget // 2
                for nl in range(max_loops, -1, -1):
                    choose_edges = [(u, u)] * nl
                    yield from choose(budget - 2 * nl, u + 1, edges + choose_edges)
                return
            cap = min(budget, rem[w] - sum(1 for a, b in edges if b == w))
            for m in range(cap, -1, -1):
                yield from choose(budget - m, w + 1, edges + [(u, w)] * m)

        yield from choose(rem[u], u, [])

    yield from rec(list(deg), [])


def trivalent_targets(h, leg_labels, max_vertices=12):
    """Connected trivalent genus-h graphs, all vertex genera 0, with the
    given labeled legs, up to isomorphism, in canonical order.

    Exception: h = 1 with no legs admits no trivalent graph; the loop
    graph (the maximally degenerate unmarked genus-1 type) is returned.
    """
    leg_labels = [str(x) for x in leg_labels]
    n = len(leg_labels)
    if 3 * h - 3 + n < 0:
        raise ValueError("no stable genus-%d target with %d legs" % (h, n))
    if h == 1 and n == 0:
        return [Graph({0: 0}, {"t0": (0, 0)}, {})]
    nv = n + 2 * h - 2
    if nv < 1:
        raise ValueError("no trivalent genus-%d target with %d legs" % (h, n))
    if nv > max_vertices:
        raise ValueError("target with %d vertices exceeds the guard" % nv)

    out = {}
    for assignment in itertools.product(range(nv), repeat=n):
        legs = {lbl: v for lbl, v in zip(leg_labels, assignment)}
        deg = [3 - sum(1 for x in assignment if x == v) for v in range(nv)]
        if any(d < 0 for d in deg):
            continue
        for edge_list in _degree_multigraphs(deg):
            edges = {"t%d" % i: uw for i, uw in enumerate(edge_list)}
            g = Graph({v: 0 for v in range(nv)}, edges, legs)
            if not g.is_connected():
                continue
            if genus(g) != h:
                continue
            out.setdefault(canonical_key(g), g)
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# serialization


def _dart_slots(graph):
    """Deterministic (vertex, slot) coordinates for every dart."""
    slots = {}
    for v in graph.vertices:
        for i, d in enumerate(graph.darts_at(v)):
            slots[d] = (v, i)
    return slots


def graph_to_json(graph):
    slots = _dart_slots(graph)
    return {
        "vertices": [{"id": v, "genus": graph.genus_of[v]} for v in graph.vertices],
        "edges": [
            {
                "id": e,
                "darts": [list(slots[edge_dart(e, 0)]), list(slots[edge_dart(e, 1)])],
            }
            for e in graph.edges
        ],
        "legs": [
            {"label": lbl, "dart": list(slots[leg_dart(lbl)])}
            for lbl in sorted(graph.legs)
        ],
    }


def graph_from_json(data):
    vertices = {v["id"]: v["genus"] for v in data["vertices"]}
    edges = {}
    for e in data["edges"]:
        (u, _), (w, _) = e["darts"]
        edges[e["id"]] = (u, w)
    legs = {leg["label"]: leg["dart"][0] for leg in data.get("legs", [])}
    return Graph(vertices, edges, legs)


def graph_to_dot(graph, name="G"):
    lines = ["graph %s {" % name]
    for v in graph.vertices:
        lines.append('  v%d [label="g=%d"];' % (v, graph.genus_of[v]))
    for e in graph.edges:
        u, w = graph.edge_ends[e]
        lines.append("  v%d -- v%d;" % (u, w))
    for lbl in sorted(graph.legs):
        node = "leg_%s" % lbl.replace(".", "_")
        lines.append('  %s [shape=none, label="%s"];' % (node, lbl))
        lines.append("  v%d -- %s [style=dashed];" % (graph.legs[lbl], node))
    lines.append("}")
    return "\n".join(lines)
