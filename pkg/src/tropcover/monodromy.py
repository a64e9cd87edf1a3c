"""Monodromy graphs for double Hurwitz numbers and their cover types.

A monodromy graph projects to the segment [0, s+1]: weighted strands
start at the marked left ends (weights mu1), end at the marked right
ends (weights mu2), and at each interior position exactly one trivalent
event happens: a join (two strands merge, weights add) or a cut (one
strand splits, in every positive way).  Ends are marked, so the only
automorphisms are swaps of parallel equal-weight strand pairs
("wieners"), each contributing a factor 2.

Graphs are identified by their labeled diagram: events sit at distinct
positions and are therefore canonically named, so the diagram is the
sorted list of (endpoint, endpoint, weight) strands.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

from .covers import CoverType
from .graphs import Graph, caterpillar_target
from .hurwitz import InfeasibleProblem
from .symgroup import Partition


class MonodromyGraph:
    """Strand diagram over [0, s+1] with marked ends.

    strands: tuples (u, v, w) with u, v among ("L", i), ("R", j),
    ("E", p) and pos(u) < pos(v); weights positive.
    """

    def __init__(self, mu1, mu2, g, strands):
        self.mu1 = mu1 if isinstance(mu1, Partition) else Partition(mu1)
        self.mu2 = mu2 if isinstance(mu2, Partition) else Partition(mu2)
        self.g = g
        self.s = 2 * g - 2 + self.mu1.length + self.mu2.length
        self.strands = tuple(sorted(tuple(s) for s in strands))

    def key(self):
        return self.strands

    @staticmethod
    def position(endpoint, s):
        kind = endpoint[0]
        if kind == "L":
            return 0
        if kind == "R":
            return s + 1
        return endpoint[1]

    def interior_strands(self):
        """Strands not over 0 or s+1: both endpoints are events."""
        return [t for t in self.strands if t[0][0] == "E" and t[1][0] == "E"]

    def wiener_automorphisms(self):
        """2^(number of parallel strand pairs with equal weights)."""
        groups = {}
        for u, v, w in self.strands:
            groups.setdefault((u, v), []).append(w)
        aut = 1
        for ws in groups.values():
            if len(ws) == 2 and ws[0] == ws[1]:
                aut *= 2
        return aut

    def contribution(self):
        """1/|Aut| times the product of interior edge weights."""
        prod = 1
        for _, _, w in self.interior_strands():
            prod *= w
        return Fraction(prod, self.wiener_automorphisms())

    def events(self):
        """{position: ("join"|"cut", incoming weights, outgoing weights)}."""
        incoming = {}
        outgoing = {}
        for u, v, w in self.strands:
            if v[0] == "E":
                incoming.setdefault(v[1], []).append(w)
            if u[0] == "E":
                outgoing.setdefault(u[1], []).append(w)
        out = {}
        for p in range(1, self.s + 1):
            inc = sorted(incoming.get(p, []), reverse=True)
            outg = sorted(outgoing.get(p, []), reverse=True)
            out[p] = ("join" if len(inc) == 2 else "cut", inc, outg)
        return out

    def weights_over_intervals(self):
        """Multiset of strand weights over each interval (p, p+1)."""
        out = []
        for p in range(self.s + 1):
            ws = sorted(
                (
                    w
                    for u, v, w in self.strands
                    if self.position(u, self.s) <= p < self.position(v, self.s)
                ),
                reverse=True,
            )
            out.append(ws)
        return out

    def render(self):
        return " | ".join(",".join(map(str, ws)) for ws in self.weights_over_intervals())

    def to_json(self):
        return {
            "mu1": self.mu1.to_json(),
            "mu2": self.mu2.to_json(),
            "genus": self.g,
            "strands": [
                {"from": list(u), "to": list(v), "weight": w}
                for u, v, w in self.strands
            ],
            "events": [
                {"position": p, "kind": kind, "in": inc, "out": outg}
                for p, (kind, inc, outg) in sorted(self.events().items())
            ],
        }

    def to_dot(self, name="monodromy"):
        def node(x):
            return "%s_%s" % (x[0], x[1])

        lines = ["digraph %s {" % name, "  rankdir=LR;"]
        seen = set()
        for u, v, w in self.strands:
            for x in (u, v):
                if x not in seen:
                    seen.add(x)
                    shape = "point" if x[0] == "E" else "plaintext"
                    lines.append('  %s [shape=%s, label="%s%s"];' % (node(x), shape, x[0], x[1]))
            lines.append('  %s -> %s [label="%d", dir=none];' % (node(u), node(v), w))
        lines.append("}")
        return "\n".join(lines)

    def __repr__(self):
        return "MonodromyGraph(%s)" % self.render()


def _connected(strands):
    nodes = set()
    for u, v, _ in strands:
        nodes.add(u)
        nodes.add(v)
    if not nodes:
        return False
    adj = {}
    for u, v, _ in strands:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj.get(x, []):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == nodes


def generate_monodromy_graphs(mu1, mu2, g):
    """All connected monodromy graphs for the double Hurwitz problem.

    Cuts split "in all possible positive ways"; equal halves coincide,
    and distinct routings of equal-weight siblings collapse in the
    labeled diagram, so the output is duplicate-free by construction of
    the canonical strand list.
    """
    mu1 = mu1 if isinstance(mu1, Partition) else Partition(mu1)
    mu2 = mu2 if isinstance(mu2, Partition) else Partition(mu2)
    if mu1.size != mu2.size:
        raise InfeasibleProblem("mu1 and mu2 must partition the same degree")
    g = int(g)
    s = 2 * g - 2 + mu1.length + mu2.length
    if s < 0:
        raise InfeasibleProblem("negative number of simple branch points: %d" % s)

    start = [(("L", i + 1), mu1[i]) for i in range(mu1.length)]
    found = {}

    def finish(live, strands):
        if sorted((w for _, w in live), reverse=True) != list(mu2.parts):
            return
        by_weight = {}
        for idx, (_, w) in enumerate(live):
            by_weight.setdefault(w, []).append(idx)
        ends_by_weight = {}
        for j, w in enumerate(mu2.parts):
            ends_by_weight.setdefault(w, []).append(j + 1)
        choices = []
        for w in sorted(by_weight):
            lives = by_weight[w]
            ends = ends_by_weight[w]
            choices.append([list(zip(lives, perm)) for perm in itertools.permutations(ends)])
        for combo in itertools.product(*choices):
            full = list(strands)
            for pairs in combo:
                for idx, j in pairs:
                    origin, w = live[idx]
                    full.append((origin, ("R", j), w))
            if _connected(full):
                m = MonodromyGraph(mu1, mu2, g, full)
                found.setdefault(m.key(), m)

    def rec(p, live, strands):
        if p > s:
            finish(live, strands)
            return
        node = ("E", p)
        # joins
        for i, j in itertools.combinations(range(len(live)), 2):
            (oi, wi), (oj, wj) = live[i], live[j]
            nxt = [live[x] for x in range(len(live)) if x not in (i, j)]
            nxt.append((node, wi + wj))
            rec(p + 1, nxt, strands + [(oi, node, wi), (oj, node, wj)])
        # cuts
        for i, (oi, wi) in enumerate(live):
            for a in range(1, wi // 2 + 1):
                nxt = [live[x] for x in range(len(live)) if x != i]
                nxt.extend([(node, a), (node, wi - a)])
                rec(p + 1, nxt, strands + [(oi, node, wi)])

    rec(1, start, [])
    return [found[k] for k in sorted(found)]


def cjm_sum(mu1, mu2, g):
    """Sum over monodromy graphs of 1/|Aut| times the interior weight
    product.  Matches the parts_labeled classical value when s >= 1."""
    total = Fraction(0)
    for m in generate_monodromy_graphs(mu1, mu2, g):
        total += m.contribution()
    return total


# ---------------------------------------------------------------------------
# conversion to admissible cover types


def to_cover_type(m):
    """Subdivide the monodromy graph into a cover of the caterpillar.

    Every preimage of a branch position becomes a vertex; each position
    gets a simple leg downstairs and the unique simple-profile preimage
    legs upstairs: the trivalent event takes the 2-part, pass-through
    strands take unramified legs.
    """
    s, d = m.s, m.mu1.size
    target = caterpillar_target(["mu1", "mu2"], s)

    if s == 0:
        src = Graph({0: 0}, {}, {"mu1.1": 0, "mu2.1": 0})
        return CoverType(
            src,
            target,
            {0: 0},
            {},
            {"mu1.1": "mu1", "mu2.1": "mu2"},
            {},
            {"mu1.1": d, "mu2.1": d},
            {0: d},
        )

    vertices = {}
    vmap = {}
    legs = {}
    leg_map = {}
    leg_exp = {}
    edges = {}
    edge_map = {}
    edge_exp = {}
    counter = itertools.count()
    event_vertex = {}
    for p in range(1, s + 1):
        vid = next(counter)
        event_vertex[p] = vid
        vertices[vid] = 0
        vmap[vid] = p - 1
    passers = {p: [] for p in range(1, s + 1)}  # (vid, weight) per position
    eid = itertools.count()

    for u, v, w in m.strands:
        pu = MonodromyGraph.position(u, s)
        pv = MonodromyGraph.position(v, s)
        seq = []
        if u[0] == "E":
            seq.append((pu, event_vertex[pu]))
        for p in range(pu + 1, pv):
            vid = next(counter)
            vertices[vid] = 0
            vmap[vid] = p - 1
            passers[p].append((vid, w))
            seq.append((p, vid))
        if v[0] == "E":
            seq.append((pv, event_vertex[pv]))
        if u[0] == "L":
            lbl = "mu1.%d" % u[1]
            legs[lbl] = seq[0][1]
            leg_map[lbl] = "mu1"
            leg_exp[lbl] = w
        if v[0] == "R":
            lbl = "mu2.%d" % v[1]
            legs[lbl] = seq[-1][1]
            leg_map[lbl] = "mu2"
            leg_exp[lbl] = w
        for (p, a), (p2, b) in zip(seq, seq[1:]):
            e = "s%d" % next(eid)
            edges[e] = (a, b)
            edge_map[e] = ("t%d" % (p - 1), 0)
            edge_exp[e] = w

    events = m.events()
    for p in range(1, s + 1):
        kind, inc, outg = events[p]
        k_event = sum(inc) if kind == "join" else sum(outg)
        idx = itertools.count(1)
        ev = event_vertex[p]
        lbl = "q%d.%d" % (p, next(idx))
        legs[lbl] = ev
        leg_map[lbl] = "q%d" % p
        leg_exp[lbl] = 2
        for _ in range(k_event - 2):
            lbl = "q%d.%d" % (p, next(idx))
            legs[lbl] = ev
            leg_map[lbl] = "q%d" % p
            leg_exp[lbl] = 1
        for vid, w in sorted(passers[p]):
            for _ in range(w):
                lbl = "q%d.%d" % (p, next(idx))
                legs[lbl] = vid
                leg_map[lbl] = "q%d" % p
                leg_exp[lbl] = 1

    src = Graph(vertices, edges, legs)
    return CoverType(src, target, vmap, edge_map, leg_map, edge_exp, leg_exp)


def cover_to_monodromy(cover, mu1, mu2, g):
    """Recover the strand diagram from a subdivided caterpillar cover:
    forget the simple legs and the pass-through vertices.

    Every strand is walked once from each of its two endpoints, so the
    multiset of strands is the walk counts halved (this keeps parallel
    wiener pairs intact)."""
    mu1 = mu1 if isinstance(mu1, Partition) else Partition(mu1)
    mu2 = mu2 if isinstance(mu2, Partition) else Partition(mu2)
    s = 2 * g - 2 + mu1.length + mu2.length
    src = cover.source

    if s == 0:
        return MonodromyGraph(mu1, mu2, g, [(("L", 1), ("R", 1), mu1.size)])

    def strand_darts(w):
        out = []
        for dart in src.darts_at(w):
            if dart[0] == "e" or cover.leg_map[dart[1]] in ("mu1", "mu2"):
                out.append(dart)
        return out

    def is_event(w):
        return len(strand_darts(w)) != 2

    def terminal_of(leg_label):
        kind = "L" if cover.leg_map[leg_label] == "mu1" else "R"
        return (kind, int(leg_label.split(".")[1]))

    def follow(out_dart):
        """End node reached by leaving along out_dart, passing through
        subdivision vertices."""
        dart = out_dart
        while True:
            if dart[0] == "l":
                return terminal_of(dart[1])
            back = src.partner(dart)
            w2 = src.vertex_of(back)
            if is_event(w2):
                return ("E", cover.vertex_map[w2] + 1)
            onward = [d for d in strand_darts(w2) if d != back]
            assert len(onward) == 1
            dart = onward[0]

    walks = {}

    def record(a, b, weight):
        a, b = sorted((a, b), key=lambda x: (MonodromyGraph.position(x, s), x))
        key = (a, b, weight)
        walks[key] = walks.get(key, 0) + 1

    for lbl in sorted(src.legs):
        if cover.leg_map[lbl] not in ("mu1", "mu2"):
            continue
        node = terminal_of(lbl)
        dart = ("l", lbl)
        w = src.vertex_of(dart)
        if is_event(w):
            record(node, ("E", cover.vertex_map[w] + 1), cover.leg_expansion[lbl])
        else:
            out = [d for d in strand_darts(w) if d != dart][0]
            record(node, follow(out), cover.leg_expansion[lbl])
    for w in src.vertices:
        if is_event(w):
            node = ("E", cover.vertex_map[w] + 1)
            for dart in strand_darts(w):
                if dart[0] == "l":
                    record(node, terminal_of(dart[1]), cover.dart_expansion(dart))
                else:
                    record(node, follow(dart), cover.dart_expansion(dart))

    strands = []
    for (a, b, weight), count in walks.items():
        assert count % 2 == 0, "strand %r walked %d times" % ((a, b, weight), count)
        strands.extend([(a, b, weight)] * (count // 2))
    return MonodromyGraph(mu1, mu2, g, strands)
