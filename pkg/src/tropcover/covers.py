"""Combinatorial types of tropical admissible covers.

A CoverType is a graph morphism source -> target carrying a positive
integer expansion factor on every source edge and leg, with no source
edge contracted.  Validity means harmonicity at every source vertex
(the expansion sums toward each target tangent direction agree), the
local Riemann-Hurwitz equation, and surjectivity.

Source legs carry labels of the form "<target leg>.<part index>": the
preimages of branch points are marked, so automorphisms fix all legs
pointwise, and relabelings of equal parts across different source
vertices are different types.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .graphs import (
    Graph,
    automorphism_group,
    aut_vertex_map,
    canonical_key,
    contract_edges,
    edge_dart,
    genus,
    graph_to_json,
    leg_dart,
)
from .hurwitz import DEFAULT_CONVENTION, InfeasibleProblem, local_hurwitz


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


class CoverType:
    """A combinatorial admissible cover (morphism + expansion factors)."""

    def __init__(
        self,
        source,
        target,
        vertex_map,
        edge_map,
        leg_map,
        edge_expansion,
        leg_expansion,
        local_degrees=None,
    ):
        """edge_map: {src eid: (tgt eid, flip)} with flip in {0,1}: the
        source dart (e,0) maps to the target dart (image, flip).
        local_degrees may be omitted when derivable from harmonicity.
        """
        self.source = source
        self.target = target
        self.vertex_map = dict(vertex_map)
        self.edge_map = {e: (t, int(flip)) for e, (t, flip) in dict(edge_map).items()}
        self.leg_map = dict(leg_map)
        self.edge_expansion = {e: int(x) for e, x in dict(edge_expansion).items()}
        self.leg_expansion = {l: int(x) for l, x in dict(leg_expansion).items()}
        self.local_degrees = dict(local_degrees) if local_degrees else {}
        for w in source.vertices:
            if w not in self.local_degrees:
                k = self._derive_local_degree(w)
                if k is not None:
                    self.local_degrees[w] = k

    # -- dart level --------------------------------------------------------

    def dart_image(self, dart):
        if dart[0] == "e":
            t, flip = self.edge_map[dart[1]]
            return edge_dart(t, flip if dart[2] == 0 else 1 - flip)
        return leg_dart(self.leg_map[dart[1]])

    def dart_expansion(self, dart):
        if dart[0] == "e":
            return self.edge_expansion[dart[1]]
        return self.leg_expansion[dart[1]]

    def _derive_local_degree(self, w):
        v = self.vertex_map[w]
        for t in self.target.darts_at(v):
            total = sum(
                self.dart_expansion(d)
                for d in self.source.darts_at(w)
                if self.dart_image(d) == t
            )
            return total  # harmonicity makes any direction do
        return None

    def source_edges_over(self, tgt_eid):
        return sorted(
            (e for e, (t, _) in self.edge_map.items() if t == tgt_eid), key=str
        )

    def source_legs_over(self, tgt_label):
        return sorted(l for l, t in self.leg_map.items() if t == tgt_label)

    def fiber(self, tgt_vertex):
        return sorted(w for w, v in self.vertex_map.items() if v == tgt_vertex)

    def expansions_over_edge(self, tgt_eid):
        return sorted(
            (self.edge_expansion[e] for e in self.source_edges_over(tgt_eid)),
            reverse=True,
        )

    def local_profile(self, src_vertex, tgt_dart):
        """Partition of the local degree from the expansions of the source
        darts at src_vertex mapping to tgt_dart."""
        from .symgroup import Partition

        v = self.vertex_map[src_vertex]
        if self.target.vertex_of(tgt_dart) != v:
            raise ValueError("dart %r is not at the image of %r" % (tgt_dart, src_vertex))
        exps = [
            self.dart_expansion(d)
            for d in self.source.darts_at(src_vertex)
            if self.dart_image(d) == tgt_dart
        ]
        return Partition(exps)

    def local_data(self, src_vertex):
        """(g_src, g_tgt, local degree, profiles per target direction)."""
        v = self.vertex_map[src_vertex]
        profiles = [
            self.local_profile(src_vertex, t) for t in self.target.darts_at(v)
        ]
        return (
            self.source.genus_of[src_vertex],
            self.target.genus_of[v],
            self.local_degrees[src_vertex],
            profiles,
        )

    def __repr__(self):
        return "CoverType(degree=%s, source=%r, target=%r)" % (
            sum(self.local_degrees[w] for w in self.fiber(self.target.vertices[0])),
            self.source,
            self.target,
        )


# ---------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    kind: str
    where: object
    message: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    per_vertex: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def add(self, kind, where, message):
        self.violations.append(Violation(kind, where, message))


def validate(cover):
    """Structural, harmonicity, local Riemann-Hurwitz and surjectivity
    checks; returns a report, never raises on invalid covers."""
    rep = ValidationReport()
    src, tgt = cover.source, cover.target

    if not src.is_connected():
        rep.add("connectivity", "source", "source graph is disconnected")
    if not tgt.is_connected():
        rep.add("connectivity", "target", "target graph is disconnected")

    for w in src.vertices:
        if w not in cover.vertex_map or cover.vertex_map[w] not in tgt.genus_of:
            rep.add("structure", w, "vertex %r has no image" % w)
            return rep
    for e, (u, w) in src.edge_ends.items():
        if e not in cover.edge_map:
            rep.add("structure", e, "edge %r has no image" % e)
            return rep
        t, flip = cover.edge_map[e]
        if t not in tgt.edge_ends:
            rep.add("structure", e, "edge %r maps to unknown edge %r" % (e, t))
            return rep
        a, b = tgt.edge_ends[t]
        expected = (a, b) if flip == 0 else (b, a)
        if (cover.vertex_map[u], cover.vertex_map[w]) != expected:
            rep.add(
                "incidence",
                e,
                "edge %r -> %r does not commute with incidence" % (e, t),
            )
        if cover.edge_expansion.get(e, 0) < 1:
            rep.add("expansion", e, "edge %r needs a positive expansion" % e)
    for l, v in src.legs.items():
        if l not in cover.leg_map or cover.leg_map[l] not in tgt.legs:
            rep.add("structure", l, "leg %r has no leg image" % l)
            return rep
        if cover.vertex_map[v] != tgt.legs[cover.leg_map[l]]:
            rep.add("incidence", l, "leg %r does not commute with incidence" % l)
        if cover.leg_expansion.get(l, 0) < 1:
            rep.add("expansion", l, "leg %r needs a positive expansion" % l)
    if rep.violations:
        return rep

    # harmonicity and local Riemann-Hurwitz
    for w in src.vertices:
        v = cover.vertex_map[w]
        sums = {}
        for t in tgt.darts_at(v):
            sums[t] = sum(
                cover.dart_expansion(d)
                for d in src.darts_at(w)
                if cover.dart_image(d) == t
            )
        k = cover.local_degrees.get(w)
        diag = {"image": v, "direction_sums": dict(sums)}
        if sums:
            values = set(sums.values())
            if len(values) != 1:
                rep.add(
                    "harmonicity",
                    w,
                    "direction sums at vertex %r differ: %r" % (w, sums),
                )
                diag["local_degree"] = None
                rep.per_vertex[w] = diag
                continue
            derived = values.pop()
            if k is None:
                k = derived
            elif k != derived:
                rep.add(
                    "harmonicity",
                    w,
                    "stored local degree %r contradicts sums %r" % (k, derived),
                )
        if k is None or k < 1:
            rep.add("degree", w, "vertex %r needs a positive local degree" % w)
            rep.per_vertex[w] = diag
            continue
        diag["local_degree"] = k
        lhs = 2 - 2 * src.genus_of[w]
        rhs = k * (2 - 2 * tgt.genus_of[v]) - sum(
            cover.dart_expansion(d) - 1 for d in src.darts_at(w)
        )
        diag["rh"] = (lhs, rhs)
        if lhs != rhs:
            rep.add(
                "riemann-hurwitz",
                w,
                "local RH fails at %r: 2-2g = %d but %d" % (w, lhs, rhs),
            )
        rep.per_vertex[w] = diag

    # surjectivity and constant degree
    degrees = {}
    for v in tgt.vertices:
        fiber = cover.fiber(v)
        if not fiber:
            rep.add("surjectivity", v, "target vertex %r has empty fiber" % v)
            continue
        degrees[v] = sum(cover.local_degrees.get(w, 0) for w in fiber)
    for t in tgt.edges:
        if not cover.source_edges_over(t):
            rep.add("surjectivity", t, "target edge %r has no preimage" % t)
    for l in tgt.legs:
        if not cover.source_legs_over(l):
            rep.add("surjectivity", l, "target leg %r has no preimage" % l)
    if degrees and len(set(degrees.values())) > 1:
        rep.add("degree", "global", "fiber degrees differ: %r" % degrees)
    return rep


def global_degree(cover):
    """Common degree over every target vertex (asserts equality)."""
    degrees = {
        v: sum(cover.local_degrees[w] for w in cover.fiber(v))
        for v in cover.target.vertices
    }
    values = set(degrees.values())
    if len(values) != 1:
        raise ValueError("inconsistent fiber degrees: %r" % degrees)
    return values.pop()


# ---------------------------------------------------------------------------
# local Hurwitz data and weights


def vertex_hurwitz_product(cover, tgt_vertex, convention=DEFAULT_CONVENTION, cache=None):
    """H(v): product of the local Hurwitz numbers over tgt_vertex.

    Local infeasibility makes H(v) = 0 (the Hurwitz existence problem);
    the diagnostics are available via local_data.
    """
    out = Fraction(1)
    for w in cover.fiber(tgt_vertex):
        g_src, g_tgt, k, profiles = cover.local_data(w)
        try:
            out *= local_hurwitz(g_src, g_tgt, k, profiles, convention, cache=cache)
        except InfeasibleProblem:
            return Fraction(0)
    return out


def hurwitz_product(cover, convention=DEFAULT_CONVENTION, cache=None):
    out = Fraction(1)
    for v in cover.target.vertices:
        out *= vertex_hurwitz_product(cover, v, convention, cache=cache)
    return out


class CoverAutomorphisms:
    """Commuting squares (phi_src, phi_tgt) of graph automorphisms with
    phi_src expansion-preserving; all legs fixed pointwise.  Aut0 is the
    subgroup covering the identity on the target."""

    def __init__(self, pairs, aut0):
        self.pairs = pairs
        self.aut0 = aut0

    @property
    def aut_size(self):
        return len(self.pairs)

    @property
    def aut0_size(self):
        return len(self.aut0)


def automorphism_groups(cover):
    src, tgt = cover.source, cover.target
    src_auts = [
        a
        for a in automorphism_group(src, fix_legs=True)
        if all(
            cover.edge_expansion[e] == cover.edge_expansion[a[edge_dart(e, 0)][1]]
            for e in src.edge_ends
        )
    ]
    tgt_auts = automorphism_group(tgt, fix_legs=True)
    pairs = []
    aut0 = []
    src_darts = src.darts()
    for pt in tgt_auts:
        pt_is_id = all(pt[d] == d for d in pt)
        for ps in src_auts:
            if all(
                cover.dart_image(ps[d]) == pt[cover.dart_image(d)] for d in src_darts
            ):
                pairs.append((ps, pt))
                if pt_is_id:
                    aut0.append(ps)
    return CoverAutomorphisms(pairs, aut0)


def edge_branch_factor(cover, tgt_eid):
    """M_e: product of the expansions above the edge divided by their LCM."""
    exps = cover.expansions_over_edge(tgt_eid)
    prod = 1
    for x in exps:
        prod *= x
    return Fraction(prod, _lcm(exps))


def edge_dilation(cover, tgt_eid):
    """N_e: LCM of the expansions above the edge."""
    return _lcm(cover.expansions_over_edge(tgt_eid))


def weight(cover, convention=DEFAULT_CONVENTION, cache=None, auts=None):
    """omega(Theta) = 1/|Aut0| * prod_v H(v) * prod_e M_e."""
    auts = auts or automorphism_groups(cover)
    out = Fraction(1, auts.aut0_size)
    out *= hurwitz_product(cover, convention, cache=cache)
    for t in cover.target.edges:
        out *= edge_branch_factor(cover, t)
    return out


def dilation_factor(cover):
    """d_Theta(br): product over target edges of N_e."""
    out = 1
    for t in cover.target.edges:
        out *= edge_dilation(cover, t)
    return out


def bbm_multiplicity(cover, convention=DEFAULT_CONVENTION, cache=None, auts=None):
    """1/|Aut0| * prod_v H(v) * prod over interior source edges of the
    expansion; equals weight * dilation_factor."""
    auts = auts or automorphism_groups(cover)
    out = Fraction(1, auts.aut0_size)
    out *= hurwitz_product(cover, convention, cache=cache)
    for e in cover.source.edges:
        out *= cover.edge_expansion[e]
    return out


# ---------------------------------------------------------------------------
# contraction


def contract_cover(cover, tgt_eid):
    """Contract a finite target edge and every source edge above it.

    Vertex genera follow the contraction rule (subgraph genus); the
    local degree of a merged vertex is the sum of the local degrees of
    its members lying over one fixed endpoint of the contracted edge.
    """
    src, tgt = cover.source, cover.target
    if tgt_eid not in tgt.edge_ends:
        raise ValueError("unknown target edge %r" % (tgt_eid,))
    over = set(cover.source_edges_over(tgt_eid))
    new_tgt, tmap = contract_edges(tgt, {tgt_eid})
    new_src, smap = contract_edges(src, over)

    base = tgt.edge_ends[tgt_eid][0]
    members = {}
    for w in src.vertices:
        members.setdefault(smap[w], []).append(w)
    new_degrees = {}
    new_vmap = {}
    for r, ws in members.items():
        new_vmap[r] = tmap[cover.vertex_map[ws[0]]]
        if len(ws) == 1 and ws[0] not in {
            x for e in over for x in src.edge_ends[e]
        }:
            new_degrees[r] = cover.local_degrees[ws[0]]
        else:
            new_degrees[r] = sum(
                cover.local_degrees[w] for w in ws if cover.vertex_map[w] == base
            )

    new_edge_map = {
        e: im for e, im in cover.edge_map.items() if e not in over
    }
    new_edge_exp = {
        e: x for e, x in cover.edge_expansion.items() if e not in over
    }
    return CoverType(
        new_src,
        new_tgt,
        new_vmap,
        new_edge_map,
        dict(cover.leg_map),
        new_edge_exp,
        dict(cover.leg_expansion),
        new_degrees,
    )


def contract_cover_all(cover, tgt_eids):
    out = cover
    for e in sorted(tgt_eids, key=str):
        out = contract_cover(out, e)
    return out


# ---------------------------------------------------------------------------
# metrization


class Length:
    """Exact nonnegative rational length, possibly infinite."""

    __slots__ = ("value",)

    def __init__(self, value):
        if value is None:
            self.value = None
        else:
            v = Fraction(value)
            if v < 0:
                raise ValueError("lengths are nonnegative")
            self.value = v

    @classmethod
    def infinite(cls):
        return cls(None)

    @property
    def is_infinite(self):
        return self.value is None

    def divided_by(self, k):
        if self.is_infinite:
            return Length.infinite()
        return Length(self.value / k)

    def times(self, k):
        if self.is_infinite:
            return Length.infinite()
        return Length(self.value * k)

    def __eq__(self, other):
        if not isinstance(other, Length):
            other = Length(other)
        return self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return "Length(inf)" if self.is_infinite else "Length(%s)" % self.value

    def to_json(self):
        return "inf" if self.is_infinite else "%d/%d" % (
            self.value.numerator,
            self.value.denominator,
        )


class MetricCover:
    """A cover type plus target edge lengths and the induced source
    lengths l(e') = l(e)/d_e' (unique metrization)."""

    def __init__(self, cover, target_lengths):
        self.cover = cover
        self.target_lengths = {}
        for e in cover.target.edges:
            if e not in target_lengths:
                raise ValueError("missing length for target edge %r" % e)
            val = target_lengths[e]
            self.target_lengths[e] = val if isinstance(val, Length) else Length(val)
        self.source_lengths = {
            e: self.target_lengths[t].divided_by(cover.edge_expansion[e])
            for e, (t, _) in cover.edge_map.items()
        }
        self._certify()

    def _certify(self):
        # w_i * l(e_i) agree over each target edge (forced; asserted)
        for t in self.cover.target.edges:
            vals = {
                self.source_lengths[e].times(self.cover.edge_expansion[e]).to_json()
                for e in self.cover.source_edges_over(t)
            }
            assert len(vals) <= 1, "length relations violated over %r" % t

    def length_relations(self, tgt_eid):
        """The certified relation values w_i * l(e_i) over one edge."""
        return [
            self.source_lengths[e].times(self.cover.edge_expansion[e])
            for e in self.cover.source_edges_over(tgt_eid)
        ]

    def recovered_expansion(self, src_eid):
        """l(image)/l(e'); defined for finite nonzero target lengths."""
        t, _ = self.cover.edge_map[src_eid]
        top, bottom = self.target_lengths[t], self.source_lengths[src_eid]
        if top.is_infinite or bottom.is_infinite or bottom.value == 0:
            raise ValueError("expansion recovery needs finite nonzero lengths")
        return top.value / bottom.value


def metrize(cover, target_lengths):
    return MetricCover(cover, target_lengths)


# ---------------------------------------------------------------------------
# canonical form and serialization


def _twisted(cover, tgt_aut):
    """vertex/edge/leg data of the cover post-composed with a target
    automorphism given as a dart map."""
    tgt = cover.target
    vmap = aut_vertex_map(tgt, tgt_aut)
    edge_map = {}
    for e, (t, flip) in cover.edge_map.items():
        image = tgt_aut[edge_dart(t, 0)]
        edge_map[e] = (image[1], flip if image[2] == 0 else 1 - flip)
    leg_map = {l: tgt_aut[leg_dart(t)][1] for l, t in cover.leg_map.items()}
    vertex_map = {w: vmap[v] for w, v in cover.vertex_map.items()}
    return vertex_map, edge_map, leg_map


def cover_canonical_key(cover, target_auts=None):
    """Canonical encoding up to isomorphism of labeled covers: source
    relabelings plus target automorphisms fixing the target legs."""
    src = cover.source
    if target_auts is None:
        target_auts = automorphism_group(cover.target, fix_legs=True)
    best = None
    for taut in target_auts:
        vertex_map, edge_map, leg_map = _twisted(cover, taut)
        inv = {}
        for w in src.vertices:
            sig = sorted(
                (
                    (edge_map[d[1]][0], cover.edge_expansion[d[1]])
                    if d[0] == "e"
                    else ("leg", d[1], leg_map[d[1]], cover.leg_expansion[d[1]])
                )
                for d in src.darts_at(w)
            )
            inv[w] = (
                src.genus_of[w],
                str(vertex_map[w]),
                cover.local_degrees.get(w, 0),
                str(sig),
            )
        classes = {}
        for w in src.vertices:
            classes.setdefault(inv[w], []).append(w)
        class_items = sorted(classes.items(), key=lambda kv: str(kv[0]))
        pools = [itertools.permutations(ws) for _, ws in class_items]
        for images in itertools.product(*pools):
            order = [w for img in images for w in img]
            pos = {w: i for i, w in enumerate(order)}
            venc = tuple(
                (src.genus_of[w], str(vertex_map[w]), cover.local_degrees.get(w, 0))
                for w in order
            )
            eenc = []
            for e, (u, w) in src.edge_ends.items():
                t, flip = edge_map[e]
                a = (pos[u], pos[w], str(t), cover.edge_expansion[e], flip)
                b = (pos[w], pos[u], str(t), cover.edge_expansion[e], 1 - flip)
                if src.is_loop(e) and cover.target.is_loop(t):
                    # the loop's own dart order is gauge
                    a = a[:4] + (0,)
                    b = b[:4] + (0,)
                eenc.append(min(a, b))
            eenc = tuple(sorted(eenc))
            lenc = tuple(
                sorted(
                    (l, pos[src.legs[l]], str(leg_map[l]), cover.leg_expansion[l])
                    for l in src.legs
                )
            )
            enc = (venc, eenc, lenc)
            if best is None or enc < best:
                best = enc
    return json.dumps(best, sort_keys=True)


def cover_to_json(cover):
    return {
        "source": graph_to_json(cover.source),
        "target": graph_to_json(cover.target),
        "vertex_map": {str(w): v for w, v in sorted(cover.vertex_map.items())},
        "dart_map": {
            str(e): {"edge": t, "flip": flip}
            for e, (t, flip) in sorted(cover.edge_map.items())
        },
        "leg_map": dict(sorted(cover.leg_map.items())),
        "expansion": {
            "edges": {str(e): x for e, x in sorted(cover.edge_expansion.items())},
            "legs": dict(sorted(cover.leg_expansion.items())),
        },
        "local_degrees": {str(w): k for w, k in sorted(cover.local_degrees.items())},
    }


def cover_to_dot(cover, name="cover"):
    lines = ["digraph %s {" % name]
    lines.append("  subgraph cluster_source {")
    lines.append('    label="source";')
    for w in cover.source.vertices:
        lines.append('    s%d [label="g=%d"];' % (w, cover.source.genus_of[w]))
    for e in cover.source.edges:
        u, w = cover.source.edge_ends[e]
        lines.append(
            '    s%d -> s%d [dir=none, label="%d"];'
            % (u, w, cover.edge_expansion[e])
        )
    for l in sorted(cover.source.legs):
        node = "sleg_%s" % l.replace(".", "_")
        lines.append('    %s [shape=none, label="%s"];' % (node, l))
        lines.append(
            "    s%d -> %s [dir=none, style=dashed, label=\"%d\"];"
            % (cover.source.legs[l], node, cover.leg_expansion[l])
        )
    lines.append("  }")
    lines.append("  subgraph cluster_target {")
    lines.append('    label="target";')
    for v in cover.target.vertices:
        lines.append('    t%d [label="g=%d"];' % (v, cover.target.genus_of[v]))
    for e in cover.target.edges:
        u, w = cover.target.edge_ends[e]
        lines.append("    t%d -> t%d [dir=none];" % (u, w))
    for l in sorted(cover.target.legs):
        node = "tleg_%s" % l.replace(".", "_")
        lines.append('    %s [shape=none, label="%s"];' % (node, l))
        lines.append("    t%d -> %s [dir=none, style=dashed];" % (cover.target.legs[l], node))
    lines.append("  }")
    for w, v in sorted(cover.vertex_map.items()):
        lines.append("  s%d -> t%d [style=dotted, constraint=false];" % (w, v))
    lines.append("}")
    return "\n".join(lines)
