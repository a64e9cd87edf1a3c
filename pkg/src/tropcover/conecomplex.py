"""Cone complexes for cover types and the branch map on them.

A cone is stored abstractly by its coordinate index set (the finite
edges of the associated target graph; edge ids are stable under
contraction) together with its payload and the automorphism action on
coordinates.  Face morphisms are the injections dual to contractions:
contracting an edge is the face where its coordinate vanishes, so the
coordinate maps are inclusions of index sets.  Quotients are never
materialized: group actions are recorded and folded cardinalities are
derived lazily.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

from .covers import (
    automorphism_groups,
    contract_cover,
    cover_canonical_key,
    dilation_factor,
    edge_dilation,
    weight,
)
from .enumeration import covers_over_target
from .graphs import (
    automorphism_group,
    canonical_key,
    contract_edges,
    edge_dart,
)
from .hurwitz import DEFAULT_CONVENTION


class Cone:
    def __init__(self, cone_id, coords, payload, kind, payload_key, contracted, aut_actions):
        self.id = cone_id
        self.coords = tuple(coords)
        self.payload = payload
        self.kind = kind  # "cover" | "graph" | "chain"
        self.payload_key = payload_key
        self.contracted = frozenset(contracted)
        self.aut_actions = aut_actions  # list of {coord: coord} permutations

    @property
    def dimension(self):
        return len(self.coords)

    def orbit_count(self):
        """Number of coordinate orbits under the recorded action (lazy
        quotient data; the quotient space itself is never built)."""
        parent = {c: c for c in self.coords}

        def find(c):
            while parent[c] != c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        for action in self.aut_actions:
            for c in self.coords:
                a, b = find(c), find(action[c])
                if a != b:
                    parent[a] = b
        return len({find(c) for c in self.coords})

    def to_json(self):
        return {
            "id": self.id,
            "dimension": self.dimension,
            "kind": self.kind,
            "coords": [str(c) for c in self.coords],
            "contracted": sorted(str(c) for c in self.contracted),
            "payload_key": self.payload_key,
            "aut_actions": [
                {str(a): str(b) for a, b in sorted(act.items())}
                for act in self.aut_actions
            ],
        }


class FaceArrow:
    def __init__(self, child, parent, coord_map):
        self.child = child
        self.parent = parent
        self.coord_map = dict(coord_map)

    def to_json(self):
        return {
            "child": self.child,
            "parent": self.parent,
            "coord_map": {str(a): str(b) for a, b in sorted(self.coord_map.items())},
        }


class ConeComplex:
    def __init__(self, cones, arrows, diagnostics=None):
        self.cones = {c.id: c for c in cones}
        self.arrows = arrows
        self.diagnostics = diagnostics or []

    def cone_list(self):
        return [self.cones[k] for k in sorted(self.cones)]

    def arrow_pairs(self):
        return {(a.child, a.parent) for a in self.arrows}

    def parents_of(self, cone_id):
        return sorted({a.parent for a in self.arrows if a.child == cone_id})

    def top_dimension(self):
        return max((c.dimension for c in self.cones.values()), default=0)

    def top_cones(self):
        top = self.top_dimension()
        return [c for c in self.cone_list() if c.dimension == top]

    def chains(self):
        """All nonempty strictly increasing chains (faces first) of
        positive-dimensional cones (the zero cone is the shared apex,
        not a poset element)."""
        order = self.arrow_pairs()
        nodes = sorted(c.id for c in self.cones.values() if c.dimension >= 1)

        below = {n: {m for m in nodes if (m, n) in order} for n in nodes}
        out = []

        def extend(chain, candidates):
            out.append(tuple(reversed(chain)))
            for n in sorted(candidates):
                extend(chain + [n], candidates & below[n])

        for n in nodes:
            extend([n], below[n])
        return out

    def maximal_chains(self):
        chains = set(self.chains())
        maximal = []
        for c in chains:
            extendable = any(
                set(c) < set(other) and tuple(x for x in other if x in set(c)) == c
                for other in chains
                if len(other) == len(c) + 1
            )
            if not extendable:
                maximal.append(c)
        return maximal

    def closure_ok(self):
        """Arrow composition stays inside the recorded arrows."""
        pairs = self.arrow_pairs()
        for (a, b) in pairs:
            for (c, d) in pairs:
                if b == c and (a, d) not in pairs:
                    return False
        return True

    def to_json(self):
        return {
            "cones": [c.to_json() for c in self.cone_list()],
            "arrows": [a.to_json() for a in self.arrows],
            "diagnostics": list(self.diagnostics),
        }


def _cover_aut_actions(cover, coords):
    actions = []
    seen = set()
    for _, pt in automorphism_groups(cover).pairs:
        perm = {}
        for e in coords:
            image = pt[edge_dart(e, 0)]
            perm[e] = image[1]
        key = tuple(sorted(perm.items()))
        if key not in seen:
            seen.add(key)
            actions.append(perm)
    return actions


def _graph_aut_actions(graph):
    actions = []
    seen = set()
    for aut in automorphism_group(graph, fix_legs=True):
        perm = {e: aut[edge_dart(e, 0)][1] for e in graph.edges}
        key = tuple(sorted(perm.items()))
        if key not in seen:
            seen.add(key)
            actions.append(perm)
    return actions


def target_complex(target):
    """Cone complex of all contractions of a target graph."""
    cones = []
    arrows = []
    ids = {}
    for r in range(len(target.edges) + 1):
        for S in itertools.combinations(target.edges, r):
            S = frozenset(S)
            contracted, _ = contract_edges(target, S) if S else (target, None)
            cone_id = "m%d" % len(cones)
            ids[S] = cone_id
            cones.append(
                Cone(
                    cone_id,
                    [e for e in target.edges if e not in S],
                    contracted,
                    "graph",
                    canonical_key(contracted),
                    S,
                    _graph_aut_actions(contracted),
                )
            )
    for S, cone_id in ids.items():
        for T, other in ids.items():
            if S < T:  # more contracted = smaller face
                coord_map = {e: e for e in target.edges if e not in T}
                arrows.append(FaceArrow(other, cone_id, coord_map))
    return ConeComplex(cones, arrows)


def build_complex(
    target,
    d,
    g,
    leg_profiles,
    convention=DEFAULT_CONVENTION,
    cache=None,
    max_degree=6,
):
    """One cone per cover type over each contraction of the target, with
    face morphisms induced by contracting covers.

    A contraction of an enumerated cover that is missing from the
    enumeration over the contracted target is recorded in the
    diagnostics (it would indicate an enumeration bug).
    """
    diagnostics = []
    strata = {}  # frozenset S -> (contracted target, {canonical key: cone id})
    cones = []
    covers_by_id = {}

    for r in range(len(target.edges) + 1):
        for S in itertools.combinations(target.edges, r):
            S = frozenset(S)
            tgt_S = contract_edges(target, S)[0] if S else target
            covers = covers_over_target(
                tgt_S, d, g, leg_profiles, convention, cache=cache, max_degree=max_degree
            )
            keymap = {}
            for cover in covers:
                cone_id = "c%d" % len(cones)
                coords = [e for e in target.edges if e not in S]
                key = cover_canonical_key(cover)
                keymap[key] = cone_id
                covers_by_id[cone_id] = cover
                cones.append(
                    Cone(
                        cone_id,
                        coords,
                        cover,
                        "cover",
                        key,
                        S,
                        _cover_aut_actions(cover, coords),
                    )
                )
            strata[S] = (tgt_S, keymap)

    arrows = []
    seen_arrows = set()
    for cone in list(cones):
        if cone.kind != "cover":
            continue
        S = cone.contracted
        for e in cone.coords:
            child_cover = contract_cover(covers_by_id[cone.id], e)
            T = S | {e}
            key = cover_canonical_key(child_cover)
            keymap = strata[T][1]
            if key not in keymap:
                diagnostics.append(
                    "contraction of %s along %s missing over stratum %s"
                    % (cone.id, e, sorted(map(str, T)))
                )
                continue
            child_id = keymap[key]
            if (child_id, cone.id) not in seen_arrows:
                seen_arrows.add((child_id, cone.id))
                coord_map = {c: c for c in target.edges if c not in T}
                arrows.append(FaceArrow(child_id, cone.id, coord_map))

    # transitive closure (contractions compose)
    changed = True
    while changed:
        changed = False
        pairs = {(a.child, a.parent): a for a in arrows}
        for (a, b) in list(pairs):
            for (c, d2) in list(pairs):
                if b == c and (a, d2) not in pairs:
                    comp = {
                        k: pairs[(c, d2)].coord_map[v]
                        for k, v in pairs[(a, b)].coord_map.items()
                    }
                    arrows.append(FaceArrow(a, d2, comp))
                    changed = True
        if changed:
            continue
    return ConeComplex(cones, arrows, diagnostics)


# ---------------------------------------------------------------------------
# barycentric subdivision


def _rank(vectors, coords):
    """Rank over Q of indicator/dict vectors."""
    rows = [[Fraction(v.get(c, 0)) for c in coords] for v in vectors]
    rank = 0
    col = 0
    while rank < len(rows) and col < len(coords):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def barycentric_subdivision(complex_):
    """The poset-of-chains subdivision: one simplicial cone per chain of
    positive-dimensional cones, spanned by their barycenters."""
    chains = complex_.chains()
    cones = []
    arrows = []
    ids = {}
    for chain in sorted(chains):
        cone_id = "b%d" % len(cones)
        ids[chain] = cone_id
        top = complex_.cones[chain[-1]]
        rays = [
            {c: 1 for c in complex_.cones[member].coords} for member in chain
        ]
        cone = Cone(
            cone_id,
            top.coords,
            {"chain": chain, "rays": rays},
            "chain",
            json.dumps(list(chain)),
            frozenset(),
            [],
        )
        cone._chain = chain
        cone._rays = rays
        cones.append(cone)
    for chain in chains:
        for r in range(1, len(chain)):
            for sub in itertools.combinations(chain, r):
                arrows.append(
                    FaceArrow(
                        ids[sub],
                        ids[chain],
                        {i: chain.index(s) for i, s in enumerate(sub)},
                    )
                )
    sub = ConeComplex(cones, arrows)
    sub._chain_ids = ids
    return sub


def chain_cone_dimension(cone):
    return len(cone._chain)


def is_simplicial(cone, ambient_coords):
    """Generating rays linearly independent."""
    rays = cone._rays
    return _rank(rays, list(ambient_coords)) == len(rays)


def subdivision_is_simplicial(sub, original):
    return all(
        is_simplicial(c, original.cones[c._chain[-1]].coords)
        for c in sub.cone_list()
    )


# ---------------------------------------------------------------------------
# the branch map as a morphism of complexes


class BranchMapReport:
    def __init__(self, per_cone, degrees, unmatched, uncovered):
        self.per_cone = per_cone  # cone id -> {target cone, dilations, weight}
        self.degrees = degrees  # target cone id -> weighted degree over it
        self.unmatched = unmatched  # cover cones without a target cone
        self.uncovered = uncovered  # target cones with empty fiber

    @property
    def surjective(self):
        return not self.uncovered

    def to_json(self):
        return {
            "degrees": {k: str(v) for k, v in sorted(self.degrees.items())},
            "per_cone": {
                k: {
                    "target_cone": v["target_cone"],
                    "dilations": {str(e): n for e, n in sorted(v["dilations"].items())},
                    "dilation_factor": v["dilation_factor"],
                    "weight": str(v["weight"]),
                }
                for k, v in sorted(self.per_cone.items())
            },
            "unmatched": list(self.unmatched),
            "uncovered": list(self.uncovered),
        }


def branch_complex_map(cover_complex, target_cplx, convention=DEFAULT_CONVENTION, cache=None):
    """The induced coordinate-wise map from cover cones to target cones,
    with N_e dilations on the integral structures; reports the weighted
    degree over every top-dimensional target cone."""
    by_contraction = {}
    for c in target_cplx.cone_list():
        by_contraction[c.contracted] = c

    per_cone = {}
    unmatched = []
    covered = set()
    for cone in cover_complex.cone_list():
        if cone.kind != "cover":
            continue
        tcone = by_contraction.get(cone.contracted)
        if tcone is None or set(tcone.coords) != set(cone.coords):
            unmatched.append(cone.id)
            continue
        covered.add(tcone.id)
        cover = cone.payload
        dilations = {e: edge_dilation(cover, e) for e in cover.target.edges}
        per_cone[cone.id] = {
            "target_cone": tcone.id,
            "dilations": dilations,
            "dilation_factor": dilation_factor(cover),
            "weight": weight(cover, convention, cache=cache),
        }

    degrees = {}
    top = target_cplx.top_dimension()
    uncovered = []
    for tcone in target_cplx.cone_list():
        if tcone.id not in covered:
            uncovered.append(tcone.id)
        if tcone.dimension != top:
            continue
        total = Fraction(0)
        for cone_id, info in per_cone.items():
            if info["target_cone"] == tcone.id:
                total += info["weight"] * info["dilation_factor"]
        degrees[tcone.id] = total
    return BranchMapReport(per_cone, degrees, unmatched, uncovered)


def lattice_point_check(cover, height=5):
    """On one cone: the branch map is a bijection from the cone's lattice
    points onto the points divisible by the recorded dilations.

    Source-integral metrizations are exactly the target metrizations
    with N_e | l(e); checks the box 0..height by enumeration.
    """
    edges = cover.target.edges
    dil = {e: edge_dilation(cover, e) for e in edges}
    image = set()
    for point in itertools.product(range(height + 1), repeat=len(edges)):
        lengths = dict(zip(edges, point))
        if all(lengths[e] % dil[e] == 0 for e in edges):
            image.add(point)
    expected = 1
    for e in edges:
        expected *= height // dil[e] + 1
    return len(image) == expected
