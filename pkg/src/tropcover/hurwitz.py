"""Classical Hurwitz numbers in an explicit marking convention.

A Hurwitz problem is (g, h, d, profiles, convention): degree-d covers of
a genus-h curve by genus-g curves with ramification profiles[i] over the
i-th marked point and simple ramification over s further points, s being
determined by Riemann-Hurwitz.  Covers are weighted by 1/|Aut|.

Conventions scale the plain monodromy count (tuples / d!):

* unmarked      -- nothing upstairs is labeled; the raw count.
* parts_labeled -- the preimages of the r special points are labeled
                   (one label per part of each profile); factor
                   prod_i prod_k m_k(mu^i)!.
* fully_marked  -- additionally the preimages of the s simple branch
                   points are labeled; extra factor ((d-2)!)^s.  This is
                   the default and the convention of the tropical
                   correspondence.

The Lando-Zvonkine closed form (t-1)! d^{t-2} for h_{0->0,d}((d), nu) is
only routed once the convention probe has identified, by comparison with
the brute-force oracle, which convention it computes (see
probe_lz_convention; empirically: parts_labeled).
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import __version__
from .symgroup import (
    Partition,
    brute_tuple_count,
    marking_factor,
    partitions_of,
    simple_profile,
)

CONVENTIONS = ("fully_marked", "parts_labeled", "unmarked")
DEFAULT_CONVENTION = "fully_marked"

CACHE_ENV_VAR = "TROPCOVER_CACHE"
LZ_PROBE_KEY = "__lz_convention__"


class InfeasibleProblem(ValueError):
    """Riemann-Hurwitz does not admit the requested discrete data."""


class ResourceGuard(RuntimeError):
    """The requested search exceeds the configured size bounds."""


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise ValueError(
            "unknown convention %r (expected one of %s)" % (convention, CONVENTIONS)
        )


def simple_branch_count(g, h, d, profiles):
    """The number s of simple branch points from Riemann-Hurwitz.

    s = (2g-2) - d(2h-2) - sum_i (d - length(mu^i)); raises
    InfeasibleProblem when negative.
    """
    profiles = [p if isinstance(p, Partition) else Partition(p) for p in profiles]
    if d < 1:
        raise InfeasibleProblem("degree must be >= 1")
    for p in profiles:
        if p.size != d:
            raise InfeasibleProblem("profile %r does not partition %d" % (p.parts, d))
    s = (2 * g - 2) - d * (2 * h - 2) - sum(d - p.length for p in profiles)
    if s < 0:
        raise InfeasibleProblem(
            "Riemann-Hurwitz gives %d simple branch points for g=%d h=%d d=%d %r"
            % (s, g, h, d, [p.parts for p in profiles])
        )
    return s


@dataclass(frozen=True)
class HurwitzProblem:
    g: int
    h: int
    d: int
    profiles: tuple
    convention: str = DEFAULT_CONVENTION

    def __post_init__(self):
        profiles = tuple(
            p if isinstance(p, Partition) else Partition(p) for p in self.profiles
        )
        object.__setattr__(self, "profiles", profiles)
        _check_convention(self.convention)
        if self.g < 0 or self.h < 0:
            raise InfeasibleProblem("genera must be nonnegative")
        simple_branch_count(self.g, self.h, self.d, profiles)  # validates

    @property
    def s(self):
        return simple_branch_count(self.g, self.h, self.d, self.profiles)

    def key(self):
        """Canonical cache key: profiles sorted, convention explicit."""
        profs = sorted((p.parts for p in self.profiles), reverse=True)
        return "g=%d;h=%d;d=%d;mu=%s;conv=%s" % (
            self.g,
            self.h,
            self.d,
            json.dumps([list(p) for p in profs]),
            self.convention,
        )


def convention_factor(d, profiles, s, convention):
    """Multiplier turning the plain monodromy count into the convention's."""
    _check_convention(convention)
    if convention == "unmarked":
        return 1
    factor = 1
    for p in profiles:
        factor *= marking_factor(p)
    if convention == "fully_marked" and s > 0 and d >= 2:
        factor *= marking_factor(simple_profile(d)) ** s
    return factor


def brute_force_hurwitz(problem, max_degree=6, max_branch_points=8, jobs=1):
    """Monodromy-counting oracle: (transitive tuple count / d!) x factor."""
    p = problem
    s = p.s
    if p.d > max_degree or (len(p.profiles) + s) > max_branch_points:
        raise ResourceGuard(
            "d=%d with %d branch points exceeds the guard (max_degree=%d, "
            "max_branch_points=%d)" % (p.d, len(p.profiles) + s, max_degree, max_branch_points)
        )
    count = brute_tuple_count(
        p.h, list(p.profiles), s, d=p.d, transitive=True, jobs=jobs
    )
    value = Fraction(count, factorial(p.d))
    return value * convention_factor(p.d, p.profiles, s, p.convention)


def lando_zvonkine(d, nu):
    """(t-1)! d^{t-2} with t = length(nu): the stated closed form for
    h_{0->0,d}((d), nu)."""
    nu = nu if isinstance(nu, Partition) else Partition(nu)
    if nu.size != d:
        raise InfeasibleProblem("nu must partition d")
    t = nu.length
    return Fraction(factorial(t - 1)) * Fraction(d) ** (t - 2)


# ---------------------------------------------------------------------------
# persistent cache


class HurwitzCache:
    """In-memory cache of exact values, optionally persisted as JSON lines.

    Records are {key, value_num, value_den, convention, tool_version};
    rationals are serialized as decimal integer strings so replays are
    bit-exact.  Writes are idempotent: re-storing an existing key with
    the same value is a no-op, a different value is an error.
    """

    def __init__(self, path=None):
        self.path = path
        self._values = {}
        self._meta = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        if path and os.path.exists(path):
            self._load()

    def _load(self):
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = rec["key"]
                if key == LZ_PROBE_KEY:
                    self._meta[key] = rec["convention"]
                    continue
                value = Fraction(int(rec["value_num"]), int(rec["value_den"]))
                old = self._values.get(key)
                if old is not None and old != value:
                    raise ValueError(
                        "cache conflict for %r: %s vs %s" % (key, old, value)
                    )
                self._values[key] = value

    def _append(self, record):
        if not self.path:
            return
        line = json.dumps(record, sort_keys=True) + "\n"
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)

    def get(self, key):
        with self._lock:
            value = self._values.get(key)
            if value is None:
                self.misses += 1
            else:
                self.hits += 1
            return value

    def store(self, key, value, convention):
        with self._lock:
            old = self._values.get(key)
            if old is not None:
                if old != value:
                    raise ValueError(
                        "cache conflict for %r: %s vs %s" % (key, old, value)
                    )
                return
            self._values[key] = value
            self._append(
                {
                    "key": key,
                    "value_num": str(value.numerator),
                    "value_den": str(value.denominator),
                    "convention": convention,
                    "tool_version": __version__,
                }
            )

    def lz_convention(self):
        return self._meta.get(LZ_PROBE_KEY)

    def record_lz_convention(self, convention):
        with self._lock:
            old = self._meta.get(LZ_PROBE_KEY)
            if old is not None and old != convention:
                raise ValueError(
                    "conflicting probe results: %r vs %r" % (old, convention)
                )
            if old is None:
                self._meta[LZ_PROBE_KEY] = convention
                self._append(
                    {
                        "key": LZ_PROBE_KEY,
                        "value_num": "0",
                        "value_den": "1",
                        "convention": convention,
                        "tool_version": __version__,
                    }
                )


_default_cache = None
_default_cache_lock = threading.Lock()


def default_cache():
    """Process-wide cache; persists to $TROPCOVER_CACHE when set."""
    global _default_cache
    with _default_cache_lock:
        if _default_cache is None:
            _default_cache = HurwitzCache(os.environ.get(CACHE_ENV_VAR) or None)
        return _default_cache


def reset_default_cache():
    global _default_cache
    with _default_cache_lock:
        _default_cache = None


# ---------------------------------------------------------------------------
# convention probe and dispatcher


def probe_lz_convention(max_d=6, max_parts=3, cache=None):
    """Compare lando_zvonkine with the brute-force oracle per convention.

    Runs over all h_{0->0,d}((d), nu) with d <= max_d and nu of at most
    max_parts parts, and returns (convention, table) where convention is
    the unique one matching in every case (None if none or several
    survive) and table lists (d, nu, lz, {convention: value}).
    """
    table = []
    alive = set(CONVENTIONS)
    for d in range(2, max_d + 1):
        for nu in partitions_of(d, max_length=max_parts):
            problem_values = {}
            lz = lando_zvonkine(d, nu)
            raw = None
            for conv in CONVENTIONS:
                prob = HurwitzProblem(0, 0, d, (Partition((d,)), nu), conv)
                if raw is None:
                    raw = brute_force_hurwitz(
                        HurwitzProblem(0, 0, d, (Partition((d,)), nu), "unmarked")
                    )
                problem_values[conv] = raw * convention_factor(
                    d, prob.profiles, prob.s, conv
                )
            table.append((d, nu, lz, problem_values))
            alive = {c for c in alive if problem_values[c] == lz}
    result = alive.pop() if len(alive) == 1 else None
    if result is not None:
        (cache or default_cache()).record_lz_convention(result)
    return result, table


def _lz_shape(profiles, d):
    """Return nu if profiles is [(d), nu] up to order, else None."""
    if len(profiles) != 2:
        return None
    a, b = profiles
    if a.parts == (d,):
        return b
    if b.parts == (d,):
        return a
    return None


def classical_hurwitz(
    problem, cache=None, max_degree=6, max_branch_points=8, jobs=1, return_route=False
):
    """Dispatcher: cache, then the LZ closed form under its validated
    convention, then the brute-force oracle."""
    p = problem
    cache = cache or default_cache()
    key = p.key()
    value = cache.get(key)
    route = "cache"
    if value is None:
        nu = _lz_shape(p.profiles, p.d) if (p.g == 0 and p.h == 0) else None
        if nu is not None and p.convention == cache.lz_convention():
            value = lando_zvonkine(p.d, nu)
            route = "lando_zvonkine"
        else:
            value = brute_force_hurwitz(
                p, max_degree=max_degree, max_branch_points=max_branch_points, jobs=jobs
            )
            route = "brute_force"
        cache.store(key, value, p.convention)
    if return_route:
        return value, route
    return value


def local_hurwitz(
    g_src,
    g_tgt,
    d_local,
    profiles,
    convention=DEFAULT_CONVENTION,
    cache=None,
    max_degree=6,
    max_branch_points=8,
):
    """Hurwitz number of the local problem at one source vertex.

    profiles are the expansion-factor partitions along the tangent
    directions at the image vertex, one partition of d_local per
    direction; the implied simple-branch count comes from
    Riemann-Hurwitz on the local data.
    """
    problem = HurwitzProblem(
        g_src, g_tgt, d_local, tuple(Partition(p) for p in profiles), convention
    )
    return classical_hurwitz(
        problem, cache=cache, max_degree=max_degree, max_branch_points=max_branch_points
    )
