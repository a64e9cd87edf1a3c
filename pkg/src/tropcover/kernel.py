"""Backend dispatch for the monodromy tuple-counting kernel.

The compiled extension (tropcover._tuplecount_c, built from the .pyx
source) is preferred when importable; otherwise the pure-Python twin in
tropcover._tuplecount is used.  Both implement the identical algorithm
and are cross-checked in the test suite.
"""

from __future__ import annotations

from . import _tuplecount as _py

try:
    from . import _tuplecount_c as _fast
except ImportError:  # extension not built; pure fallback
    _fast = None


def backend_name():
    return "cython" if _fast is not None else "python"


def backends():
    """Available backends as a name -> module mapping."""
    out = {"python": _py}
    if _fast is not None:
        out["cython"] = _fast
    return out


def _count_chunk(args):
    d, h, class_lists, n_transpositions, transitive, lo, hi = args
    backend = _fast if _fast is not None else _py
    return backend.raw_tuple_count(
        d, h, class_lists, n_transpositions, transitive, first_slot_range=(lo, hi)
    )


def raw_tuple_count(d, h, class_lists, n_transpositions, transitive, jobs=1):
    """Count monodromy tuples; see tropcover._tuplecount for semantics.

    With jobs > 1 the first enumerated slot is split across a process
    pool; counting is an associative reduction so the result does not
    depend on the schedule.
    """
    class_lists = [tuple(tuple(p) for p in c) for c in class_lists]
    backend = _fast if _fast is not None else _py
    if jobs and jobs > 1 and d <= _py.TABLE_LIMIT:
        size = _py.first_slot_size(d, h, class_lists, n_transpositions)
        if size >= 2 * jobs:
            from concurrent.futures import ProcessPoolExecutor

            step = (size + jobs - 1) // jobs
            chunks = [
                (d, h, class_lists, n_transpositions, transitive, lo, min(lo + step, size))
                for lo in range(0, size, step)
            ]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                return sum(pool.map(_count_chunk, chunks))
    return backend.raw_tuple_count(d, h, class_lists, n_transpositions, transitive)
