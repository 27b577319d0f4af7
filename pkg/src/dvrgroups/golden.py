"""Pinned oracle values.

Each entry is ``{"query": ..., "value": ..., "oracle": ...}``. Regeneration goes
through :mod:`dvrgroups.oracles`, never through the operation being pinned.
"""
from __future__ import annotations

import json
from pathlib import Path

from . import oracles

GOLDEN_PATH = Path(__file__).with_name("golden") / "golden.json"


def _entries():
    # (query, oracle name, thunk)
    yield {"op": "invert", "p": 2, "N": 4, "a": 3}, "egcd_inverse", lambda: oracles.egcd_inverse(3, 16)
    yield {"op": "level", "p": 2, "N": 16, "gens": [6]}, "closure_level", lambda: oracles.closure_level([6], 2, 16)
    yield {"op": "level", "p": 3, "N": 6, "gens": [18, 45]}, "closure_level", lambda: oracles.closure_level([18, 45], 3, 6)
    yield (
        {"op": "hensel", "p": 2, "N": 16, "coeffs": [31, 0, 0, 0, 1], "a": 1},
        "brute_force_roots (roots = 1 mod 8)",
        lambda: [x for x in oracles.brute_force_roots([31, 0, 0, 0, 1], 2**16, range(1, 2**16, 2)) if x % 8 == 1],
    )
    yield (
        {"op": "hensel", "p": 5, "N": 10, "coeffs": [4, 0, 0, 0, 1], "a": 4},
        "digit_lift_roots (exhaustive mod 5^4, then digit by digit)",
        lambda: oracles.digit_lift_roots([4, 0, 0, 0, 1], 5, 10, 4, 4, 5),
    )
    yield (
        {"op": "el-diagonal-clearing", "p": 3, "N": 8, "k": 1, "x": 1},
        "clearing_solutions",
        lambda: list(oracles.clearing_solutions(3, 8, 1, 1)),
    )
    for n, p, m in [(2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 3, 1), (2, 3, 2), (2, 5, 1), (2, 7, 1), (3, 2, 1)]:
        yield (
            {"op": "sl-order", "n": n, "p": p, "m": m},
            "brute_force_sl_order",
            lambda n=n, p=p, m=m: oracles.brute_force_sl_order(n, p**m),
        )
    for n, p, k, m in [(2, 2, 1, 2), (2, 2, 1, 3), (2, 3, 1, 2), (2, 2, 2, 3), (3, 2, 1, 2), (2, 2, 0, 3), (3, 2, 0, 1)]:
        yield (
            {"op": "el-index", "n": n, "p": p, "k": k, "m": m},
            "naive_el_index (det enumeration / fixed-point closure)",
            lambda n=n, p=p, k=k, m=m: oracles.naive_el_index(n, p, k, m),
        )
    for n, p, m in [(2, 2, 1), (2, 3, 1), (2, 2, 2), (2, 5, 1), (2, 7, 1), (2, 3, 2), (3, 2, 1)]:
        yield (
            {"op": "abelianization-order", "n": n, "p": p, "m": m},
            "naive_abelianization_order (all commutator pairs)",
            lambda n=n, p=p, m=m: oracles.naive_abelianization_order(n, p, m),
        )


def regenerate(path: Path = GOLDEN_PATH) -> list[dict]:
    records = [{"query": q, "value": thunk(), "oracle": name} for q, name, thunk in _entries()]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
    return records


def load(path: Path = GOLDEN_PATH) -> list[dict]:
    return json.loads(path.read_text())


def lookup(query: dict, path: Path = GOLDEN_PATH):
    """Golden record whose query equals ``query``, or None."""
    for rec in load(path):
        if rec["query"] == query:
            return rec
    return None
