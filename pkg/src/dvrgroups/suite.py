"""End-to-end exact checks run by ``dvrgroups verify-paper``.

Each ``check_*`` function returns a :class:`CheckResult`; any exact identity
failure makes it fail. Instance counts default to the acceptance sizes.
"""
from __future__ import annotations

import functools
import inspect
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import congruence as cg
from . import flags as fl
from . import golden
from . import matgroup as mg
from .hensel import Polynomial, fourth_root_witness, hensel_lift, poly_deriv, poly_eval
from .localring import make_ring
from .oracles import brute_force_roots


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "seconds": round(self.seconds, 3), **self.details}


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    return wrapper


# 1 ---------------------------------------------------------------------------


@_timed
def check_fourth_roots(primes=(2, 3, 5, 7), precision=32) -> CheckResult:
    rows = []
    ok = True
    for p in primes:
        R = make_ring("zero", p, precision)
        w = fourth_root_witness(R)
        start = 1 if p == 2 else p - 1
        expected_r = 31 if p == 2 else p - 1
        f = Polynomial.from_ints(R, [expected_r, 0, 0, 0, 1])
        e = poly_eval(poly_deriv(f), R(start)).valuation()
        good = (
            w.r == expected_r
            and not w.certificate
            and w.q.is_unit()
            and (w.q - start).valuation() >= e + 1
            and (w.q**4 + w.r) == 0
        )
        ok &= good
        rows.append({"p": p, "q": w.q.to_json(), "r": w.r, "ok": good})
    return CheckResult("fourth_root_witness", ok, {"witnesses": rows})


# 2 ---------------------------------------------------------------------------

HENSEL_MODELS = [(3, 10), (5, 6), (7, 5), (11, 4), (13, 4)]


def hensel_instances(rng: random.Random, count: int):
    """``(p, N, coeffs, a)`` with ``f(a) = 0 mod p`` and ``f'(a)`` a unit."""
    out = []
    while len(out) < count:
        p, N = HENSEL_MODELS[len(out) % len(HENSEL_MODELS)]
        deg = rng.randint(2, 4)
        coeffs = [rng.randrange(p**N) for _ in range(deg + 1)]
        a = rng.randrange(p)
        # shift the constant term so that a is a root mod p
        val = sum(c * a**i for i, c in enumerate(coeffs))
        coeffs[0] = (coeffs[0] - val) % p**N
        deriv = sum(i * c * a ** (i - 1) for i, c in enumerate(coeffs) if i)
        if deriv % p:
            out.append((p, N, coeffs, a))
    return out


@_timed
def check_hensel_vs_brute_force(count=24, seed=0) -> CheckResult:
    rng = random.Random(seed)
    ok = True
    mismatches = []
    for p, N, coeffs, a in hensel_instances(rng, count):
        R = make_ring("zero", p, N)
        root = hensel_lift(Polynomial.from_ints(R, coeffs), R(a)).payload
        brute = brute_force_roots(coeffs, p**N, range(a, p**N, p))
        if brute != [root]:
            ok = False
            mismatches.append({"p": p, "N": N, "coeffs": coeffs, "a": a, "hensel": root, "brute": brute})
    # p = 2, f'(1) = 4: roots are unique only modulo 2^(N - 2)
    R = make_ring("zero", 2, 16)
    root = hensel_lift(Polynomial.from_ints(R, [31, 0, 0, 0, 1]), R(1)).payload
    brute = golden.lookup({"op": "hensel", "p": 2, "N": 16, "coeffs": [31, 0, 0, 0, 1], "a": 1})["value"]
    two_adic_ok = root in brute and len({x % 2**14 for x in brute}) == 1
    ok &= two_adic_ok
    return CheckResult(
        "hensel_vs_brute_force",
        ok,
        {"instances": count, "mismatches": mismatches, "two_adic_root": root, "two_adic_ok": two_adic_ok},
    )


# 3, 4 ----------------------------------------------------------------------------


@_timed
def check_sl2_roundtrip(count=1000, primes=(2, 3, 5), precision=12, seed=0) -> CheckResult:
    rng = random.Random(seed)
    failures = 0
    longest = 0
    for p in primes:
        R = make_ring("zero", p, precision)
        for _ in range(count):
            M = mg.random_sl(R, 2, rng)
            w = mg.decompose_sl2(M)
            longest = max(longest, len(w))
            if mg.evaluate_word(w) != M or len(w) > 13:
                failures += 1
    R4 = make_ring("zero", 2, 2)
    exhaustive = list(mg.all_sl2(R4))
    ex_fail = sum(1 for M in exhaustive if mg.evaluate_word(mg.decompose_sl2(M)) != M)
    ok = failures == 0 and ex_fail == 0 and len(exhaustive) == 48
    return CheckResult(
        "sl2_roundtrip",
        ok,
        {"random": count * len(primes), "failures": failures, "max_letters": longest,
         "exhaustive_sl2_z4": len(exhaustive), "exhaustive_failures": ex_fail},
    )


@_timed
def check_sln_roundtrip(count=200, seed=0) -> CheckResult:
    rng = random.Random(seed)
    failures = 0
    cases = []
    for n in (3, 4):
        for p, N in ((2, 10), (5, 6)):
            R = make_ring("zero", p, N)
            bad = 0
            for _ in range(count):
                M = mg.random_sl(R, n, rng)
                if mg.evaluate_word(mg.decompose_sln(M)) != M:
                    bad += 1
            failures += bad
            cases.append({"n": n, "ring": repr(R), "samples": count, "failures": bad})
    return CheckResult("sln_roundtrip", failures == 0, {"cases": cases})


# 5 -------------------------------------------------------------------------------


@_timed
def check_identities(per_kind=1700, seed=0, min_instances=10_000) -> CheckResult:
    """Steinberg, Weyl, diag word, commutator relation, dilation identity, EL diagonals."""
    rng = random.Random(seed)
    counts: dict[str, list[int]] = {}

    def tally(name, holds):
        c = counts.setdefault(name, [0, 0])
        c[0] += 1
        c[1] += 0 if holds else 1

    rings = [make_ring("zero", 2, 12), make_ring("zero", 3, 8), make_ring("zero", 7, 6),
             make_ring("positive", 3, 8), make_ring("positive", 2, 10)]
    for i in range(per_kind):
        R = rings[i % len(rings)]
        n = 3 + i % 2
        tally("steinberg", mg.steinberg_check(n, R.random_element(rng), R.random_element(rng)).holds)
        tally("weyl", mg.weyl_check(R).holds)
        tally("diag_word", mg.diag_word_check(R.random_unit(rng)).holds)
        y = R.random_unit(rng)
        k = rng.randint(1, 3)
        t = rng.randint(0, 3)
        tally("dilation_commutator", mg.dilation_commutator_check(k, y, t, R.random_element(rng)).holds)
        kk = rng.randint(1, (R.precision - 1) // 2)
        tally("el_diagonal", mg.el_diagonal_check(kk, R.random_element(rng)).holds)
        Rp = make_ring("zero", (5, 7, 13)[i % 3], 8)
        tally("perfectness", mg.perfectness_witness(Rp.random_element(rng))[2].holds)
    total = sum(c[0] for c in counts.values())
    failures = sum(c[1] for c in counts.values())
    return CheckResult(
        "identity_suite",
        failures == 0 and total >= min_instances,
        {"instances": total, "failures": failures, "by_kind": {k: {"instances": v[0], "failures": v[1]} for k, v in counts.items()}},
    )


# 6, 7, 8, 9 -------------------------------------------------------------------------

ORDER_CASES = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)]


@_timed
def check_congruence_orders(cases=ORDER_CASES) -> CheckResult:
    rows = []
    ok = True
    for p, m in cases:
        bfs = cg.special_linear_group(2, p, m).order
        formula = p ** (3 * (m - 1)) * p * (p * p - 1)
        ok &= bfs == formula
        rows.append({"p": p, "m": m, "bfs": bfs, "formula": formula})
    return CheckResult("congruence_orders", ok, {"cases": rows})


ABELIANIZATION_EXPECTATIONS = [
    # (n, p, m, expected order or "nontrivial")
    (2, 2, 1, 2),
    (2, 3, 1, 3),
    (2, 2, 2, "nontrivial"),
    (2, 3, 2, "nontrivial"),
    (2, 5, 1, 1),
    (2, 5, 2, 1),
    (2, 7, 1, 1),
    (3, 2, 1, 1),
    (3, 3, 1, 1),
]


@_timed
def check_abelianization_dichotomy() -> CheckResult:
    rows = []
    ok = True
    for n, p, m, want in ABELIANIZATION_EXPECTATIONS:
        factors = cg.abelianization(cg.special_linear_group(n, p, m))
        order = 1
        for d in factors:
            order *= d
        good = order > 1 if want == "nontrivial" else order == want
        ok &= good
        rows.append({"n": n, "p": p, "m": m, "invariant_factors": factors, "expected": want, "ok": good})
    return CheckResult("abelianization_dichotomy", ok, {"cases": rows})


EL_TRIVIAL_CASES = [(2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 3, 1), (2, 3, 2), (2, 5, 1), (2, 5, 2), (3, 2, 1), (3, 2, 2), (3, 3, 1)]


@_timed
def check_el_index() -> CheckResult:
    rows = []
    ok = True
    for n, p, m in EL_TRIVIAL_CASES:
        idx = cg.el_image_index(n, p, 0, m)
        ok &= idx == 1
        rows.append({"n": n, "p": p, "k": 0, "m": m, "index": idx})
    pinned = []
    for n, p, k, m in [(2, 2, 1, 3), (2, 3, 1, 2)]:
        idx = cg.el_image_index(n, p, k, m)
        rec = golden.lookup({"op": "el-index", "n": n, "p": p, "k": k, "m": m})
        good = rec is not None and rec["value"] == idx
        ok &= good
        pinned.append({"n": n, "p": p, "k": k, "m": m, "index": idx, "golden": rec and rec["value"], "oracle": rec and rec["oracle"]})
    # divisibility along the k filtration
    chain = [cg.el_image_index(2, 2, k, 4) for k in range(4)]
    divides = all(b % a == 0 for a, b in zip(chain, chain[1:]))
    ok &= divides
    return CheckResult("el_image_index", ok, {"k0_cases": rows, "pinned": pinned, "chain_2_2_m4": chain})


@_timed
def check_nontrivial_reps(relators=200, dim=3, seed=0) -> CheckResult:
    rng = random.Random(seed)
    rows = []
    ok = True
    for p in (3, 2):
        rep, G = cg.nontrivial_rep(p, dim)
        words = cg.random_relators(G, relators, rng)
        killed = sum(1 for w in words if rep.angle_of_word(w) == 0)
        good = rep.cyclic_order > 1 and killed == len(words)
        ok &= good
        rows.append({**rep.to_json(), "group_order": G.order, "relators": len(words), "killed": killed})
    return CheckResult("nontrivial_rep", ok, {"reps": rows})


# 10 ----------------------------------------------------------------------------------


def _rand_frac(rng, bound=3):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 2))


def random_unipotent_set(rng: random.Random, D: int):
    """Conjugates of random upper unitriangular matrices by one random invertible matrix."""
    while True:
        Q = fl.QMatrix([[rng.randint(-2, 2) for _ in range(D)] for _ in range(D)])
        try:
            Qi = Q.inverse()
            break
        except Exception:
            continue
    mats = []
    density = rng.choice([0.2, 0.5, 0.9])
    for _ in range(rng.randint(1, 3)):
        U = [[Fraction(int(i == j)) if i >= j else (_rand_frac(rng) if rng.random() < density else Fraction(0))
              for j in range(D)] for i in range(D)]
        mats.append(Q @ fl.QMatrix(U) @ Qi)
    return mats


def flag_properties(mats, flag) -> dict:
    """Quotient triviality, maximality and strict growth, checked via annihilators."""
    D = flag.D
    spaces = flag.spaces
    ident = fl.QMatrix.identity(D)
    nils = [M - ident for M in mats]
    trivial = all(
        all(spaces[j - 1].contains(N.apply(b)) for b in spaces[j].basis)
        for j in range(1, len(spaces))
        for N in nils
    )
    maximal = True
    for j in range(1, len(spaces)):
        # V_j = {v : (M - I) v in V_(j-1) for all M} = ker of a (M - I) over annihilator rows a
        A = spaces[j - 1].annihilator()
        rows = []
        for a in A:
            nz = [(i, x) for i, x in enumerate(a) if x]
            for N in nils:
                rows.append([sum(x * N.rows[i][c] for i, x in nz) for c in range(D)])
        expected = fl.Subspace.span(fl.nullspace(rows, D), D) if rows else fl.Subspace.full(D)
        maximal &= expected == spaces[j]
    growth = all(a.dim < b.dim for a, b in zip(spaces, spaces[1:])) and spaces[-1].dim == D and flag.length <= D
    return {"quotient_trivial": trivial, "maximal": maximal, "strict_growth": growth}


@_timed
def check_flags(count=500, seed=0) -> CheckResult:
    rng = random.Random(seed)
    bad = {"quotient_trivial": 0, "maximal": 0, "strict_growth": 0, "block_unitriangular": 0, "hyperplane": 0}
    lengths = {}
    for _ in range(count):
        D = rng.randint(1, 8)
        mats = random_unipotent_set(rng, D)
        flag = fl.jh_series(mats)
        for key, good in flag_properties(mats, flag).items():
            bad[key] += not good
        Q = fl.adapted_basis(flag)
        if not all(fl.is_block_unitriangular(fl.conjugate_into_flag_basis(M, Q), flag.dims) for M in mats):
            bad["block_unitriangular"] += 1
        lengths[flag.length] = lengths.get(flag.length, 0) + 1
    for _ in range(count):
        D = rng.randint(2, 8)
        n = rng.randint(1, D + 2)
        W = []
        while len(W) < n:
            normal = [rng.randint(-3, 3) for _ in range(D)]
            if any(normal):
                W.append(fl.Subspace.span(fl.nullspace([normal], D), D))
        if not fl.hyperplane_bound_check(W).holds:
            bad["hyperplane"] += 1
    return CheckResult(
        "flags",
        not any(bad.values()),
        {"unipotent_sets": count, "hyperplane_families": count, "failures": bad,
         "flag_lengths": dict(sorted(lengths.items()))},
    )


ALL_CHECKS = [
    check_fourth_roots,
    check_hensel_vs_brute_force,
    check_sl2_roundtrip,
    check_sln_roundtrip,
    check_identities,
    check_congruence_orders,
    check_abelianization_dichotomy,
    check_el_index,
    check_nontrivial_reps,
    check_flags,
]


def verify_paper(seed: int = 0, progress=None) -> list[CheckResult]:
    results = []
    for chk in ALL_CHECKS:
        kwargs = {"seed": seed} if "seed" in inspect.signature(chk).parameters else {}
        res = chk(**kwargs)
        if progress:
            progress(res)
        results.append(res)
    return results
