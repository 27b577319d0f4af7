import random
from itertools import product
from math import gcd, lcm

import pytest
from hypothesis import given, strategies as st

from dvrgroups import congruence as cg
from dvrgroups import golden, matgroup as mg
from dvrgroups.errors import NotSubgroup, ResourceCapExceeded
from dvrgroups.localring import make_ring


def test_project_examples(rng):
    R = make_ring("zero", 3, 6)
    assert cg.project(mg.RMatrix.identity(R, 2), 3).is_identity()
    assert cg.project(mg.elementary(2, 1, 2, R(27)), 3).is_identity()
    for _ in range(20):
        A, B = mg.random_sl(R, 3, rng), mg.random_sl(R, 3, rng)
        assert cg.project(A @ B, 2) == cg.project(A, 2) @ cg.project(B, 2)
    with pytest.raises(ValueError):
        cg.project(mg.RMatrix.identity(R, 2), 7)
    with pytest.raises(ValueError):
        cg.project(mg.RMatrix.identity(make_ring("positive", 3, 4), 2), 2)


def test_finite_mat_arithmetic(rng):
    for _ in range(20):
        rows = [[rng.randrange(25) for _ in range(3)] for _ in range(3)]
        A = cg.FiniteMat.from_rows(5, 2, rows)
        if A.det() % 5 == 0:
            continue
        assert (A @ A.inverse()).is_identity()
    assert cg.FiniteMat.elementary(2, 3, 2, 1, 2, 9).rows() == [[1, 1], [0, 1]]


def test_closure_examples():
    G = cg.group_closure([], shape=(2, 1, 2))
    assert G.order == 1
    G = cg.group_closure(cg.sl_generators(2, 2, 1))
    assert G.order == 6
    assert cg.special_linear_group(2, 3, 1).order == 24
    with pytest.raises(ValueError):
        cg.group_closure([])


def test_closure_is_deterministic_and_words_evaluate():
    G1 = cg.special_linear_group(2, 3, 2)
    G2 = cg.special_linear_group(2, 3, 2)
    assert G1.elements == G2.elements
    rng = random.Random(3)
    for g in rng.sample(G1.elements, 30):
        x = G1.elements[0]
        for mv in reversed(G1.word_of(g)):
            x = G1.mul(G1.moves[mv], x)
        assert x == g


@pytest.mark.parametrize("query", [r["query"] for r in golden.load() if r["query"]["op"] == "sl-order"],
                         ids=lambda q: f"n{q['n']}-p{q['p']}-m{q['m']}")
def test_orders_match_brute_force(query):
    rec = golden.lookup(query)
    n, p, m = query["n"], query["p"], query["m"]
    assert cg.special_linear_group(n, p, m).order == rec["value"] == cg.sl_order_formula(n, p, m)


def test_order_formula_more_cases():
    for n, p, m in [(2, 5, 2), (2, 2, 4), (3, 3, 1)]:
        assert cg.special_linear_group(n, p, m).order == cg.sl_order_formula(n, p, m)


def test_subgroup_index_examples():
    G = cg.special_linear_group(2, 2, 1)
    assert cg.subgroup_index(G, G) == 1
    trivial = cg.group_closure([], shape=(2, 1, 2))
    assert cg.subgroup_index(trivial, G) == 6
    G8 = cg.special_linear_group(2, 2, 3)
    H = cg.group_closure(cg.el_generators(2, 2, 1, 3))
    rec = golden.lookup({"op": "el-index", "n": 2, "p": 2, "k": 1, "m": 3})
    assert cg.subgroup_index(H, G8) == rec["value"]


def test_subgroup_index_rejects_non_subgroup():
    diag = cg.group_closure([cg.FiniteMat.from_rows(5, 1, [[2, 0], [0, 1]])])
    with pytest.raises(NotSubgroup):
        cg.subgroup_index(diag, cg.special_linear_group(2, 5, 1))
    with pytest.raises(NotSubgroup):
        cg.subgroup_index(cg.special_linear_group(2, 2, 1), cg.special_linear_group(2, 3, 1))


@pytest.mark.parametrize("query", [r["query"] for r in golden.load() if r["query"]["op"] == "el-index"],
                         ids=lambda q: f"n{q['n']}-p{q['p']}-k{q['k']}-m{q['m']}")
def test_el_index_matches_golden(query):
    n, p, k, m = query["n"], query["p"], query["k"], query["m"]
    assert cg.el_image_index(n, p, k, m) == golden.lookup(query)["value"]


def test_el_index_elementary_generation():
    for n, p, m in [(2, 2, 3), (2, 3, 2), (2, 5, 2), (3, 2, 2), (3, 3, 1)]:
        assert cg.el_image_index(n, p, 0, m) == 1


def test_el_index_monotone():
    idx = [cg.el_image_index(2, 2, k, 5) for k in range(4)]
    assert all(b % a == 0 for a, b in zip(idx, idx[1:]))
    idx = [cg.el_image_index(2, 3, k, 3) for k in range(2)]
    assert idx[1] % idx[0] == 0


def test_el_index_bad_level():
    with pytest.raises(ValueError):
        cg.el_image_index(2, 2, 3, 3)


def test_resource_cap():
    with pytest.raises(ResourceCapExceeded):
        cg.special_linear_group(2, 5, 2, element_cap=1000)


@pytest.mark.parametrize("query", [r["query"] for r in golden.load() if r["query"]["op"] == "abelianization-order"],
                         ids=lambda q: f"n{q['n']}-p{q['p']}-m{q['m']}")
def test_abelianization_matches_all_pairs_oracle(query):
    G = cg.special_linear_group(query["n"], query["p"], query["m"])
    factors = cg.abelianization(G)
    order = 1
    for d in factors:
        order *= d
    assert order == golden.lookup(query)["value"]


def test_abelianization_examples():
    assert cg.abelianization(cg.special_linear_group(2, 2, 1)) == [2]
    assert cg.abelianization(cg.special_linear_group(2, 3, 1)) == [3]
    assert cg.abelianization(cg.special_linear_group(2, 5, 1)) == []
    assert cg.abelianization(cg.special_linear_group(2, 2, 2)) == [4]


def test_abelian_group_case():
    # <E12(1)> in SL_2(Z/8) is cyclic of order 8
    G = cg.group_closure([cg.FiniteMat.elementary(2, 3, 2, 1, 2, 1)])
    assert cg.derived_subgroup(G).order == 1
    assert cg.abelianization(G) == cg.abelian_invariants(G) == [8]
    # E13(1), E23(1) mod 4 commute and generate Z/4 x Z/4
    H = cg.group_closure([cg.FiniteMat.elementary(2, 2, 3, 1, 3, 1), cg.FiniteMat.elementary(2, 2, 3, 2, 3, 1)])
    assert cg.abelianization(H) == [4, 4]


def test_derived_subgroup_is_normal_and_contains_commutators(rng):
    G = cg.special_linear_group(2, 3, 1)
    D = cg.derived_subgroup(G)
    assert D.order == 8
    for _ in range(50):
        a, b = rng.choice(G.elements), rng.choice(G.elements)
        comm = G.mul(G.mul(a, b), G.mul(G.inv(a), G.inv(b)))
        assert comm in D
        assert G.mul(G.mul(a, rng.choice(D.elements)), G.inv(a)) in D


@given(st.lists(st.sampled_from([1, 2, 3, 4, 6, 8, 9, 12]), min_size=1, max_size=3))
def test_invariant_factors_of_direct_products(cyclic):
    # element orders of Z/a x Z/b x ... enumerated directly
    orders = []
    for t in product(*[range(a) for a in cyclic]):
        o = 1
        for x, a in zip(t, cyclic):
            o = lcm(o, a // gcd(a, x))
        orders.append(o)
    factors = cg.invariant_factors_from_orders(orders)
    size = 1
    for d in factors:
        size *= d
    assert size == len(orders)
    assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
    assert all(d > 1 for d in factors)


def test_nontrivial_rep_p3():
    rep, G = cg.nontrivial_rep(3, 2)
    assert G.order == 648
    assert rep.cyclic_order == 3 > 1
    assert rep.k == 1
    words = cg.random_relators(G, 100, random.Random(5))
    assert all(rep.angle_of_word(w) == 0 for w in words)
    assert any(rep.angle_of_word([(name, 1)]) != 0 for name in cg.SL2_GENERATOR_NAMES)
    M = rep.image_matrix(1)
    assert len(M) == 2 and abs(M[0][0] + 0.5) < 1e-12


def test_nontrivial_rep_p2():
    rep, G = cg.nontrivial_rep(2, 4)
    assert G.order == 196608
    assert rep.cyclic_order > 1 and rep.target_dim == 4
    words = cg.random_relators(G, 50, random.Random(9))
    assert all(rep.angle_of_word(w) == 0 for w in words)
    doc = rep.to_json()
    assert doc["cyclic_order"] == rep.cyclic_order and set(doc["generator_images"]) == set(cg.SL2_GENERATOR_NAMES)


def test_nontrivial_rep_errors():
    with pytest.raises(ValueError):
        cg.nontrivial_rep(5, 2)
    with pytest.raises(ValueError):
        cg.nontrivial_rep(3, 1)
