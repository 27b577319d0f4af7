import pytest
from hypothesis import given, strategies as st

from dvrgroups import oracles
from dvrgroups.errors import NonUnit, NotFiniteIndex, RingMismatch
from dvrgroups.localring import (
    AtLeastPrecision,
    RingDescriptor,
    additive_subgroup_level,
    invert,
    make_ring,
    ring_arith,
    valuation,
)

Z2_16 = make_ring("zero", 2, 16)
F3_8 = make_ring("positive", 3, 8)


def test_make_ring_rejects_bad_input():
    with pytest.raises(ValueError):
        make_ring("zero", 4, 8)
    with pytest.raises(ValueError):
        make_ring("zero", 3, 0)


def test_descriptor_basics():
    assert Z2_16.modulus == 2**16 and Z2_16.char_zero
    assert not F3_8.char_zero
    assert RingDescriptor.from_json(F3_8.to_json()) == F3_8


def test_arith_examples():
    R = make_ring("zero", 5, 6)
    assert ring_arith("add", R(1), R(5**6 - 1)) == R.zero
    assert ring_arith("mul", Z2_16(2), Z2_16(2)) == Z2_16(4)
    t = F3_8.uniformizer
    assert ring_arith("mul", t, t**7) == F3_8.zero
    assert ring_arith("neg", Z2_16(1)) == Z2_16(2**16 - 1)


def test_ring_mismatch():
    with pytest.raises(RingMismatch):
        Z2_16(1) + make_ring("zero", 2, 8)(1)


def test_valuation_examples():
    R = make_ring("zero", 3, 8)
    assert valuation(R(9)) == 2
    assert valuation(R(0)) is AtLeastPrecision
    assert valuation(Z2_16(6)) == 1
    assert valuation(F3_8.pi_power(5) * 2) == 5
    assert AtLeastPrecision > 10**9


def test_invert_examples():
    R = make_ring("zero", 2, 4)
    assert invert(R(1)) == R(1)
    assert invert(R(3)) == R(11)
    with pytest.raises(NonUnit):
        invert(R(2))
    with pytest.raises(NonUnit):
        invert(F3_8.uniformizer)


def test_invert_matches_golden_oracle():
    assert invert(make_ring("zero", 2, 4)(3)).payload == oracles.egcd_inverse(3, 16)


def test_level_examples():
    R = make_ring("zero", 3, 6)
    assert additive_subgroup_level([R(9)]) == 2
    assert additive_subgroup_level([Z2_16(6)]) == 1
    assert additive_subgroup_level([R(18), R(45)]) == 2
    with pytest.raises(NotFiniteIndex):
        additive_subgroup_level([R(0)])
    with pytest.raises(ValueError):
        additive_subgroup_level([])


def test_level_positive_characteristic():
    t = F3_8.uniformizer
    # span of t^2 and t^3 only: t^4 and beyond are not all reached
    with pytest.raises(NotFiniteIndex):
        additive_subgroup_level([t**2, t**3])
    gens = [t ** i for i in range(2, 8)]
    assert additive_subgroup_level(gens) == 2
    assert additive_subgroup_level([t**2 + t**3, t**3] + [t ** i for i in range(4, 8)]) == 2


def _elements(R):
    if R.char_zero:
        return st.integers(0, R.modulus - 1).map(R.parse)
    return st.lists(st.integers(0, R.p - 1), min_size=R.precision, max_size=R.precision).map(R.parse)


@given(st.data())
def test_valuation_multiplicative(data):
    R = data.draw(st.sampled_from([Z2_16, F3_8, make_ring("zero", 7, 5)]))
    a, b = data.draw(_elements(R)), data.draw(_elements(R))
    va, vb = a.valuation(), b.valuation()
    if isinstance(va, int) and isinstance(vb, int) and va + vb < R.precision:
        assert (a * b).valuation() == va + vb


@given(st.integers(0, 2**16 - 1))
def test_invert_is_involution(x):
    a = Z2_16(x)
    if a.is_unit():
        assert invert(invert(a)) == a
        assert a * invert(a) == Z2_16.one


@given(st.lists(st.integers(0, 3**6 - 1), min_size=1, max_size=3))
def test_level_matches_closure_oracle(gens):
    R = make_ring("zero", 3, 6)
    want = oracles.closure_level(gens, 3, 6)
    if want is None or all(g == 0 for g in gens):
        with pytest.raises(NotFiniteIndex):
            additive_subgroup_level([R(g) for g in gens])
    else:
        assert additive_subgroup_level([R(g) for g in gens]) == want
        assert want == min(R(g).valuation() for g in gens if g)


@pytest.mark.parametrize("p,N", [(2, 14), (2, 8), (5, 5), (11, 3)])
def test_level_closure_oracle_small_models(p, N, rng):
    R = make_ring("zero", p, N)
    for _ in range(5):
        gens = [rng.randrange(R.modulus) * p ** rng.randrange(N) % R.modulus for _ in range(rng.randint(1, 2))]
        want = oracles.closure_level(gens, p, N)
        if want is None:
            continue
        assert additive_subgroup_level([R(g) for g in gens]) == want


def test_positive_characteristic_torsion(rng):
    for p in (2, 3, 5):
        R = make_ring("positive", p, 6)
        for _ in range(50):
            a = R.random_element(rng)
            assert a * p == R.zero


def test_json_roundtrip(ring, rng):
    for _ in range(20):
        a = ring.random_element(rng)
        assert ring.parse(a.to_json()) == a
    assert RingDescriptor.from_json(ring.to_json()) == ring


def test_units_and_elements_count():
    R = make_ring("positive", 2, 3)
    elems = list(R.elements())
    assert len(elems) == 8
    assert sum(e.is_unit() for e in elems) == 4
