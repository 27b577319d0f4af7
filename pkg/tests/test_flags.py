import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dvrgroups import flags as fl
from dvrgroups import suite
from dvrgroups.errors import DimensionMismatch, MalformedFlag, NonUnipotentInput, SingularMatrix


def E(D, i, j, x=1):
    rows = [[int(r == c) for c in range(D)] for r in range(D)]
    rows[i - 1][j - 1] = x
    return fl.QMatrix(rows)


def J(D):
    return fl.QMatrix([[1 if c in (r, r + 1) else 0 for c in range(D)] for r in range(D)])


def standard_flag(D):
    return fl.Flag(D, tuple(fl.Subspace.span([[int(i == j) for j in range(D)] for i in range(k)], D) for k in range(D + 1)))


def hyperplane(normal):
    D = len(normal)
    return fl.Subspace.span(fl.nullspace([normal], D), D)


def test_rref_and_nullspace():
    R, piv = fl.rref([[2, 4, 6], [1, 2, 4]], 3)
    assert piv == [0, 2]
    assert R == [[1, 2, 0], [0, 0, 1]]
    (k,) = fl.nullspace([[1, 2, 3]], 3)[:1]
    assert sum(a * b for a, b in zip(k, [1, 2, 3])) == 0
    assert len(fl.nullspace([[1, 2, 3]], 3)) == 2


def test_fixed_space_examples():
    assert fl.fixed_space(fl.QMatrix.identity(4)) == fl.Subspace.full(4)
    V = fl.fixed_space(J(3))
    assert V.dim == 1 and V.contains([1, 0, 0])
    assert fl.fixed_space(fl.QMatrix([[1, 0], [0, 2]])) == fl.Subspace.span([[1, 0]], 2)


def test_intersect_examples(rng):
    V = fl.Subspace.span([[1, 2, 3], [0, 1, 1]], 3)
    assert fl.intersect([V]) == V
    assert fl.intersect([hyperplane([1, 0, 0]), hyperplane([0, 1, 0])]).dim == 1
    with pytest.raises(DimensionMismatch):
        fl.intersect([fl.Subspace.full(2), fl.Subspace.full(3)])
    for _ in range(20):
        D, n = rng.randint(2, 7), rng.randint(1, 6)
        W = [hyperplane([rng.randint(-3, 3) for _ in range(D - 1)] + [1]) for _ in range(n)]
        assert fl.intersect(W).dim >= D - n


def test_hyperplane_bound_examples(rng):
    rep = fl.hyperplane_bound_check([hyperplane([1, 1, 0, 0, 2])])
    assert rep.holds and rep.details["dim"] == 4 and rep.details["bound"] == 4
    W = [hyperplane([rng.randint(1, 5) for _ in range(3)]) for _ in range(4)]
    rep = fl.hyperplane_bound_check(W)
    assert rep.holds and rep.details["bound"] == -1 and rep.details["dim"] >= 0
    for n in range(2, 6):
        D = 2 * n - 1
        W = [hyperplane([rng.randint(-4, 4) for _ in range(D - 1)] + [1]) for _ in range(n)]
        rep = fl.hyperplane_bound_check(W)
        assert rep.holds and rep.details["dim"] >= n - 1 >= 1
    with pytest.raises(ValueError):
        fl.hyperplane_bound_check([fl.Subspace.span([[1, 0, 0]], 3)])


def test_subspace_canonical_form():
    a = fl.Subspace.span([[1, 1, 0], [0, 1, 1]], 3)
    b = fl.Subspace.span([[1, 2, 1], [2, 1, -1]], 3)
    assert a == b and hash(a) == hash(b)
    assert fl.Subspace.zero(3) < a < fl.Subspace.full(3)
    with pytest.raises(DimensionMismatch):
        fl.Subspace.span([[1, 2]], 3)


def test_is_unipotent():
    assert fl.is_unipotent(J(4))
    assert not fl.is_unipotent(fl.QMatrix([[1, 0], [0, 2]]))


def test_jh_series_examples():
    f = fl.jh_series([fl.QMatrix.identity(3)])
    assert f.length == 1 and f.dims == [0, 3]
    assert fl.jh_series([J(3)]) == standard_flag(3)
    assert fl.jh_series([E(3, 1, 2), E(3, 1, 3), E(3, 2, 3)]) == standard_flag(3)


def test_jh_series_errors():
    with pytest.raises(NonUnipotentInput):
        fl.jh_series([fl.QMatrix([[2, 0], [0, 1]])])
    with pytest.raises(DimensionMismatch):
        fl.jh_series([J(2), J(3)])
    with pytest.raises(ValueError):
        fl.jh_series([])


def test_flag_validation():
    with pytest.raises(MalformedFlag):
        fl.Flag(2, (fl.Subspace.zero(2), fl.Subspace.full(2), fl.Subspace.full(2)))
    with pytest.raises(MalformedFlag):
        fl.Flag(2, (fl.Subspace.full(2),))
    partial = fl.Flag(3, (fl.Subspace.zero(3), fl.Subspace.span([[1, 0, 0]], 3)))
    with pytest.raises(MalformedFlag):
        fl.adapted_basis(partial)


def test_flag_json_roundtrip():
    f = fl.jh_series([E(4, 1, 3, Fraction(1, 2)), E(4, 2, 4, -3)])
    assert fl.Flag.from_json(f.to_json(), 4) == f


def test_flag_invariance_examples(rng):
    f = fl.jh_series([E(3, 1, 3)])
    assert fl.flag_invariant_under([fl.QMatrix.identity(3)], f)
    std = standard_flag(3)
    for _ in range(10):
        U = fl.QMatrix([[rng.randint(1, 4) if r == c else (rng.randint(-3, 3) if c > r else 0) for c in range(3)]
                        for r in range(3)])
        assert fl.flag_invariant_under([U], std)
    assert not fl.flag_invariant_under([fl.QMatrix([[0, 1], [1, 0]])], standard_flag(2))
    with pytest.raises(SingularMatrix):
        fl.flag_invariant_under([fl.QMatrix([[1, 1], [1, 1]])], standard_flag(2))


def test_adapted_basis_examples():
    assert fl.adapted_basis(standard_flag(4)) == fl.QMatrix.identity(4)
    f = fl.jh_series([J(3)])
    Q = fl.adapted_basis(f)
    assert fl.is_block_unitriangular(fl.conjugate_into_flag_basis(J(3), Q), [0, 1, 2, 3])


def test_normalizer_preserves_flag():
    # <E12(1), E13(1)> is normalized by E23(1) (commutator lands in E13) and by diag(1, -1, 1)
    mats = [E(3, 1, 2), E(3, 1, 3)]
    flag = fl.jh_series(mats)
    assert fl.flag_invariant_under([E(3, 2, 3), fl.QMatrix([[1, 0, 0], [0, -1, 0], [0, 0, 1]])], flag)
    # Heisenberg group <E12, E23> is normalized by its own elements and by diag(2, 1, 1/2)
    heis = [E(3, 1, 2), E(3, 2, 3)]
    flag = fl.jh_series(heis)
    assert fl.flag_invariant_under([heis[0] @ heis[1], fl.QMatrix([[2, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 2)]])], flag)


def test_normalizer_preserves_flag_after_change_of_basis(rng):
    for _ in range(20):
        D = rng.randint(2, 6)
        mats = suite.random_unipotent_set(rng, D)
        flag = fl.jh_series(mats)
        words = [mats[0]] + [a @ b for a in mats for b in mats]
        assert fl.flag_invariant_under(words, flag)


@given(st.integers(0, 10**6))
def test_jh_series_properties(seed):
    rng = random.Random(seed)
    mats = suite.random_unipotent_set(rng, rng.randint(1, 6))
    flag = fl.jh_series(mats)
    props = suite.flag_properties(mats, flag)
    assert all(props.values()), props
    Q = fl.adapted_basis(flag)
    assert all(fl.is_block_unitriangular(fl.conjugate_into_flag_basis(M, Q), flag.dims) for M in mats)


def test_qmatrix_json_and_inverse(rng):
    M = fl.QMatrix([[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)] for _ in range(3)])
    assert fl.QMatrix.from_json(M.to_json()) == M
    M = J(3)
    assert M @ M.inverse() == fl.QMatrix.identity(3)
