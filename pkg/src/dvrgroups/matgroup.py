"""Matrices over a truncated DVR and words in elementary unipotents.

Indices of elementary letters are 1-based, ``E(i, j, x) = I + x e_ij``.
Commutators follow ``[A, B] = A B A^-1 B^-1`` throughout.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NonInvertible, NonUnit, NotSL, PrecisionLoss, RingMismatch
from .hensel import unit_with_unit_square_minus_one
from .localring import RingDescriptor, RingElem
from .report import Report


class RMatrix:
    """Square matrix over a :class:`RingDescriptor` model (immutable)."""

    __slots__ = ("ring", "n", "rows")

    def __init__(self, ring: RingDescriptor, rows: Sequence[Sequence[RingElem]]):
        self.ring = ring
        self.rows = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise DimensionMismatch("matrix is not square")

    @classmethod
    def from_ints(cls, ring: RingDescriptor, rows) -> "RMatrix":
        return cls(ring, [[ring.elem(v) for v in row] for row in rows])

    @classmethod
    def identity(cls, ring: RingDescriptor, n: int) -> "RMatrix":
        one, zero = ring.one, ring.zero
        return cls(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence[RingElem]) -> "RMatrix":
        ring = entries[0].ring
        n = len(entries)
        return cls(ring, [[entries[i] if i == j else ring.zero for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, RMatrix):
            return NotImplemented
        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        return mat_mul(self, other)

    def __repr__(self):
        return f"RMatrix({self.to_json()}, {self.ring!r})"

    def is_identity(self) -> bool:
        return all(
            (self.rows[i][j] == 1) if i == j else (not self.rows[i][j])
            for i in range(self.n)
            for j in range(self.n)
        )

    def inverse(self) -> "RMatrix":
        return mat_inverse(self)

    def to_json(self) -> list:
        return [[x.to_json() for x in row] for row in self.rows]

    @classmethod
    def from_json(cls, ring: RingDescriptor, obj) -> "RMatrix":
        return cls(ring, [[ring.parse(x) for x in row] for row in obj])


def _check_pair(A: RMatrix, B: RMatrix):
    if A.n != B.n:
        raise DimensionMismatch(f"{A.n}x{A.n} vs {B.n}x{B.n}")
    if A.ring != B.ring:
        raise RingMismatch(f"{A.ring!r} != {B.ring!r}")


def elementary(n: int, i: int, j: int, x: RingElem) -> RMatrix:
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"invalid elementary indices ({i}, {j}) for n = {n}")
    ring = x.ring
    one, zero = ring.one, ring.zero
    rows = [[one if r == c else zero for c in range(n)] for r in range(n)]
    rows[i - 1][j - 1] = x
    return RMatrix(ring, rows)


def mat_mul(A: RMatrix, B: RMatrix) -> RMatrix:
    _check_pair(A, B)
    cols = list(zip(*B.rows))
    zero = A.ring.zero
    out = []
    for row in A.rows:
        new_row = []
        for col in cols:
            acc = zero
            for a, b in zip(row, col):
                acc = acc + a * b
            new_row.append(acc)
        out.append(new_row)
    return RMatrix(A.ring, out)


def det(A: RMatrix) -> RingElem:
    """Determinant by cofactor expansion (division free, fine for small n)."""
    return _det_rows(A.ring, [list(r) for r in A.rows])


def _det_rows(ring, rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ring.zero
    for c in range(n):
        a = rows[0][c]
        if not a:
            continue
        minor = [r[:c] + r[c + 1:] for r in rows[1:]]
        term = a * _det_rows(ring, minor)
        total = total + term if c % 2 == 0 else total - term
    return total


def mat_inverse(A: RMatrix) -> RMatrix:
    """Gauss-Jordan with unit pivots; a unit determinant guarantees one per column."""
    n, ring = A.n, A.ring
    if n == 2:
        a, b = A.rows[0]
        c, d = A.rows[1]
        dt = a * d - b * c
        if not dt.is_unit():
            raise NonInvertible("determinant is not a unit")
        s = dt.inverse()
        return RMatrix(ring, [[d * s, -b * s], [-c * s, a * s]])
    one, zero = ring.one, ring.zero
    M = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(A.rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col].is_unit()), None)
        if piv is None:
            raise NonInvertible("no unit pivot; determinant is not a unit")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return RMatrix(ring, [row[n:] for row in M])


def commutator(A: RMatrix, B: RMatrix) -> RMatrix:
    _check_pair(A, B)
    return A @ B @ A.inverse() @ B.inverse()


# words ------------------------------------------------------------------


@dataclass(frozen=True)
class ElementaryWord:
    """Ordered product of letters ``E(i, j, x)``, evaluated left to right."""

    ring: RingDescriptor
    n: int
    letters: tuple = ()

    def __post_init__(self):
        for i, j, x in self.letters:
            if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"invalid letter ({i}, {j}) for n = {self.n}")
            if x.ring != self.ring:
                raise RingMismatch(f"letter entry in {x.ring!r}, word over {self.ring!r}")

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "ElementaryWord") -> "ElementaryWord":
        if other.n != self.n or other.ring != self.ring:
            raise DimensionMismatch("cannot concatenate words of different shape")
        return ElementaryWord(self.ring, self.n, self.letters + other.letters)

    def inverse(self) -> "ElementaryWord":
        return ElementaryWord(self.ring, self.n, tuple((i, j, -x) for i, j, x in reversed(self.letters)))

    def compact(self) -> "ElementaryWord":
        """Drop letters whose entry is zero (they evaluate to the identity)."""
        return ElementaryWord(self.ring, self.n, tuple(l for l in self.letters if l[2]))

    def embed(self, n: int, offset: int) -> "ElementaryWord":
        """Shift indices by ``offset`` inside a larger dimension ``n``."""
        return ElementaryWord(self.ring, n, tuple((i + offset, j + offset, x) for i, j, x in self.letters))

    def evaluate(self) -> RMatrix:
        return evaluate_word(self)

    def to_json(self) -> list:
        return [{"i": i, "j": j, "x": x.to_json()} for i, j, x in self.letters]

    @classmethod
    def from_json(cls, ring: RingDescriptor, n: int, obj) -> "ElementaryWord":
        return cls(ring, n, tuple((int(l["i"]), int(l["j"]), ring.parse(l["x"])) for l in obj))


def evaluate_word(w: ElementaryWord) -> RMatrix:
    n, ring = w.n, w.ring
    one, zero = ring.one, ring.zero
    M = [[one if r == c else zero for c in range(n)] for r in range(n)]
    for i, j, x in w.letters:
        # right multiplication by E(i, j, x): column j += x * column i
        i0, j0 = i - 1, j - 1
        for row in M:
            if row[i0]:
                row[j0] = row[j0] + row[i0] * x
    return RMatrix(ring, M)


def weyl_word(ring: RingDescriptor) -> ElementaryWord:
    """Three letters evaluating to ``[[0, 1], [-1, 0]]``."""
    one = ring.one
    return ElementaryWord(ring, 2, ((2, 1, -one), (1, 2, one), (2, 1, -one)))


def diag_word(a1: RingElem) -> ElementaryWord:
    """Five letters evaluating to ``diag(a1^-1, a1)``."""
    if not a1.is_unit():
        raise NonUnit(f"{a1} is not a unit")
    ring = a1.ring
    inv = a1.inverse()
    letters = (
        (1, 2, -a1),
        (2, 1, a1 - 1),
        (1, 2, ring.one),
        (2, 1, inv - 1),
        (1, 2, -(a1 * (1 - a1 * a1))),
    )
    return ElementaryWord(ring, 2, letters)


def _require_sl(M: RMatrix):
    d = det(M)
    if d != 1:
        raise NotSL(f"determinant is {d}, not 1")


def decompose_sl2(M: RMatrix) -> ElementaryWord:
    """Factor ``M`` in SL_2 into at most 13 elementary letters.

    With ``a = M[0][0]`` a unit, ``M = E21(c/a) diag(a, 1/a) E12(b/a)``.
    Otherwise ``c`` is a unit and the Weyl word is split off on the left.
    """
    if M.n != 2:
        raise DimensionMismatch("decompose_sl2 needs a 2x2 matrix")
    _require_sl(M)
    ring = M.ring
    prefix = ElementaryWord(ring, 2)
    (a, b), (c, d) = M.rows
    if not a.is_unit():
        if not c.is_unit():
            raise PrecisionLoss("neither a nor c is a unit in the model")
        prefix = weyl_word(ring)
        # W^-1 M with W^-1 = [[0, -1], [1, 0]]
        a, b, c, d = -c, -d, a, b
    ainv = a.inverse()
    word = prefix + ElementaryWord(ring, 2, ((2, 1, c * ainv),))
    if a != 1:
        word = word + diag_word(ainv)
    word = word + ElementaryWord(ring, 2, ((1, 2, b * ainv),))
    return word.compact()


def decompose_sln(M: RMatrix) -> ElementaryWord:
    """Factor ``M`` in SL_n by row reduction with unit pivots.

    Pivot rows are chosen as the first row (from the diagonal down) holding a
    unit. The resulting unit diagonal is split into 2x2 blocks, each factored
    with :func:`diag_word`.
    """
    n, ring = M.n, M.ring
    if n < 2:
        raise DimensionMismatch("need n >= 2")
    _require_sl(M)
    rows = [list(r) for r in M.rows]
    ops: list = []  # letters L_1..L_s with L_s ... L_1 M = D, so M = L_1^-1 ... L_s^-1 D

    def row_op(i0, j0, x):
        # left multiplication by E(i, j, x): row i += x * row j
        rows[i0] = [u + x * w for u, w in zip(rows[i0], rows[j0])]
        ops.append((i0 + 1, j0 + 1, x))

    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col].is_unit()), None)
        if piv is None:
            raise PrecisionLoss(f"no unit pivot in column {col + 1}")
        if piv != col:
            # a non-unit plus a unit is a unit
            row_op(col, piv, ring.one)
        inv = rows[col][col].inverse()
        for r in range(n):
            if r != col and rows[r][col]:
                row_op(r, col, -(rows[r][col] * inv))

    word = ElementaryWord(ring, n, tuple((i, j, -x) for i, j, x in ops))
    # D = prod_i diag(..., c_i, c_i^-1, ...) at (i, i+1), c_i = d_1 ... d_i
    cum = ring.one
    for i in range(n - 1):
        cum = cum * rows[i][i]
        if cum != 1:
            word = word + diag_word(cum.inverse()).embed(n, i)
    return word.compact()


def el_diagonal_word(k: int, x: RingElem) -> ElementaryWord:
    """Word in ``EL_2(pi^k O)`` evaluating to ``diag(u, u^-1)``, ``u = 1 + pi^2k x``.

    Built as ``E21(-pi^k/u) E12(pi^k x) E21(pi^k) E12(-pi^k x/u)``.
    """
    ring = x.ring
    if k < 1 or 2 * k >= ring.precision:
        raise ValueError(f"need 1 <= k and 2k < {ring.precision}, got k = {k}")
    if not x:
        return ElementaryWord(ring, 2)
    pk = ring.pi_power(k)
    u = 1 + pk * pk * x
    uinv = u.inverse()
    letters = (
        (2, 1, -(pk * uinv)),
        (1, 2, pk * x),
        (2, 1, pk),
        (1, 2, -(pk * x * uinv)),
    )
    return ElementaryWord(ring, 2, letters)


# identity checks ----------------------------------------------------------


def steinberg_check(n: int, x: RingElem, y: RingElem) -> Report:
    if n < 3:
        raise ValueError("Steinberg relation needs n >= 3")
    lhs = commutator(elementary(n, 1, 2, x), elementary(n, 2, 3, y))
    rhs = elementary(n, 1, 3, x * y)
    return Report("steinberg", lhs == rhs, {"lhs": lhs.to_json(), "rhs": rhs.to_json()})


def perfectness_witness(x: RingElem):
    """Exhibit ``E12(x)`` as ``[diag(q, 1/q), E12(t)]`` with ``(q^2 - 1) t = x``."""
    ring = x.ring
    q = unit_with_unit_square_minus_one(ring)
    t = (q * q - 1).inverse() * x
    lhs = commutator(RMatrix.diagonal([q, q.inverse()]), elementary(2, 1, 2, t))
    rhs = elementary(2, 1, 2, x)
    report = Report(
        "perfectness", lhs == rhs, {"q": q.to_json(), "t": t.to_json(), "lhs": lhs.to_json(), "rhs": rhs.to_json()}
    )
    return q, t, report


def dilation_commutator_check(k: int, y: RingElem, t: int, x: RingElem) -> Report:
    """``[diag(1 + pi^k y, .), E12(pi^t x)] = E12(pi^(k+t) y x (2 + pi^k y))``."""
    if not y.is_unit():
        raise NonUnit(f"{y} is not a unit")
    ring = y.ring
    pk = ring.pi_power(k)
    s = 1 + pk * y
    if not s.is_unit():
        raise NonInvertible(f"1 + pi^{k} y is not a unit")
    lhs = commutator(RMatrix.diagonal([s, s.inverse()]), elementary(2, 1, 2, ring.pi_power(t) * x))
    rhs = elementary(2, 1, 2, ring.pi_power(k + t) * y * x * (2 + pk * y))
    return Report("dilation_commutator", lhs == rhs, {"lhs": lhs.to_json(), "rhs": rhs.to_json()})


def weyl_check(ring: RingDescriptor) -> Report:
    got = evaluate_word(weyl_word(ring))
    want = RMatrix.from_ints(ring, [[0, 1], [-1, 0]])
    return Report("weyl", got == want, {"value": got.to_json()})


def diag_word_check(a1: RingElem) -> Report:
    got = evaluate_word(diag_word(a1))
    want = RMatrix.diagonal([a1.inverse(), a1])
    return Report("diag_word", got == want, {"a1": a1.to_json(), "value": got.to_json()})


def el_diagonal_check(k: int, x: RingElem) -> Report:
    w = el_diagonal_word(k, x)
    u = 1 + x.ring.pi_power(2 * k) * x
    value = evaluate_word(w)
    ok_value = value == RMatrix.diagonal([u, u.inverse()])
    ok_val = all(l[2].valuation() >= k for l in w.letters)
    return Report(
        "el_diagonal",
        ok_value and ok_val and len(w) <= 4,
        {"k": k, "x": x.to_json(), "letters": len(w), "letter_valuations_ok": ok_val},
    )


def column_group_generators(ring: RingDescriptor, n: int, col: int, k: int) -> list[RMatrix]:
    """Generators ``E(i, col, pi^k)``, ``i != col``, of an abelian column group."""
    if not 1 <= col <= n or k < 0:
        raise ValueError(f"invalid column {col} or level {k}")
    pk = ring.pi_power(k)
    gens = [elementary(n, i, col, pk) for i in range(1, n + 1) if i != col]
    for a in gens:
        for b in gens:
            assert commutator(a, b).is_identity(), "column generators must commute"
    return gens


def random_sl(ring: RingDescriptor, n: int, rng: random.Random) -> RMatrix:
    """Random element of SL_n: random matrix with unit determinant, first row rescaled."""
    while True:
        rows = [[ring.random_element(rng) for _ in range(n)] for _ in range(n)]
        d = _det_rows(ring, rows)
        if d.is_unit():
            s = d.inverse()
            rows[0] = [v * s for v in rows[0]]
            return RMatrix(ring, rows)


def all_sl2(ring: RingDescriptor) -> Iterable[RMatrix]:
    elems = list(ring.elements())
    for a in elems:
        for b in elems:
            for c in elems:
                for d in elems:
                    if a * d - b * c == 1:
                        yield RMatrix(ring, [[a, b], [c, d]])
