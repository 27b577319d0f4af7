"""Exact rational subspaces, common fixed spaces, and JH-series flags.

Vectors are columns; a matrix ``M`` acts by ``v -> M v``. Every subspace is
stored as the nonzero rows of its reduced row-echelon basis, which makes
equality structural.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, MalformedFlag, NonUnipotentInput, SingularMatrix, StalledFlag
from .report import Report

Vector = tuple  # of Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def rref(rows: Iterable[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form; returns the nonzero rows and pivot columns."""
    M = [[_frac(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        lead = M[r][c]
        M[r] = [x / lead for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` for the matrix with the given rows."""
    R, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


class QMatrix:
    """Square matrix of exact rationals."""

    __slots__ = ("rows", "D")

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        self.D = len(self.rows)
        if any(len(r) != self.D for r in self.rows):
            raise DimensionMismatch("matrix is not square")

    @classmethod
    def identity(cls, D: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(D)] for i in range(D)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "QMatrix":
        return cls(list(zip(*cols)))

    def columns(self) -> list[tuple]:
        return list(zip(*self.rows))

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"QMatrix({self.to_json()})"

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if other.D != self.D:
            raise DimensionMismatch(f"{self.D} vs {other.D}")
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(i, a) for i, a in enumerate(r) if a]
            out.append([sum((a * c[i] for i, a in nz), Fraction(0)) for c in cols])
        return QMatrix(out)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def apply(self, v: Sequence) -> Vector:
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def inverse(self) -> "QMatrix":
        D = self.D
        aug = [list(r) + [Fraction(int(i == j)) for j in range(D)] for i, r in enumerate(self.rows)]
        R, pivots = rref(aug, 2 * D)
        if pivots[:D] != list(range(D)):
            raise SingularMatrix("matrix is singular")
        return QMatrix([row[D:] for row in R])

    def to_json(self) -> list:
        return [[str(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, obj) -> "QMatrix":
        return cls([[Fraction(str(x)) for x in r] for r in obj])


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``Q^D`` in canonical RREF form."""

    D: int
    basis: tuple  # RREF rows

    @classmethod
    def span(cls, vectors: Iterable[Sequence], D: int) -> "Subspace":
        vectors = list(vectors)
        if any(len(v) != D for v in vectors):
            raise DimensionMismatch(f"vectors are not in Q^{D}")
        R, _ = rref(vectors, D)
        return cls(D, tuple(tuple(r) for r in R))

    @classmethod
    def zero(cls, D: int) -> "Subspace":
        return cls(D, ())

    @classmethod
    def full(cls, D: int) -> "Subspace":
        return cls.span([[int(i == j) for j in range(D)] for i in range(D)], D)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(r) if x != 0) for r in self.basis]

    def annihilator(self) -> list[list[Fraction]]:
        """Rows ``a`` with ``a . v = 0`` on the subspace, so ``V = ker(A)``."""
        return nullspace(self.basis, self.D) if self.basis else [
            [Fraction(int(i == j)) for j in range(self.D)] for i in range(self.D)
        ]

    def reduce(self, v: Sequence) -> Vector:
        """Representative of ``v`` modulo the subspace, zero at every pivot."""
        w = [_frac(x) for x in v]
        for row, pc in zip(self.basis, self.pivots):
            if w[pc] != 0:
                f = w[pc]
                w = [a - f * b for a, b in zip(w, row)]
        return tuple(w)

    def contains(self, v: Sequence) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def __le__(self, other: "Subspace") -> bool:
        return self.D == other.D and all(other.contains(b) for b in self.basis)

    def __lt__(self, other: "Subspace") -> bool:
        return self <= other and self.dim < other.dim

    def image(self, M: QMatrix) -> "Subspace":
        return Subspace.span([M.apply(b) for b in self.basis], self.D)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(list(self.basis) + list(other.basis), self.D)

    def to_json(self) -> list:
        return [[str(x) for x in r] for r in self.basis]


@dataclass(frozen=True)
class Flag:
    D: int
    spaces: tuple  # V_0 = 0 < V_1 < ... < V_e

    def __post_init__(self):
        if not self.spaces or self.spaces[0].dim != 0:
            raise MalformedFlag("a flag starts at the zero subspace")
        for a, b in zip(self.spaces, self.spaces[1:]):
            if not a < b:
                raise MalformedFlag("flag is not strictly increasing")

    @property
    def length(self) -> int:
        return len(self.spaces) - 1

    @property
    def dims(self) -> list[int]:
        return [V.dim for V in self.spaces]

    def to_json(self) -> list:
        return [V.to_json() for V in self.spaces]

    @classmethod
    def from_json(cls, obj, D: int) -> "Flag":
        return cls(D, tuple(Subspace.span([[Fraction(str(x)) for x in r] for r in V], D) for V in obj))


def fixed_space(M: QMatrix) -> Subspace:
    """``ker(M - I)``."""
    D = M.D
    return Subspace.span(nullspace((M - QMatrix.identity(D)).rows, D), D)


def intersect(spaces: Sequence[Subspace]) -> Subspace:
    spaces = list(spaces)
    if not spaces:
        raise ValueError("nothing to intersect")
    D = spaces[0].D
    if any(V.D != D for V in spaces):
        raise DimensionMismatch("subspaces live in different ambient spaces")
    rows = [a for V in spaces for a in V.annihilator()]
    return Subspace.span(nullspace(rows, D), D)


def hyperplane_bound_check(W: Sequence[Subspace]) -> Report:
    """Check ``dim(W_1 cap ... cap W_n) >= D - n`` for hyperplanes ``W_i``."""
    W = list(W)
    D = W[0].D
    for i, V in enumerate(W):
        if V.dim != D - 1:
            raise ValueError(f"W_{i + 1} has codimension {D - V.dim}, expected 1")
    dim = intersect(W).dim
    bound = D - len(W)
    return Report("hyperplane_bound", dim >= bound, {"D": D, "n": len(W), "dim": dim, "bound": bound})


def is_unipotent(M: QMatrix) -> bool:
    # nilpotent iff N^(2^s) = 0 for 2^s >= D
    P = M - QMatrix.identity(M.D)
    span = 1
    while span < M.D:
        P = P @ P
        span *= 2
    return P.is_zero()


def quotient_action(M: QMatrix, V: Subspace) -> tuple[QMatrix, list[int]]:
    """Matrix of ``M`` on ``Q^D / V`` in the complement basis of non-pivot unit vectors.

    Assumes ``V`` is ``M``-invariant. Returns the matrix and the complement indices.
    """
    D = M.D
    piv = set(V.pivots)
    comp = [i for i in range(D) if i not in piv]
    cols = M.columns()
    out = []
    for c in comp:
        w = V.reduce(cols[c])
        out.append([w[i] for i in comp])
    # out holds columns
    return QMatrix.from_columns(out) if comp else QMatrix([]), comp


def _common_fixed_in_quotient(mats: Sequence[QMatrix], V: Subspace) -> Subspace:
    """Preimage in ``Q^D`` of the common fixed space of the induced actions on ``Q^D / V``."""
    D = V.D
    comp = None
    rows = []
    for M in mats:
        Mbar, comp = quotient_action(M, V)
        rows.extend((Mbar - QMatrix.identity(len(comp))).rows)
    if comp is None:
        comp = [i for i in range(D) if i not in set(V.pivots)]
    lifts = []
    for k in nullspace(rows, len(comp)):
        v = [Fraction(0)] * D
        for coeff, idx in zip(k, comp):
            v[idx] = coeff
        lifts.append(v)
    return V + Subspace.span(lifts, D)


def jh_series(mats: Sequence[QMatrix]) -> Flag:
    """Flag ``0 = V_0 < V_1 < ... < V_e = Q^D`` of common 1-eigenspaces on successive quotients."""
    mats = list(mats)
    if not mats:
        raise ValueError("need at least one matrix")
    D = mats[0].D
    if any(M.D != D for M in mats):
        raise DimensionMismatch("matrices of different sizes")
    for M in mats:
        if not is_unipotent(M):
            raise NonUnipotentInput(f"{M!r} is not unipotent")
    spaces = [Subspace.zero(D)]
    while spaces[-1].dim < D:
        V = spaces[-1]
        nxt = _common_fixed_in_quotient(mats, V)
        if nxt.dim <= V.dim:
            raise StalledFlag(f"no common fixed vector modulo a {V.dim}-dimensional subspace")
        spaces.append(nxt)
    return Flag(D, tuple(spaces))


def flag_invariant_under(gens: Sequence[QMatrix], flag: Flag) -> bool:
    for g in gens:
        if g.D != flag.D:
            raise DimensionMismatch("generator and flag dimensions differ")
        g.inverse()  # raises SingularMatrix
        for V in flag.spaces:
            if V.image(g) != V:
                return False
    return True


def adapted_basis(flag: Flag) -> QMatrix:
    """Change of basis whose first ``dim V_j`` columns span ``V_j`` for every ``j``.

    Each step extends the current basis by RREF rows of the next space.
    """
    if flag.spaces[-1].dim != flag.D:
        raise MalformedFlag("adapted basis needs a flag ending at the full space")
    cols: list = []
    current = Subspace.zero(flag.D)
    for V in flag.spaces[1:]:
        for b in V.basis:
            if not current.contains(b):
                cols.append(b)
                current = Subspace.span(cols, flag.D)
        if current != V:
            raise MalformedFlag("flag spaces are not nested")
    return QMatrix.from_columns(cols)


def is_block_unitriangular(M: QMatrix, dims: Sequence[int]) -> bool:
    """Block upper triangular with identity diagonal blocks, block sizes from ``dims``."""
    block_of = []
    for j in range(1, len(dims)):
        block_of.extend([j] * (dims[j] - dims[j - 1]))
    for r in range(M.D):
        for c in range(M.D):
            x = M.rows[r][c]
            if block_of[r] > block_of[c] and x != 0:
                return False
            if block_of[r] == block_of[c] and x != (1 if r == c else 0):
                return False
    return True


def conjugate_into_flag_basis(M: QMatrix, Q: QMatrix) -> QMatrix:
    return Q.inverse() @ M @ Q
