"""Finite congruence quotients SL_n(Z/p^m).

Group elements are flat row-major tuples of residues in ``[0, p^m)``. A
:class:`FiniteGroup` is an enumerated subgroup together with the BFS tree that
produced it, so every element comes with a word in the generators.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from sympy import factorint

from .errors import AbelianizationTrivial, NonInvertible, NotSubgroup, ResourceCapExceeded
from .matgroup import RMatrix

log = logging.getLogger(__name__)

DEFAULT_ELEMENT_CAP = 2**22


@dataclass(frozen=True)
class FiniteMat:
    """n x n matrix with entries modulo ``p^m``."""

    p: int
    m: int
    n: int
    entries: tuple

    @property
    def modulus(self) -> int:
        return self.p**self.m

    @classmethod
    def from_rows(cls, p: int, m: int, rows) -> "FiniteMat":
        q = p**m
        n = len(rows)
        return cls(p, m, n, tuple(int(v) % q for row in rows for v in row))

    @classmethod
    def identity(cls, p: int, m: int, n: int) -> "FiniteMat":
        return cls(p, m, n, _identity(n))

    @classmethod
    def elementary(cls, p: int, m: int, n: int, i: int, j: int, x: int) -> "FiniteMat":
        e = list(_identity(n))
        e[(i - 1) * n + (j - 1)] = x % p**m
        return cls(p, m, n, tuple(e))

    def rows(self) -> list:
        n = self.n
        return [list(self.entries[r * n:(r + 1) * n]) for r in range(n)]

    def __matmul__(self, other: "FiniteMat") -> "FiniteMat":
        if (self.p, self.m, self.n) != (other.p, other.m, other.n):
            raise ValueError("shape or modulus mismatch")
        return FiniteMat(self.p, self.m, self.n, _mul(self.entries, other.entries, self.n, self.modulus))

    def inverse(self) -> "FiniteMat":
        return FiniteMat(self.p, self.m, self.n, _inv(self.entries, self.n, self.p, self.modulus))

    def det(self) -> int:
        return _det(self.entries, self.n, self.modulus)

    def is_identity(self) -> bool:
        return self.entries == _identity(self.n)

    def to_json(self) -> list:
        return [[str(v) for v in row] for row in self.rows()]


# raw tuple arithmetic ------------------------------------------------------


def _identity(n: int) -> tuple:
    return tuple(1 if r == c else 0 for r in range(n) for c in range(n))


def _mul(a: tuple, b: tuple, n: int, q: int) -> tuple:
    if n == 2:
        a0, a1, a2, a3 = a
        b0, b1, b2, b3 = b
        return ((a0 * b0 + a1 * b2) % q, (a0 * b1 + a1 * b3) % q, (a2 * b0 + a3 * b2) % q, (a2 * b1 + a3 * b3) % q)
    out = []
    for r in range(n):
        row = a[r * n:(r + 1) * n]
        for c in range(n):
            out.append(sum(row[k] * b[k * n + c] for k in range(n)) % q)
    return tuple(out)


def _det(a: tuple, n: int, q: int) -> int:
    if n == 1:
        return a[0] % q
    if n == 2:
        return (a[0] * a[3] - a[1] * a[2]) % q
    total = 0
    for c in range(n):
        if a[c]:
            minor = tuple(a[r * n + k] for r in range(1, n) for k in range(n) if k != c)
            total += (-1) ** c * a[c] * _det(minor, n - 1, q)
    return total % q


def _inv(a: tuple, n: int, p: int, q: int) -> tuple:
    if n == 2:
        d = (a[0] * a[3] - a[1] * a[2]) % q
        if d % p == 0:
            raise NonInvertible("determinant is not a unit")
        s = pow(d, -1, q)
        return (a[3] * s % q, -a[1] * s % q, -a[2] * s % q, a[0] * s % q)
    M = [list(a[r * n:(r + 1) * n]) + [1 if r == c else 0 for c in range(n)] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] % p), None)
        if piv is None:
            raise NonInvertible("determinant is not a unit")
        M[col], M[piv] = M[piv], M[col]
        s = pow(M[col][col], -1, q)
        M[col] = [v * s % q for v in M[col]]
        for r in range(n):
            f = M[r][col]
            if r != col and f:
                M[r] = [(u - f * w) % q for u, w in zip(M[r], M[col])]
    return tuple(v for row in M for v in row[n:])


# groups ---------------------------------------------------------------------


class FiniteGroup:
    """Enumerated subgroup of GL_n(Z/p^m).

    ``elements[0]`` is the identity. ``parent[i] = (j, g)`` records that
    ``elements[i] = moves[g] @ elements[j]``, where ``moves`` holds the
    generators followed by those inverses that are not already generators.
    """

    def __init__(self, p, m, n, generators, elements, parent, moves):
        self.p, self.m, self.n = p, m, n
        self.generators: list[FiniteMat] = list(generators)
        self.elements: list[tuple] = elements
        self.parent: list = parent
        self.moves: list[tuple] = moves
        self.index: dict[tuple, int] = {e: i for i, e in enumerate(elements)}

    @property
    def modulus(self) -> int:
        return self.p**self.m

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g) -> bool:
        if isinstance(g, FiniteMat):
            g = g.entries
        return g in self.index

    def __iter__(self):
        for e in self.elements:
            yield FiniteMat(self.p, self.m, self.n, e)

    def mul(self, a: tuple, b: tuple) -> tuple:
        return _mul(a, b, self.n, self.modulus)

    def inv(self, a: tuple) -> tuple:
        return _inv(a, self.n, self.p, self.modulus)

    def word_of(self, g) -> list[int]:
        """Move indices ``[g_1, ..., g_r]`` with ``g = moves[g_1] ... moves[g_r]``."""
        if isinstance(g, FiniteMat):
            g = g.entries
        i = self.index[g]
        word = []
        while i != 0:
            i, mv = self.parent[i]
            word.append(mv)
        return word

    def summary(self) -> dict:
        return {"n": self.n, "p": self.p, "m": self.m, "order": self.order, "generators": len(self.generators)}


def _moves_for(gens: Sequence[tuple], n: int, p: int, q: int) -> list[tuple]:
    moves = list(dict.fromkeys(gens))
    for g in list(moves):
        gi = _inv(g, n, p, q)
        if gi not in moves:
            moves.append(gi)
    return moves


def group_closure(gens: Sequence[FiniteMat], element_cap: int = DEFAULT_ELEMENT_CAP, *, shape=None) -> FiniteGroup:
    """Breadth-first closure of ``gens`` under left multiplication.

    Each BFS layer is sorted lexicographically, so the enumeration order is
    deterministic. ``shape = (p, m, n)`` is needed only when ``gens`` is empty.
    """
    gens = list(gens)
    if gens:
        p, m, n = gens[0].p, gens[0].m, gens[0].n
        if any((g.p, g.m, g.n) != (p, m, n) for g in gens):
            raise ValueError("generators live in different groups")
    elif shape is not None:
        p, m, n = shape
    else:
        raise ValueError("empty generator list needs an explicit shape")
    q = p**m
    moves = _moves_for([g.entries for g in gens], n, p, q)
    ident = _identity(n)
    elements = [ident]
    parent: list = [None]
    seen = {ident: 0}
    layer = [ident]
    mul = _mul
    while layer:
        found = {}
        for x in layer:
            xi = seen[x]
            for mi, g in enumerate(moves):
                y = mul(g, x, n, q)
                if y not in seen and y not in found:
                    found[y] = (xi, mi)
        layer = sorted(found)
        for y in layer:
            seen[y] = len(elements)
            elements.append(y)
            parent.append(found[y])
        if len(elements) > element_cap:
            raise ResourceCapExceeded(f"closure exceeded {element_cap} elements")
    return FiniteGroup(p, m, n, gens, elements, parent, moves)


def subgroup_index(H: FiniteGroup, G: FiniteGroup) -> int:
    if (H.p, H.m, H.n) != (G.p, G.m, G.n):
        raise NotSubgroup("groups live in different ambient groups")
    if any(h not in G.index for h in H.elements):
        raise NotSubgroup("H is not contained in G")
    idx, rem = divmod(G.order, H.order)
    assert rem == 0, "Lagrange violated"
    return idx


def sl_generators(n: int, p: int, m: int) -> list[FiniteMat]:
    """Elementary generators ``E_ij(1)`` of SL_n(Z/p^m)."""
    return [FiniteMat.elementary(p, m, n, i, j, 1) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def el_generators(n: int, p: int, k: int, m: int) -> list[FiniteMat]:
    """Generators ``E_ij(p^k)``; they generate the image of ``EL_n(p^k Z_p)``."""
    return [FiniteMat.elementary(p, m, n, i, j, p**k) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def special_linear_group(n: int, p: int, m: int, element_cap: int = DEFAULT_ELEMENT_CAP) -> FiniteGroup:
    return group_closure(sl_generators(n, p, m), element_cap)


def sl_order_formula(n: int, p: int, m: int) -> int:
    """``|SL_n(Z/p^m)| = p^((m-1)(n^2-1)) |SL_n(F_p)|``."""
    base = p ** (n * (n - 1) // 2)
    for i in range(2, n + 1):
        base *= p**i - 1
    return p ** ((m - 1) * (n * n - 1)) * base


def project(M: RMatrix, m: int) -> FiniteMat:
    """Reduce a matrix over ``Z/p^N`` modulo ``p^m``."""
    ring = M.ring
    if not ring.char_zero:
        raise ValueError("projection to Z/p^m needs a characteristic-zero ring")
    if m > ring.precision:
        raise ValueError(f"m = {m} exceeds ring precision {ring.precision}")
    return FiniteMat.from_rows(ring.p, m, [[x.payload for x in row] for row in M.rows])


def el_image_index(n: int, p: int, k: int, m: int, element_cap: int = DEFAULT_ELEMENT_CAP) -> int:
    """Index of the image of ``EL_n(p^k Z_p)`` in SL_n(Z/p^m).

    The ambient order comes from the closed formula, so for ``k = 0`` the
    result certifies that elementary matrices generate.
    """
    if not 0 <= k < m:
        raise ValueError(f"need 0 <= k < m, got k = {k}, m = {m}")
    H = group_closure(el_generators(n, p, k, m), element_cap)
    total = sl_order_formula(n, p, m)
    idx, rem = divmod(total, H.order)
    assert rem == 0, "Lagrange violated"
    return idx


# derived subgroup and abelianization -----------------------------------------------


class _Closure:
    """Incrementally extendable subgroup closure (no BFS tree)."""

    def __init__(self, n, p, q):
        self.n, self.p, self.q = n, p, q
        self.moves: list[tuple] = []
        ident = _identity(n)
        self.elements = [ident]
        self.seen = {ident}

    def add(self, g: tuple, cap: int):
        if g in self.seen:
            return
        n, p, q = self.n, self.p, self.q
        new_moves = [mv for mv in (g, _inv(g, n, p, q)) if mv not in self.moves]
        self.moves.extend(new_moves)
        # existing elements need the new moves; new elements need all moves
        pending = [(x, new_moves) for x in self.elements]
        elements, seen, moves = self.elements, self.seen, self.moves
        while pending:
            x, mvs = pending.pop()
            for mv in mvs:
                y = _mul(mv, x, n, q)
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    pending.append((y, moves))
            if len(elements) > cap:
                raise ResourceCapExceeded(f"closure exceeded {cap} elements")


def _commutator(a, b, n, p, q):
    return _mul(_mul(a, b, n, q), _mul(_inv(a, n, p, q), _inv(b, n, p, q), n, q), n, q)


def derived_subgroup(G: FiniteGroup, element_cap: int = DEFAULT_ELEMENT_CAP) -> FiniteGroup:
    """Normal closure in G of the commutators of generator pairs."""
    n, p, q = G.n, G.p, G.modulus
    gens = [g.entries for g in G.generators]
    C = _Closure(n, p, q)
    hgens: list[tuple] = []
    ident = _identity(n)
    for a in gens:
        for b in gens:
            c = _commutator(a, b, n, p, q)
            if c != ident and c not in C.seen:
                hgens.append(c)
                C.add(c, element_cap)
    conj = [(g, _inv(g, n, p, q)) for g in gens]
    changed = True
    while changed:
        changed = False
        for h in list(hgens):
            for g, gi in conj:
                c = _mul(_mul(g, h, n, q), gi, n, q)
                if c not in C.seen:
                    hgens.append(c)
                    C.add(c, element_cap)
                    changed = True
    D = group_closure([FiniteMat(p, G.m, n, h) for h in hgens], element_cap, shape=(p, G.m, n))
    assert D.order == len(C.elements)
    return D


@dataclass
class AbelianQuotient:
    """``G / D`` for a normal subgroup ``D`` with abelian quotient.

    ``label[i]`` is the coset of ``G.elements[i]``; coset 0 is ``D`` itself.
    """

    group: FiniteGroup
    kernel: FiniteGroup
    label: list[int]
    reps: list[tuple]
    orders: list[int] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.reps)

    def coset(self, g: tuple) -> int:
        return self.label[self.group.index[g]]

    def times(self, c: int, g: tuple) -> int:
        """Coset of ``g * rep(c)``."""
        return self.coset(self.group.mul(g, self.reps[c]))

    def invariant_factors(self) -> list[int]:
        return invariant_factors_from_orders(self.orders)


def abelian_quotient(G: FiniteGroup, D: FiniteGroup | None = None) -> AbelianQuotient:
    if D is None:
        D = derived_subgroup(G)
    label = [-1] * G.order
    reps: list[tuple] = []
    mul, idx = G.mul, G.index
    for i, g in enumerate(G.elements):
        if label[i] >= 0:
            continue
        c = len(reps)
        reps.append(g)
        for h in D.elements:
            j = idx[mul(g, h)]
            assert label[j] in (-1, c), "kernel is not normal"
            label[j] = c
    A = AbelianQuotient(G, D, label, reps)
    for c, g in enumerate(reps):
        x, k = g, 1
        while label[idx[x]] != 0:
            x = mul(x, g)
            k += 1
        A.orders.append(k)
    return A


def invariant_factors_from_orders(orders: Iterable[int]) -> list[int]:
    """Invariant factors ``d_1 | d_2 | ...`` of a finite abelian group from its element orders."""
    orders = list(orders)
    size = len(orders)
    if size == 1:
        return []
    partitions = {}
    for ell, e in factorint(size).items():
        # s_i = log_ell #{x : x^(ell^i) = 1}
        s = [0]
        i = 1
        while s[-1] < e:
            cnt = sum(1 for o in orders if (ell**i) % o == 0)
            s.append(round(math.log(cnt, ell)))
            assert ell ** s[-1] == cnt, "not an abelian group"
            i += 1
        at_least = [s[i] - s[i - 1] for i in range(1, len(s))]  # parts >= i
        parts = [sum(1 for a in at_least if a > r) for r in range(at_least[0])]
        partitions[ell] = sorted(parts, reverse=True)
    width = max(len(v) for v in partitions.values())
    factors = []
    for r in range(width):
        d = 1
        for ell, parts in partitions.items():
            if r < len(parts):
                d *= ell ** parts[r]
        factors.append(d)
    return sorted(factors)


def abelianization(G: FiniteGroup) -> list[int]:
    """Invariant factors of ``G / [G, G]``; the empty list means perfect."""
    return abelian_quotient(G).invariant_factors()


def abelian_invariants(G: FiniteGroup) -> list[int]:
    """Invariant factors of ``G`` itself, assuming it is abelian."""
    ident = G.elements[0]
    orders = []
    for g in G.elements:
        x, k = g, 1
        while x != ident:
            x = G.mul(x, g)
            k += 1
        orders.append(k)
    return invariant_factors_from_orders(orders)


# nontrivial representations for p = 2, 3 ----------------------------------------------


SL2_GENERATOR_NAMES = ("E12(1)", "E21(1)")


@dataclass
class RepDescription:
    """A homomorphism SL_2(Z_p) -> SO_2 inside GL_D(R) with finite cyclic image.

    Each generator maps to a rotation by ``2 pi * multiple / cyclic_order`` in
    the top-left 2x2 block, identity elsewhere. Angles stay integers.
    """

    p: int
    k: int
    cyclic_order: int
    target_dim: int
    generator_images: dict
    invariant_factors: list

    def angle_of_word(self, letters: Iterable[tuple[str, int]]) -> int:
        """Multiple of ``2 pi / c`` for a word of ``(generator name, +-1)`` letters."""
        c = self.cyclic_order
        return sum(sign * self.generator_images[name] for name, sign in letters) % c

    def image_matrix(self, multiple: int) -> list[list[float]]:
        """Float rendering of a rotation image, for display only."""
        D = self.target_dim
        theta = 2 * math.pi * multiple / self.cyclic_order
        M = [[1.0 if i == j else 0.0 for j in range(D)] for i in range(D)]
        M[0][0], M[0][1] = math.cos(theta), -math.sin(theta)
        M[1][0], M[1][1] = math.sin(theta), math.cos(theta)
        return M

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "cyclic_order": self.cyclic_order,
            "target_dim": self.target_dim,
            "invariant_factors": self.invariant_factors,
            "generator_images": {
                name: {"angle": f"2*pi*{mult}/{self.cyclic_order}", "multiple": mult}
                for name, mult in self.generator_images.items()
            },
        }


def rep_level(p: int) -> int:
    if p == 2:
        return 3
    if p == 3:
        return 1
    raise ValueError(f"nontrivial representations are constructed only for p = 2, 3, got {p}")


def _find_character(A: AbelianQuotient, gens: list[tuple], c: int) -> list[int] | None:
    """Values ``chi(gens)`` in Z/c of a homomorphism G/D -> Z/c onto Z/c."""
    for values in product(range(c), repeat=len(gens)):
        if math.gcd(c, *values) != 1:
            continue
        chi = {0: 0}
        queue = [0]
        ok = True
        while queue and ok:
            x = queue.pop()
            for g, v in zip(gens, values):
                y = A.times(x, g)
                want = (chi[x] + v) % c
                if y in chi:
                    if chi[y] != want:
                        ok = False
                        break
                else:
                    chi[y] = want
                    queue.append(y)
        if ok:
            return list(values)
    return None


def nontrivial_rep(p: int, D: int, element_cap: int = DEFAULT_ELEMENT_CAP, group: FiniteGroup | None = None):
    """Nontrivial SL_2(Z_p) -> GL_D(R) through the abelianization of SL_2(Z/p^2k).

    Returns ``(rep, group)`` so callers can reuse the enumerated quotient.
    """
    k = rep_level(p)
    if D < 2:
        raise ValueError("target dimension must be at least 2")
    G = group if group is not None else special_linear_group(2, p, 2 * k, element_cap)
    A = abelian_quotient(G)
    factors = A.invariant_factors()
    if not factors:
        raise AbelianizationTrivial(f"SL_2(Z/{p}^{2 * k}) came out perfect")
    c = factors[-1]
    gens = [g.entries for g in G.generators]
    values = _find_character(A, gens, c)
    if values is None:
        raise AbelianizationTrivial(f"no surjective character onto Z/{c}")
    images = dict(zip(SL2_GENERATOR_NAMES, values))
    log.info("SL_2(Z/%d^%d): abelianization %s, chi = %s", p, 2 * k, factors, images)
    return RepDescription(p, k, c, D, images, factors), G


def random_relators(G: FiniteGroup, count: int, rng: random.Random, length: int = 12) -> list[list[tuple[str, int]]]:
    """Words in ``E12(1)^{+-1}, E21(1)^{+-1}`` that evaluate to the identity.

    A random word is closed up with the BFS-tree word of its inverse, then the
    whole relator is re-evaluated by matrix multiplication.
    """
    gens = [g.entries for g in G.generators]
    letter_of = {}
    for name, g in zip(SL2_GENERATOR_NAMES, gens):
        letter_of[g] = (name, 1)
        letter_of.setdefault(G.inv(g), (name, -1))
    move_letters = [letter_of[mv] for mv in G.moves]
    alphabet = [(name, s) for name in SL2_GENERATOR_NAMES for s in (1, -1)]
    matrix_of = {}
    for name, g in zip(SL2_GENERATOR_NAMES, gens):
        matrix_of[(name, 1)] = g
        matrix_of[(name, -1)] = G.inv(g)
    ident = G.elements[0]
    relators = []
    while len(relators) < count:
        word = [rng.choice(alphabet) for _ in range(rng.randint(1, length))]
        x = ident
        for letter in word:
            x = G.mul(x, matrix_of[letter])
        word += [move_letters[mv] for mv in G.word_of(G.inv(x))]
        y = ident
        for letter in word:
            y = G.mul(y, matrix_of[letter])
        if y != ident:
            raise AssertionError("relator does not evaluate to the identity")
        relators.append(word)
    return relators
