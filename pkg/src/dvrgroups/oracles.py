"""Brute-force oracles.

Everything here is deliberately naive and shares no code with the operations
it cross-checks: plain integers, exhaustive search, fixed-point iteration.
Golden values are regenerated from these functions only.
"""
from __future__ import annotations

from itertools import product
from math import gcd


def egcd_inverse(a: int, m: int) -> int:
    """Inverse of ``a`` modulo ``m`` by the extended Euclidean algorithm."""
    r0, r1, s0, s1 = a % m, m, 1, 0
    while r1:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if r0 != 1:
        raise ValueError(f"{a} is not invertible modulo {m}")
    return s0 % m


def int_poly(coeffs, x: int, q: int) -> int:
    return sum(c * x**i for i, c in enumerate(coeffs)) % q


def brute_force_roots(coeffs, q: int, residues=None) -> list[int]:
    """All roots of the integer polynomial modulo ``q`` (optionally among ``residues``)."""
    cand = range(q) if residues is None else residues
    return [x for x in cand if int_poly(coeffs, x, q) == 0]


def digit_lift_roots(coeffs, p: int, N: int, start_exp: int, start_residue: int, start_mod: int) -> list[int]:
    """Roots mod ``p^N`` by exhaustive search mod ``p^start_exp`` then one digit at a time.

    Only roots congruent to ``start_residue`` modulo ``start_mod`` are kept.
    """
    q = p**start_exp
    roots = [x for x in brute_force_roots(coeffs, q) if x % start_mod == start_residue % start_mod]
    for e in range(start_exp, N):
        q_next = p ** (e + 1)
        roots = [x + d * p**e for x in roots for d in range(p) if int_poly(coeffs, x + d * p**e, q_next) == 0]
    return sorted(set(roots))


def additive_closure(gens, q: int) -> set[int]:
    """Additive subgroup of Z/q generated by ``gens``, by fixed-point iteration."""
    S = {0}
    frontier = {0}
    while frontier:
        new = {(s + g) % q for s in frontier for g in gens} - S
        S |= new
        frontier = new
    return S


def closure_level(gens, p: int, N: int):
    """Smallest k with ``p^k Z/p^N`` inside the additive closure, or None."""
    q = p**N
    S = additive_closure(gens, q)
    for k in range(N):
        if all((p**k * u) % q in S for u in range(p ** (N - k))):
            return k
    return None


def _matmul(A, B, q):
    n = len(A)
    return tuple(tuple(sum(A[i][t] * B[t][j] for t in range(n)) % q for j in range(n)) for i in range(n))


def _det(A, q):
    n = len(A)
    if n == 1:
        return A[0][0] % q
    return sum((-1) ** c * A[0][c] * _det([row[:c] + row[c + 1:] for row in A[1:]], q) for c in range(n)) % q


def brute_force_sl_order(n: int, q: int) -> int:
    """Count determinant-one matrices over Z/q by enumerating all of them."""
    count = 0
    for flat in product(range(q), repeat=n * n):
        A = [list(flat[i * n:(i + 1) * n]) for i in range(n)]
        if _det(A, q) == 1:
            count += 1
    return count


def elementary_tuple(n, i, j, x, q):
    return tuple(tuple((1 if r == c else 0) + (x % q if (r, c) == (i - 1, j - 1) else 0) for c in range(n)) for r in range(n))


def naive_closure(gens, q: int) -> set:
    """Subgroup generated by ``gens`` (finite, so products suffice): iterate S <- S u S*gens."""
    n = len(gens[0]) if gens else 1
    ident = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
    S = {ident}
    while True:
        grown = S | {_matmul(s, g, q) for s in S for g in gens}
        if grown == S:
            return S
        S = grown


def naive_el_index(n: int, p: int, k: int, m: int) -> int:
    q = p**m
    gens = [elementary_tuple(n, i, j, p**k, q) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    return brute_force_sl_order(n, q) // len(naive_closure(gens, q))


def _inverse_by_search(g, S, q):
    n = len(g)
    ident = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
    for h in S:
        if _matmul(g, h, q) == ident:
            return h
    raise ValueError("no inverse in set")


def naive_abelianization_order(n: int, p: int, m: int) -> int:
    """``|G / [G, G]|`` for G = SL_n(Z/p^m), G' built from all commutator pairs."""
    q = p**m
    G = naive_closure([elementary_tuple(n, i, j, 1, q) for i in range(1, n + 1) for j in range(1, n + 1) if i != j], q)
    G = list(G)
    inv = {g: _inverse_by_search(g, G, q) for g in G}
    comms = {_matmul(_matmul(a, b, q), _matmul(inv[a], inv[b], q), q) for a in G for b in G}
    Gp = naive_closure(sorted(comms), q)
    return len(G) // len(Gp)


def clearing_solutions(p: int, N: int, k: int, x: int):
    """Solve the two clearing equations for ``E12(p^k x) E21(p^k)`` by exhaustive search.

    Returns ``(s, t)`` with ``E21(s) [[u, p^k x], [p^k, 1]] E12(t)`` diagonal,
    ``u = 1 + p^2k x``.
    """
    q = p**N
    pk = p**k % q
    u = (1 + pk * pk * x) % q
    s_vals = [s for s in range(q) if (s * u + pk) % q == 0]
    t_vals = [t for t in range(q) if (u * t + pk * x) % q == 0]
    return s_vals, t_vals, u


def order_via_gcd(values, p: int) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    k = 0
    while g and g % p == 0:
        g //= p
        k += 1
    return k
