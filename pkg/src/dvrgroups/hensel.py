"""Polynomial root lifting in a truncated complete DVR."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import CharacteristicPositive, HypothesisFailed, NoConvergence, ResidueFieldTooSmall, RingMismatch
from .localring import AtLeastPrecision, RingDescriptor, RingElem


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial over a ring model, lowest degree first."""

    ring: RingDescriptor
    coeffs: tuple

    @classmethod
    def from_ints(cls, ring: RingDescriptor, coeffs: Sequence) -> "Polynomial":
        return cls(ring, tuple(ring.elem(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, a: RingElem) -> RingElem:
        return poly_eval(self, a)

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, ring: RingDescriptor, obj: list) -> "Polynomial":
        return cls(ring, tuple(ring.parse(c) for c in obj))


@dataclass(frozen=True)
class RootWitness:
    q: RingElem
    r: int
    certificate: RingElem

    def to_json(self) -> dict:
        return {
            "ring": self.q.ring.to_json(),
            "q": self.q.to_json(),
            "r": self.r,
            "certificate": self.certificate.to_json(),
        }


def poly_eval(f: Polynomial, a: RingElem) -> RingElem:
    if a.ring != f.ring:
        raise RingMismatch(f"{a.ring!r} != {f.ring!r}")
    acc = f.ring.zero
    for c in reversed(f.coeffs):
        acc = acc * a + c
    return acc


def poly_deriv(f: Polynomial) -> Polynomial:
    if len(f.coeffs) <= 1:
        return Polynomial(f.ring, (f.ring.zero,))
    return Polynomial(f.ring, tuple(c * i for i, c in enumerate(f.coeffs) if i > 0))


def hensel_lift(f: Polynomial, a: RingElem, trace: list | None = None) -> RingElem:
    """Newton-lift ``a`` to a root of ``f`` modulo ``pi^N``.

    Requires ``v(f(a)) >= 2 v(f'(a)) + 1``. The result ``a0`` satisfies
    ``f(a0) = 0`` in the model and ``a0 = a mod f'(a) pi``. If ``trace`` is a
    list, the residual valuation at each step is appended to it.
    """
    fa = poly_eval(f, a)
    v = fa.valuation()
    if trace is not None:
        trace.append(v)
    if v is AtLeastPrecision:
        return a
    df = poly_deriv(f)
    d = poly_eval(df, a)
    e = d.valuation()
    if e is AtLeastPrecision:
        raise HypothesisFailed("f'(a) vanishes in the model")
    if v < 2 * e + 1:
        raise HypothesisFailed(f"v(f(a)) = {v} < 2 v(f'(a)) + 1 = {2 * e + 1}")

    N = f.ring.precision
    while True:
        # a <- a - pi^(v-e) * (f(a)/pi^v) * (f'(a)/pi^e)^-1
        unit = d.shift_down(e)
        pi_gap = f.ring.pi_power(v - e)
        a = a - pi_gap * fa.shift_down(v) * unit.inverse()
        fa = poly_eval(f, a)
        new_v = fa.valuation()
        if trace is not None:
            trace.append(new_v)
        if new_v is AtLeastPrecision:
            return a
        if new_v <= v:
            raise NoConvergence(f"residual valuation stalled at {new_v} (precision {N})")
        v = new_v
        d = poly_eval(df, a)
        if d.valuation() != e:
            raise NoConvergence("valuation of f'(a) changed during iteration")


def fourth_root_witness(ring: RingDescriptor) -> RootWitness:
    """Unit ``q`` and positive integer ``r`` with ``q^4 = -r``.

    Uses ``t^4 + 31`` from ``a = 1`` when p = 2 and ``t^4 + (p-1)`` from
    ``a = p - 1`` otherwise.
    """
    if not ring.char_zero:
        raise CharacteristicPositive("fourth-root witness exists only in characteristic zero")
    p = ring.p
    if p == 2:
        r, start = 31, 1
    else:
        r, start = p - 1, p - 1
    f = Polynomial.from_ints(ring, [r, 0, 0, 0, 1])
    q = hensel_lift(f, ring.elem(start))
    return RootWitness(q, r, q**4 + r)


def unit_with_unit_square_minus_one(ring: RingDescriptor) -> RingElem:
    """A unit ``q`` such that ``q^2 - 1`` is also a unit (needs p > 3)."""
    p = ring.p
    if p in (2, 3):
        raise ResidueFieldTooSmall(f"residue field F_{p} has at most 3 elements")
    # residues 0, 1, p-1 are the only ones with c(c^2 - 1) = 0 mod p
    return ring.elem(2)
