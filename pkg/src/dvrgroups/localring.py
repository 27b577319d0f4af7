"""Complete discrete valuation rings at fixed finite precision.

Two models are supported:

* characteristic zero: ``Z/p^N``, a truncation of the p-adic integers with
  uniformizer ``p``;
* positive characteristic: ``F_p[t]/(t^N)``, a truncation of ``F_p[[t]]``
  with uniformizer ``t``.

Elements are immutable and always stored in canonical form, so equality and
hashing are structural.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from sympy import isprime

from .errors import NonUnit, NotFiniteIndex, RingMismatch

ZERO_CHAR = "zero"
POSITIVE_CHAR = "positive"


class _AtLeastPrecision:
    """Valuation of an element that vanishes in the model.

    Compares greater than every integer, so ``valuation(a) >= k`` reads
    naturally for zero elements.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AtLeastPrecision"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("AtLeastPrecision")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_AtLeastPrecision, ())


AtLeastPrecision = _AtLeastPrecision()


@dataclass(frozen=True)
class RingDescriptor:
    """Ring model ``Z/p^N`` (characteristic zero) or ``F_p[t]/(t^N)``."""

    characteristic: str
    p: int
    precision: int

    def __post_init__(self):
        if self.characteristic not in (ZERO_CHAR, POSITIVE_CHAR):
            raise ValueError(f"characteristic must be 'zero' or 'positive', got {self.characteristic!r}")
        if not isinstance(self.p, int) or not isprime(self.p):
            raise ValueError(f"residue characteristic {self.p} is not prime")
        if not isinstance(self.precision, int) or self.precision < 1:
            raise ValueError(f"precision must be a positive integer, got {self.precision}")

    @cached_property
    def char_zero(self) -> bool:
        return self.characteristic == ZERO_CHAR

    @cached_property
    def modulus(self) -> int:
        """Cardinality of the model, ``p^N``."""
        return self.p**self.precision

    def __repr__(self):
        if self.char_zero:
            return f"Z/{self.p}^{self.precision}"
        return f"F_{self.p}[t]/(t^{self.precision})"

    # construction -------------------------------------------------------

    def __call__(self, value: Union[int, Sequence[int], "RingElem"]) -> "RingElem":
        return self.elem(value)

    def elem(self, value) -> "RingElem":
        if isinstance(value, RingElem):
            if value.ring != self:
                raise RingMismatch(f"{value!r} does not belong to {self!r}")
            return value
        if self.char_zero:
            if not isinstance(value, int):
                raise TypeError(f"expected an integer for {self!r}, got {type(value).__name__}")
            return RingElem(self, value % self.modulus)
        if isinstance(value, int):
            coeffs = [value % self.p] + [0] * (self.precision - 1)
        else:
            coeffs = [int(c) % self.p for c in value][: self.precision]
            coeffs += [0] * (self.precision - len(coeffs))
        return RingElem(self, tuple(coeffs))

    @property
    def zero(self) -> "RingElem":
        return self.elem(0)

    @property
    def one(self) -> "RingElem":
        return self.elem(1)

    @property
    def uniformizer(self) -> "RingElem":
        return self.pi_power(1)

    def pi_power(self, k: int) -> "RingElem":
        """``pi^k``; zero in the model once ``k >= N``."""
        if k < 0:
            raise ValueError("negative power of the uniformizer")
        if k >= self.precision:
            return self.zero
        if self.char_zero:
            return RingElem(self, self.p**k)
        coeffs = [0] * self.precision
        coeffs[k] = 1
        return RingElem(self, tuple(coeffs))

    def random_element(self, rng: random.Random) -> "RingElem":
        if self.char_zero:
            return RingElem(self, rng.randrange(self.modulus))
        return RingElem(self, tuple(rng.randrange(self.p) for _ in range(self.precision)))

    def random_unit(self, rng: random.Random) -> "RingElem":
        while True:
            a = self.random_element(rng)
            if a.is_unit():
                return a

    def elements(self) -> Iterator["RingElem"]:
        """Enumerate the whole model (only sensible for small ``p^N``)."""
        if self.char_zero:
            for v in range(self.modulus):
                yield RingElem(self, v)
            return
        for v in range(self.modulus):
            coeffs = []
            for _ in range(self.precision):
                v, c = divmod(v, self.p)
                coeffs.append(c)
            yield RingElem(self, tuple(coeffs))

    def to_json(self) -> dict:
        return {"char": self.characteristic, "p": self.p, "precision": self.precision}

    @classmethod
    def from_json(cls, obj: dict) -> "RingDescriptor":
        return cls(obj["char"], int(obj["p"]), int(obj["precision"]))

    def parse(self, obj) -> "RingElem":
        """Inverse of :meth:`RingElem.to_json`."""
        if self.char_zero:
            return self.elem(int(obj))
        if isinstance(obj, (int, str)):
            return self.elem(int(obj))
        return self.elem([int(c) for c in obj])


class RingElem:
    """An element of a :class:`RingDescriptor` model.

    ``payload`` is the least nonnegative residue (characteristic zero) or a
    length-N coefficient tuple, lowest degree first (positive characteristic).
    """

    __slots__ = ("ring", "payload")

    def __init__(self, ring: RingDescriptor, payload):
        self.ring = ring
        self.payload = payload

    def _coerce(self, other) -> "RingElem":
        if isinstance(other, RingElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch(f"cannot combine elements of {self.ring!r} and {other.ring!r}")
            return other
        if isinstance(other, int):
            return self.ring.elem(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        R = self.ring
        if R.char_zero:
            return RingElem(R, (self.payload + other.payload) % R.modulus)
        p = R.p
        return RingElem(R, tuple((a + b) % p for a, b in zip(self.payload, other.payload)))

    __radd__ = __add__

    def __neg__(self):
        R = self.ring
        if R.char_zero:
            return RingElem(R, -self.payload % R.modulus)
        p = R.p
        return RingElem(R, tuple(-a % p for a in self.payload))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        R = self.ring
        if R.char_zero:
            return RingElem(R, (self.payload * other.payload) % R.modulus)
        N, p = R.precision, R.p
        a, b = self.payload, other.payload
        out = [0] * N
        for i, ai in enumerate(a):
            if ai:
                for j in range(N - i):
                    out[i + j] += ai * b[j]
        return RingElem(R, tuple(c % p for c in out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.ring.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.elem(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.ring == other.ring and self.payload == other.payload

    def __hash__(self):
        return hash((self.ring, self.payload))

    def __bool__(self):
        if self.ring.char_zero:
            return self.payload != 0
        return any(self.payload)

    def __repr__(self):
        return f"{self.to_json()!r} in {self.ring!r}"

    def __str__(self):
        if self.ring.char_zero:
            return str(self.payload)
        terms = [f"{c}*t^{i}" if i else str(c) for i, c in enumerate(self.payload) if c]
        return " + ".join(terms) or "0"

    # valuation theory ---------------------------------------------------

    def valuation(self):
        """Exponent of the largest power of the uniformizer dividing self."""
        R = self.ring
        if R.char_zero:
            v, p = self.payload, R.p
            if v == 0:
                return AtLeastPrecision
            k = 0
            while v % p == 0:
                v //= p
                k += 1
            return k
        for i, c in enumerate(self.payload):
            if c:
                return i
        return AtLeastPrecision

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def inverse(self) -> "RingElem":
        R = self.ring
        if not self.is_unit():
            raise NonUnit(f"{self} has positive valuation in {R!r}")
        if R.char_zero:
            return RingElem(R, pow(self.payload, -1, R.modulus))
        p, a = R.p, self.payload
        a0inv = pow(a[0], -1, p)
        b = [a0inv]
        for n in range(1, R.precision):
            s = sum(a[i] * b[n - i] for i in range(1, n + 1))
            b.append(-a0inv * s % p)
        return RingElem(R, tuple(b))

    def shift_down(self, k: int) -> "RingElem":
        """Return some ``u`` with ``pi^k * u == self``.

        Requires ``valuation(self) >= k``. The top ``k`` digits of ``u`` are not
        determined by ``self`` and are filled with zeros.
        """
        if k == 0:
            return self
        if self.valuation() < k:
            raise ValueError(f"{self} is not divisible by pi^{k}")
        R = self.ring
        if R.char_zero:
            return RingElem(R, self.payload // R.p**k)
        return RingElem(R, self.payload[k:] + (0,) * k)

    def to_json(self):
        if self.ring.char_zero:
            return str(self.payload)
        return list(self.payload)


def make_ring(characteristic: str, p: int, precision: int) -> RingDescriptor:
    return RingDescriptor(characteristic, p, precision)


def ring_arith(op: str, a: RingElem, b: RingElem | None = None) -> RingElem:
    if op == "neg":
        return -a
    if b is None:
        raise ValueError(f"{op} needs two operands")
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring!r} != {b.ring!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown ring operation {op!r}")


def valuation(a: RingElem):
    return a.valuation()


def invert(a: RingElem) -> RingElem:
    return a.inverse()


def additive_subgroup_level(gens: Iterable[RingElem]) -> int:
    """Smallest ``k`` with ``pi^k O`` inside the additive group spanned by ``gens``.

    In characteristic zero the additive span of ``gens`` is the ideal generated
    by the gcd of the representatives, so ``k`` is the least valuation. In
    positive characteristic the span is only an ``F_p``-subspace, so the answer
    comes from row reduction over ``F_p``.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("empty generator list")
    R = gens[0].ring
    for g in gens:
        if g.ring != R:
            raise RingMismatch(f"{g.ring!r} != {R!r}")
    if not any(gens):
        raise NotFiniteIndex("all generators vanish in the model")
    if R.char_zero:
        return min(g.valuation() for g in gens)
    return _fp_span_level(R, [g.payload for g in gens])


def _fp_span_level(R: RingDescriptor, vectors: list) -> int:
    # echelon form keyed by the lowest nonzero coefficient index
    p, N = R.p, R.precision
    pivots: dict[int, list[int]] = {}
    for vec in vectors:
        v = list(vec)
        for i in range(N):
            if v[i] == 0:
                continue
            if i in pivots:
                row = pivots[i]
                c = v[i]
                v = [(x - c * y) % p for x, y in zip(v, row)]
            else:
                inv = pow(v[i], -1, p)
                pivots[i] = [x * inv % p for x in v]
                break
    # t^k O lies in the span iff every degree >= k is a pivot
    k = N
    while k > 0 and (k - 1) in pivots:
        k -= 1
    if k == N:
        raise NotFiniteIndex(f"span of generators contains no nonzero ideal of {R!r}")
    return k

