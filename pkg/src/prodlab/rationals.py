"""Exact arithmetic on nonzero rationals kept in fully factored form.

A value is a sign together with a finite map from primes to nonzero
integer exponents, so valuations, coprimality, and products are read off
directly.  Addition leaves the factored world: shifts convert to an exact
``fractions.Fraction``, add, and re-factor.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

from .errors import ZeroValueError
from .primes import factorize, is_prime

_FRACTION_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction, or FactoredRational to an exact Fraction."""
    if isinstance(value, FactoredRational):
        return value.to_fraction()
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class FactoredRational:
    """A nonzero rational as sign * product(p ** e_p) in canonical form.

    Zero exponents are dropped eagerly, keys must be prime, and equality
    and hashing are structural.  Instances are immutable and therefore
    safe to share across threads.
    """

    __slots__ = ("_sign", "_items")

    def __init__(self, sign: int, exponents: dict[int, int] | None = None):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        items = []
        for p, e in sorted((exponents or {}).items()):
            if e == 0:
                continue
            if p < 2 or not is_prime(p):
                raise ValueError(f"exponent key {p} is not prime")
            items.append((int(p), int(e)))
        self._sign = sign
        self._items = tuple(items)

    @classmethod
    def _raw(cls, sign: int, items: tuple[tuple[int, int], ...]) -> "FactoredRational":
        # Internal fast path: items already canonical (sorted, nonzero, prime keys).
        self = object.__new__(cls)
        self._sign = sign
        self._items = items
        return self

    @classmethod
    def one(cls) -> "FactoredRational":
        return cls._raw(1, ())

    @classmethod
    def from_fraction(cls, value) -> "FactoredRational":
        fr = as_fraction(value)
        return factor(fr.numerator, fr.denominator)

    @classmethod
    def parse(cls, text: str) -> "FactoredRational":
        """Parse 'n', 'n/d', or a factored literal like '2^2*3*5^-1'."""
        s = text.strip()
        if not s:
            raise ValueError("empty rational literal")
        if _FRACTION_RE.match(s):
            num, _, den = s.partition("/")
            return factor(int(num), int(den) if den else 1)
        sign = 1
        if s[0] in "+-":
            if s[0] == "-":
                sign = -1
            s = s[1:]
        exps: dict[int, int] = {}
        for term in s.split("*"):
            base, _, power = term.partition("^")
            try:
                p = int(base)
                e = int(power) if power else 1
            except ValueError:
                raise ValueError(f"bad factored literal term {term!r} in {text!r}") from None
            exps[p] = exps.get(p, 0) + e
        return cls(sign, exps)

    @property
    def sign(self) -> int:
        return self._sign

    @property
    def exponents(self) -> dict[int, int]:
        return dict(self._items)

    @property
    def items(self) -> tuple[tuple[int, int], ...]:
        return self._items

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self._items)

    def valuation(self, p: int) -> int:
        for q, e in self._items:
            if q == p:
                return e
            if q > p:
                break
        return 0

    def to_fraction(self) -> Fraction:
        num = den = 1
        for p, e in self._items:
            if e > 0:
                num *= p**e
            else:
                den *= p ** (-e)
        return Fraction(self._sign * num, den)

    def is_positive(self) -> bool:
        return self._sign > 0

    def is_integer(self) -> bool:
        return all(e > 0 for _, e in self._items)

    def is_one(self) -> bool:
        return self._sign > 0 and not self._items

    def inverse(self) -> "FactoredRational":
        return FactoredRational._raw(self._sign, tuple((p, -e) for p, e in self._items))

    def __mul__(self, other):
        if not isinstance(other, FactoredRational):
            return NotImplemented
        exps = dict(self._items)
        for p, e in other._items:
            ne = exps.get(p, 0) + e
            if ne:
                exps[p] = ne
            else:
                del exps[p]
        return FactoredRational._raw(self._sign * other._sign, tuple(sorted(exps.items())))

    def __truediv__(self, other):
        if not isinstance(other, FactoredRational):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return FactoredRational.one()
        sign = self._sign if n % 2 else 1
        return FactoredRational._raw(sign, tuple((p, e * n) for p, e in self._items))

    def __neg__(self):
        return FactoredRational._raw(-self._sign, self._items)

    def __abs__(self):
        return FactoredRational._raw(1, self._items)

    def __eq__(self, other):
        if not isinstance(other, FactoredRational):
            return NotImplemented
        return self._sign == other._sign and self._items == other._items

    def __hash__(self):
        return hash((self._sign, self._items))

    def __str__(self):
        body = "*".join(str(p) if e == 1 else f"{p}^{e}" for p, e in self._items) or "1"
        return ("-" if self._sign < 0 else "") + body

    def __repr__(self):
        return f"FactoredRational('{self}')"


def factor(n: int, d: int = 1) -> FactoredRational:
    """Canonical factored form of n/d (d defaults to 1)."""
    if n == 0:
        raise ZeroValueError("zero has no factored form")
    if d < 1:
        raise ValueError("denominator must be a positive integer")
    sign = 1 if n > 0 else -1
    n = abs(n)
    g = gcd(n, d)
    n //= g
    d //= g
    exps = factorize(n)
    for p, e in factorize(d).items():
        exps[p] = -e
    return FactoredRational._raw(sign, tuple(sorted(exps.items())))


def valuation(x: FactoredRational, p: int) -> int:
    """p-adic valuation of x (0 when p does not appear)."""
    return x.valuation(p)


def mul(x: FactoredRational, y: FactoredRational) -> FactoredRational:
    return x * y


def inv(x: FactoredRational) -> FactoredRational:
    return x.inverse()


def add_shift(x: FactoredRational, u=1) -> FactoredRational:
    """x + u computed exactly and re-factored; u may be 0, int, Fraction, or factored."""
    total = x.to_fraction() + as_fraction(u)
    if total == 0:
        raise ZeroValueError(f"{x} + {u} is zero, which has no factored form")
    return factor(total.numerator, total.denominator)


def coprime(a: FactoredRational, b: FactoredRational) -> bool:
    """True iff no prime appears in both values."""
    return set(a.support).isdisjoint(b.support)


def fraction_valuation(value: Fraction, p: int) -> int:
    """p-adic valuation of an exact fraction without full factorization."""
    fr = Fraction(value)
    if fr == 0:
        raise ZeroValueError("zero has no valuation")
    num, den = fr.numerator, fr.denominator
    v = 0
    n = abs(num)
    while n % p == 0:
        n //= p
        v += 1
    if v:
        return v
    while den % p == 0:
        den //= p
        v -= 1
    return v
