"""Finite sets of factored rationals: sumsets, product sets, k-fold
iterates, shifts, dilates, and the doubling parameter.

All set arithmetic is exact.  Product-side operations stay inside the
factored monoid; sum-side operations run over exact fractions and
re-factor the results.  Deduplication keys on the canonical factored
form, never on a float.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from ._parallel import map_chunks
from .errors import DEFAULT_TUPLE_BUDGET, BudgetError, ZeroValueError
from .primes import is_prime
from .rationals import FactoredRational, add_shift, factor


class RationalSet:
    """An immutable set of distinct nonzero factored rationals.

    ``elements`` is sorted ascending by numeric value; ``support`` lists
    the primes appearing in any element, ascending.
    """

    __slots__ = ("elements", "support", "_members")

    def __init__(self, values: Iterable[FactoredRational]):
        members = frozenset(values)
        self.elements: tuple[FactoredRational, ...] = tuple(
            sorted(members, key=FactoredRational.to_fraction)
        )
        self.support: tuple[int, ...] = tuple(
            sorted({p for x in self.elements for p in x.support})
        )
        self._members = members

    @classmethod
    def from_literals(cls, texts: Iterable[str]) -> "RationalSet":
        return cls(FactoredRational.parse(t) for t in texts)

    @classmethod
    def from_integers(cls, values: Iterable[int]) -> "RationalSet":
        return cls(factor(v) for v in values)

    @classmethod
    def from_fractions(cls, values: Iterable[Fraction]) -> "RationalSet":
        return cls(FactoredRational.from_fraction(v) for v in values)

    def to_fractions(self) -> tuple[Fraction, ...]:
        return tuple(x.to_fraction() for x in self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[FactoredRational]:
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._members

    def __eq__(self, other):
        if not isinstance(other, RationalSet):
            return NotImplemented
        return self._members == other._members

    def __hash__(self):
        return hash(self._members)

    def __repr__(self):
        inner = ", ".join(str(x) for x in self.elements[:8])
        if len(self.elements) > 8:
            inner += ", ..."
        return f"RationalSet({{{inner}}}, size={len(self)})"


@dataclass(frozen=True)
class DoublingReport:
    """Multiplicative doubling statistics of a set."""

    set_size: int
    product_set_size: int
    K_exact: Fraction
    K_integer: int


@dataclass(frozen=True)
class SumsetResult:
    """A sumset plus the count of ordered tuples that summed to zero.

    Zero is not representable in factored form, so it is reported here
    rather than stored; ``total_size`` is the true cardinality including
    zero when it occurred.
    """

    values: RationalSet
    zero_tuples: int

    @property
    def total_size(self) -> int:
        return len(self.values) + (1 if self.zero_tuples else 0)


def _check_budget(predicted: int, budget: int, what: str) -> None:
    if predicted > budget:
        raise BudgetError(
            f"{what} needs {predicted} tuples, over the budget of {budget}; "
            "raise the budget or shrink the instance"
        )


def product_set(
    A: RationalSet,
    B: RationalSet,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> RationalSet:
    """Exact {a*b : a in A, b in B}, deduplicated by canonical form."""
    _check_budget(len(A) * len(B), budget, "product set")
    bs = B.elements

    def work(chunk: list[FactoredRational]) -> set[FactoredRational]:
        out: set[FactoredRational] = set()
        for a in chunk:
            for b in bs:
                out.add(a * b)
        return out

    parts = map_chunks(work, A.elements, threads)
    values: set[FactoredRational] = set()
    for part in parts:
        values |= part
    return RationalSet(values)


def k_fold_product(
    A: RationalSet,
    k: int,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> RationalSet:
    """Exact k-fold product set, built by meet-in-the-middle joins."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    _check_budget(len(A) ** k, budget, f"{k}-fold product set")
    cache: dict[int, RationalSet] = {1: A}

    def level(j: int) -> RationalSet:
        if j not in cache:
            left = level((j + 1) // 2)
            right = level(j // 2)
            cache[j] = product_set(left, right, budget=budget, threads=threads)
        return cache[j]

    return level(k)


def _convolve_counts(
    t1: dict[Fraction, int],
    t2: dict[Fraction, int],
    threads: int = 1,
) -> dict[Fraction, int]:
    items2 = list(t2.items())

    def work(chunk: list[tuple[Fraction, int]]) -> Counter:
        out: Counter = Counter()
        for v1, c1 in chunk:
            for v2, c2 in items2:
                out[v1 + v2] += c1 * c2
        return out

    parts = map_chunks(work, list(t1.items()), threads)
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return dict(total)


def sum_multiplicities(
    A: RationalSet,
    k: int,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> dict[Fraction, int]:
    """Ordered k-tuple sum counts keyed by exact fraction (zero allowed as a key)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    _check_budget(len(A) ** k, budget, f"{k}-fold sumset")
    cache: dict[int, dict[Fraction, int]] = {1: {f: 1 for f in A.to_fractions()}}

    def level(j: int) -> dict[Fraction, int]:
        if j not in cache:
            cache[j] = _convolve_counts(level((j + 1) // 2), level(j // 2), threads)
        return cache[j]

    return level(k)


def _table_to_sumset(table: dict[Fraction, int]) -> SumsetResult:
    zero = table.get(Fraction(0), 0)
    values = RationalSet(
        factor(f.numerator, f.denominator) for f in table if f != 0
    )
    return SumsetResult(values, zero)


def sumset(
    A: RationalSet,
    B: RationalSet,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> SumsetResult:
    """Exact {a+b}, with ordered zero-sum pairs counted on the side."""
    _check_budget(len(A) * len(B), budget, "sumset")
    t1 = {f: 1 for f in A.to_fractions()}
    t2 = {f: 1 for f in B.to_fractions()}
    return _table_to_sumset(_convolve_counts(t1, t2, threads))


def k_fold_sumset(
    A: RationalSet,
    k: int,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> SumsetResult:
    """Exact k-fold sumset with the zero-tuple side channel."""
    return _table_to_sumset(sum_multiplicities(A, k, budget=budget, threads=threads))


def shift(A: RationalSet, lam) -> RationalSet:
    """Elementwise a + lam; refuses when -lam is an element (zero result)."""
    if isinstance(lam, FactoredRational):
        lam_value = lam
    else:
        lam_value = FactoredRational.from_fraction(lam)
    neg = -lam_value
    if neg in A:
        raise ZeroValueError(f"shift by {lam_value} sends element {neg} to zero")
    return RationalSet(add_shift(a, lam_value) for a in A)


def dilate(A: RationalSet, lam: FactoredRational) -> RationalSet:
    """Elementwise a * lam (lam nonzero by construction)."""
    return RationalSet(a * lam for a in A)


def doubling(
    A: RationalSet,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> DoublingReport:
    """Sizes of A and AA plus the exact and integer doubling constants."""
    if not len(A):
        raise ValueError("doubling of an empty set")
    aa = product_set(A, A, budget=budget, threads=threads)
    K_exact = Fraction(len(aa), len(A))
    K_integer = -(-len(aa) // len(A))
    return DoublingReport(len(A), len(aa), K_exact, K_integer)


def ggp(
    primes: Sequence[int],
    box: Sequence[tuple[int, int]],
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> RationalSet:
    """Generalized geometric progression: {prod p_i^e_i} over a box of exponents."""
    if len(primes) != len(box):
        raise ValueError("one exponent range per prime is required")
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    count = 1
    for lo, hi in box:
        if lo > hi:
            raise ValueError(f"empty exponent range {lo}..{hi}")
        count *= hi - lo + 1
    _check_budget(count, budget, "geometric progression")
    values = []
    ranges = [range(lo, hi + 1) for lo, hi in box]
    for exps in itertools.product(*ranges):
        items = tuple(
            (p, e) for p, e in sorted(zip(primes, exps)) if e != 0
        )
        values.append(FactoredRational._raw(1, items))
    return RationalSet(values)


def read_set_file(path) -> RationalSet:
    """Read a set file: one rational literal per line, '#' comments allowed."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            body = line.split("#", 1)[0].strip()
            if body:
                values.append(FactoredRational.parse(body))
    return RationalSet(values)


def write_set_file(path, A: RationalSet, header: str | None = None) -> None:
    """Write a set file in canonical factored literals, sorted by value."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for x in A.elements:
            fh.write(f"{x}\n")
