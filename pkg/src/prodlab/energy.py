"""Exact multiplicative and additive energies.

The fast path builds representation-count tables by hash-join convolution
over canonical factored keys; the reference path loops over raw tuples of
exact fractions and never touches the convolution code.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ._parallel import map_chunks
from .errors import DEFAULT_TUPLE_BUDGET, BudgetError
from .rationals import FactoredRational
from .sets import RationalSet, sum_multiplicities


@dataclass(frozen=True)
class GammaTable:
    """Map from k-fold product value to its (possibly weighted) tuple count."""

    k: int
    entries: dict

    def total(self):
        return sum(self.entries.values())

    def sorted_items(self):
        return sorted(self.entries.items(), key=lambda kv: kv[0].to_fraction())

    def to_csv(self, fh) -> None:
        fh.write("value,count\n")
        for value, count in self.sorted_items():
            fh.write(f"{value},{count}\n")


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights tied to a recorded element order.

    Weights may be floats or exact rationals; ``normalized`` asserts the
    squares sum to 1 within 1e-12.
    """

    elements: tuple[FactoredRational, ...]
    weights: tuple
    normalized: bool = False

    def __post_init__(self):
        if len(self.elements) != len(self.weights):
            raise ValueError("one weight per element is required")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if self.normalized:
            total = math.fsum(float(w) * float(w) for w in self.weights)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"normalized weights must satisfy sum w^2 = 1, got {total}")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(w, (int, Fraction)) for w in self.weights)

    @classmethod
    def uniform(cls, A: RationalSet) -> "WeightVector":
        n = len(A)
        w = 1.0 / math.sqrt(n)
        return cls(A.elements, (w,) * n, normalized=True)

    @classmethod
    def for_set(cls, A: RationalSet, weights: Iterable, normalized: bool = False) -> "WeightVector":
        return cls(A.elements, tuple(weights), normalized=normalized)


def _check_budget(predicted: int, budget: int, what: str) -> None:
    if predicted > budget:
        raise BudgetError(
            f"{what} needs {predicted} tuples, over the budget of {budget}"
        )


def _convolve_int(
    t1: dict[FactoredRational, int],
    t2: dict[FactoredRational, int],
    threads: int,
) -> dict[FactoredRational, int]:
    items2 = list(t2.items())

    def work(chunk):
        out: Counter = Counter()
        for v1, c1 in chunk:
            for v2, c2 in items2:
                out[v1 * v2] += c1 * c2
        return out

    total: Counter = Counter()
    for part in map_chunks(work, list(t1.items()), threads):
        total.update(part)
    return dict(total)


def gamma_k(
    A: RationalSet,
    k: int,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> GammaTable:
    """Exact k-fold product representation counts, by balanced binary joins."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    _check_budget(len(A) ** k, budget, f"order-{k} product table")
    cache: dict[int, dict[FactoredRational, int]] = {1: {a: 1 for a in A.elements}}

    def level(j: int) -> dict[FactoredRational, int]:
        if j not in cache:
            cache[j] = _convolve_int(level((j + 1) // 2), level(j // 2), threads)
        return cache[j]

    table = level(k)
    assert sum(table.values()) == len(A) ** k, "gamma counts must total |A|^k"
    return GammaTable(k, table)


def weighted_gamma(A: RationalSet, k: int, w: WeightVector, *, budget: int = DEFAULT_TUPLE_BUDGET) -> GammaTable:
    """Weighted representation table F(m) = sum over k-tuples of weight products.

    Runs sequentially in a fixed order so float accumulation is reproducible.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if w.elements != A.elements:
        raise ValueError("weight vector is bound to a different element order")
    _check_budget(len(A) ** k, budget, f"order-{k} weighted table")
    exact = w.is_exact
    zero = Fraction(0) if exact else 0.0
    level1 = {a: (w.weights[i] if exact else float(w.weights[i])) for i, a in enumerate(A.elements)}
    cache = {1: level1}

    def convolve(t1, t2):
        out = {}
        for v1, c1 in t1.items():
            for v2, c2 in t2.items():
                key = v1 * v2
                out[key] = out.get(key, zero) + c1 * c2
        return out

    def level(j: int):
        if j not in cache:
            cache[j] = convolve(level((j + 1) // 2), level(j // 2))
        return cache[j]

    return GammaTable(k, level(k))


def energy_k(
    A: RationalSet,
    k: int,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> int:
    """Exact count of ordered 2k-tuples with equal k-fold products."""
    table = gamma_k(A, k, budget=budget, threads=threads).entries
    return sum(c * c for c in table.values())


def additive_energy_k(
    A: RationalSet,
    k: int,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> int:
    """Exact count of ordered 2k-tuples with equal k-fold sums."""
    table = sum_multiplicities(A, k, budget=budget, threads=threads)
    return sum(c * c for c in table.values())


def weighted_energy(
    A: RationalSet,
    k: int,
    w: WeightVector,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
):
    """Weighted energy: sum of squared weighted representation counts.

    Exact Fraction arithmetic when every weight is rational, compensated
    float summation otherwise.
    """
    table = weighted_gamma(A, k, w, budget=budget).entries
    if w.is_exact:
        return sum((c * c for c in table.values()), Fraction(0))
    return math.fsum(c * c for c in table.values())


def energy_bruteforce(
    A: RationalSet,
    k: int,
    w: WeightVector | None = None,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
):
    """Reference energy by direct comparison over all ordered 2k-tuples.

    Products are taken over exact fractions, independently of the factored
    convolution path.
    """
    n = len(A)
    if k < 1:
        raise ValueError("k must be a positive integer")
    _check_budget(n ** (2 * k), budget, f"order-{k} brute force")
    fracs = [a.to_fraction() for a in A.elements]
    products = []
    tuple_weights = []
    for tup in itertools.product(range(n), repeat=k):
        prod = Fraction(1)
        for i in tup:
            prod *= fracs[i]
        products.append(prod)
        if w is not None:
            wp = w.weights[tup[0]]
            for i in tup[1:]:
                wp = wp * w.weights[i]
            tuple_weights.append(wp)
    m = len(products)
    if w is None:
        count = 0
        for i in range(m):
            pi = products[i]
            for j in range(m):
                if pi == products[j]:
                    count += 1
        return count
    if w.is_exact:
        acc = Fraction(0)
        for i in range(m):
            pi = products[i]
            for j in range(m):
                if pi == products[j]:
                    acc += tuple_weights[i] * tuple_weights[j]
        return acc
    terms = []
    for i in range(m):
        pi = products[i]
        for j in range(m):
            if pi == products[j]:
                terms.append(float(tuple_weights[i]) * float(tuple_weights[j]))
    return math.fsum(terms)
