"""Deterministic instance corpora shared by the unit and acceptance tests."""

from __future__ import annotations

import random

from prodlab.rationals import FactoredRational, factor
from prodlab.sets import RationalSet, ggp
from prodlab.structure import canonical_context

PRIME_POOL = [2, 3, 5, 7, 11, 13]


def small_sets(count: int = 50, max_size: int = 6, seed: int = 101) -> list[RationalSet]:
    """Mixed small sets: GGP subsets, random signed fractions, prime sets."""
    rng = random.Random(seed)
    out: list[RationalSet] = []
    while len(out) < count:
        style = rng.randrange(3)
        if style == 0:
            r = rng.randint(1, 2)
            primes = sorted(rng.sample([2, 3, 5], r))
            box = [(rng.randint(-2, 0), rng.randint(0, 2)) for _ in range(r)]
            G = ggp(primes, box)
            size = rng.randint(1, min(max_size, len(G)))
            elems = rng.sample(G.elements, size)
        elif style == 1:
            size = rng.randint(1, max_size)
            elems = []
            while len(elems) < size:
                n = rng.randint(-30, 30)
                d = rng.randint(1, 12)
                if n != 0:
                    elems.append(factor(n, d))
        else:
            size = rng.randint(2, min(max_size, len(PRIME_POOL)))
            elems = [factor(p) for p in rng.sample(PRIME_POOL, size)]
        A = RationalSet(elems)
        if len(A):
            out.append(A)
    return out


def ggp_instances(
    count: int = 30,
    max_size: int = 12,
    seed: int = 202,
    prime_pool: tuple[int, ...] = (2, 3, 5, 7),
    allow_negative_exponents: bool = True,
) -> list[tuple[RationalSet, int]]:
    """GGP-subset instances paired with an order k in {2, 3}."""
    rng = random.Random(seed)
    out: list[tuple[RationalSet, int]] = []
    while len(out) < count:
        k = rng.choice([2, 3])
        r = rng.randint(1, 3)
        primes = sorted(rng.sample(list(prime_pool), r))
        if allow_negative_exponents:
            box = [(rng.randint(-2, 0), rng.randint(0, 2)) for _ in range(r)]
        else:
            box = [(0, rng.randint(1, 2)) for _ in range(r)]
        G = ggp(primes, box)
        size = rng.randint(2, min(max_size, len(G)))
        A = RationalSet(rng.sample(G.elements, size))
        out.append((A, k))
    return out


def integer_instances(count: int = 30, seed: int = 303) -> list[tuple[RationalSet, int]]:
    """Positive-integer GGP subsets over primes avoiding 5, so the shift 5 is coprime."""
    return ggp_instances(
        count,
        seed=seed,
        prime_pool=(2, 3, 7, 11),
        allow_negative_exponents=False,
    )


def claim_group_instances(
    count: int = 20,
    max_group: int = 4,
    seed: int = 404,
) -> list[tuple[RationalSet, tuple]]:
    """(set, sign-pattern group key) pairs with group sizes <= max_group."""
    rng = random.Random(seed)
    out: list[tuple[RationalSet, tuple]] = []
    while len(out) < count:
        r = rng.randint(1, 2)
        primes = sorted(rng.sample([2, 3, 5], r))
        box = [(-rng.randint(1, 3), rng.randint(0, 2)) for _ in range(r)]
        G = ggp(primes, box)
        size = rng.randint(3, min(9, len(G)))
        A = RationalSet(rng.sample(G.elements, size))
        if any(-x.sign > 0 for x in A):  # pragma: no cover - GGP values are positive
            continue
        ctx = canonical_context(A)
        for key, vectors in ctx.decomposition.groups.items():
            if 1 <= len(vectors) <= max_group:
                out.append((A, key))
                if len(out) >= count:
                    break
    return out


def random_weight_fractions(size: int, rng: random.Random):
    """Nonnegative exact-rational weights (not normalized)."""
    from fractions import Fraction

    return tuple(Fraction(rng.randint(0, 6), rng.randint(1, 6)) for _ in range(size))
