"""Exhaustive solver for two-term unit equations c1*s1 + c2*s2 = 1 over
rationals supported on a fixed prime list with bounded exponents.

Candidate s1 values are scanned in lexicographic exponent order; s2 is
derived exactly and membership is decided by stripping the allowed primes
from its reduced fraction, never by general factorization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from ._parallel import map_chunks
from .errors import DEFAULT_TUPLE_BUDGET, BudgetError
from .primes import is_prime
from .rationals import FactoredRational
from .sets import RationalSet, ggp


@dataclass(frozen=True)
class SUnitInstance:
    """Primes, exponent height bound, and the two nonzero coefficients."""

    primes: tuple[int, ...]
    height: int
    c1: FactoredRational
    c2: FactoredRational

    def __post_init__(self):
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("primes must be distinct")
        for p in self.primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.height < 1:
            raise ValueError("height bound must be at least 1")

    @property
    def candidate_count(self) -> int:
        return (2 * self.height + 1) ** len(self.primes)


@dataclass(frozen=True)
class SolutionSet:
    """Ordered solution pairs, each verified exactly against the equation."""

    instance: SUnitInstance
    pairs: tuple[tuple[FactoredRational, FactoredRational], ...]

    @property
    def count(self) -> int:
        return len(self.pairs)

    def to_csv(self, fh) -> None:
        fh.write("s1,s2\n")
        for s1, s2 in self.pairs:
            fh.write(f"{s1},{s2}\n")


def generate_units(
    inst: SUnitInstance,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> RationalSet:
    """All (2H+1)^r products of the primes with exponents in [-H, H]."""
    H = inst.height
    return ggp(inst.primes, [(-H, H)] * len(inst.primes), budget=budget)


def _strip_primes(value: Fraction, primes: tuple[int, ...]) -> tuple[dict[int, int], int, int]:
    """Remove the given primes from a reduced fraction.

    Returns (exponents, numerator residue, denominator residue).
    """
    num, den = value.numerator, value.denominator
    exps: dict[int, int] = {}
    for p in primes:
        e = 0
        while num % p == 0:
            num //= p
            e += 1
        while den % p == 0:
            den //= p
            e -= 1
        if e:
            exps[p] = e
    return exps, num, den


def _membership(value: Fraction, inst: SUnitInstance) -> FactoredRational | None:
    """The factored form of value if it lies in the bounded-exponent set."""
    if value <= 0:
        return None
    exps, num, den = _strip_primes(value, inst.primes)
    if num != 1 or den != 1:
        return None
    if any(abs(e) > inst.height for e in exps.values()):
        return None
    return FactoredRational._raw(1, tuple(sorted(exps.items())))


def solve(
    inst: SUnitInstance,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> SolutionSet:
    """Scan s1 candidates in lexicographic exponent order and derive s2 exactly."""
    if inst.candidate_count > budget:
        raise BudgetError(
            f"{inst.candidate_count} candidates exceed the budget of {budget}"
        )
    H = inst.height
    c1 = inst.c1.to_fraction()
    c2 = inst.c2.to_fraction()
    ranges = [range(-H, H + 1) for _ in inst.primes]
    exponent_vectors = list(itertools.product(*ranges))

    def work(chunk):
        found = []
        for exps in chunk:
            s1 = FactoredRational._raw(
                1, tuple((p, e) for p, e in sorted(zip(inst.primes, exps)) if e)
            )
            remainder = 1 - c1 * s1.to_fraction()
            if remainder == 0:
                continue
            s2 = _membership(remainder / c2, inst)
            if s2 is not None:
                found.append((s1, s2))
        return found

    pairs = [p for part in map_chunks(work, exponent_vectors, threads) for p in part]
    for s1, s2 in pairs:
        # Independent re-check of every emitted pair in exact fractions.
        assert c1 * s1.to_fraction() + c2 * s2.to_fraction() == 1
    return SolutionSet(inst, tuple(pairs))


def solve_oracle(
    inst: SUnitInstance,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> SolutionSet:
    """Quadratic reference: test every ordered pair from the candidate set."""
    if inst.candidate_count**2 > budget:
        raise BudgetError(
            f"{inst.candidate_count ** 2} pairs exceed the budget of {budget}"
        )
    units = generate_units(inst, budget=budget)
    c1 = inst.c1.to_fraction()
    c2 = inst.c2.to_fraction()
    fracs = [(u, u.to_fraction()) for u in units.elements]
    pairs = []
    for s1, f1 in fracs:
        for s2, f2 in fracs:
            if c1 * f1 + c2 * f2 == 1:
                pairs.append((s1, s2))
    # Match the solver's deterministic order: lexicographic in s1 exponents,
    # and s2 is unique per s1 for fixed coefficients.
    def key(pair):
        s1 = pair[0]
        return tuple(s1.valuation(p) for p in inst.primes)

    pairs.sort(key=key)
    return SolutionSet(inst, tuple(pairs))


@dataclass(frozen=True)
class BoundDiagnostic:
    """The smallest exponent constant consistent with the observed count.

    The bound shape is count <= (log H)^(C * 2^r); since the constant is
    not pinned down, the diagnostic inverts the inequality and reports
    C* = ln(count) / (2^r * ln ln H), flagging heights too small for the
    formula to make sense (H <= e) as out of regime.
    """

    count: int
    r: int
    height: int
    c_star: float | None
    in_regime: bool
    note: str

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.sunit_diagnostic/1",
            "count": self.count,
            "r": self.r,
            "height": self.height,
            "c_star": None if self.c_star is None else repr(self.c_star),
            "in_regime": self.in_regime,
            "note": self.note,
        }


def bound_diagnostic(sol: SolutionSet) -> BoundDiagnostic:
    inst = sol.instance
    r = len(inst.primes)
    H = inst.height
    count = sol.count
    if count == 0:
        return BoundDiagnostic(0, r, H, 0.0, H > math.e, "no solutions; C* is 0 by convention")
    if H <= math.e:
        return BoundDiagnostic(
            count, r, H, None, False,
            "regime too small: H must exceed e for log log H to be positive",
        )
    c_star = math.log(count) / (2**r * math.log(math.log(H)))
    return BoundDiagnostic(count, r, H, c_star, True, "")
