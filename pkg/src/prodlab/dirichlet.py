"""Finite-interval mean values of Dirichlet polynomials against the exact
weighted-energy limit.

The numeric side integrates |f(t)|^(2k) over [0, T] with oscillation-aware
composite Simpson quadrature; the exact side is the energy engine.  Numeric
integration is restricted to positive term values (their logarithms are the
frequencies); mixed-sign inputs are served by the exact path only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from ._parallel import map_chunks
from .energy import WeightVector, weighted_energy
from .errors import DEFAULT_SAMPLE_BUDGET, DEFAULT_TUPLE_BUDGET, BudgetError
from .rationals import FactoredRational, add_shift, as_fraction, fraction_valuation
from .sets import RationalSet

_LOG_PRECISION_BITS = 120


def _high_precision_log(value: Fraction) -> float:
    """log of an exact positive fraction, computed at >= 80 working bits."""
    with mpmath.workprec(_LOG_PRECISION_BITS):
        return float(mpmath.log(value.numerator) - mpmath.log(value.denominator))


@dataclass(frozen=True)
class DirichletTerm:
    weight: float
    value: FactoredRational
    frequency: float


class DirichletPolynomial:
    """Finite sum of weight * value^(it), terms keyed by distinct values.

    Equal values are collapsed (weights summed) on construction.  An
    optional family tag (p, j, u) asserts every term value n satisfies
    v_p(n - u) = j, i.e. the polynomial belongs to the fixed-valuation
    family for that prime, level, and shift.
    """

    __slots__ = ("terms", "family")

    def __init__(
        self,
        pairs: Sequence[tuple[float, FactoredRational]],
        family: tuple[int, int, object] | None = None,
    ):
        merged: dict[FactoredRational, float] = {}
        for weight, value in pairs:
            if weight < 0:
                raise ValueError("coefficients must be nonnegative")
            merged[value] = merged.get(value, 0.0) + float(weight)
        ordered = sorted(merged, key=FactoredRational.to_fraction)
        self.terms: tuple[DirichletTerm, ...] = tuple(
            DirichletTerm(merged[v], v, _high_precision_log(abs(v).to_fraction()))
            for v in ordered
        )
        if family is not None:
            p, j, u = family
            for term in self.terms:
                base = term.value.to_fraction() - as_fraction(u)
                if base == 0 or fraction_valuation(base, p) != j:
                    raise ValueError(
                        f"term value {term.value} is not at level {j} of prime {p} "
                        f"under shift {u}"
                    )
        self.family = family

    def __len__(self) -> int:
        return len(self.terms)

    def values(self) -> RationalSet:
        return RationalSet(t.value for t in self.terms)

    def weight_vector(self) -> WeightVector:
        values = self.values()
        by_value = {t.value: t.weight for t in self.terms}
        return WeightVector(values.elements, tuple(by_value[v] for v in values.elements))


def build(A: RationalSet, w: WeightVector, u=0) -> DirichletPolynomial:
    """Polynomial with one term per element, over the shifted values a + u."""
    if w.elements != A.elements:
        raise ValueError("weight vector is bound to a different element order")
    pairs = []
    for weight, a in zip(w.weights, A.elements):
        value = a if as_fraction(u) == 0 else add_shift(a, u)
        pairs.append((float(weight), value))
    return DirichletPolynomial(pairs)


def mean_value_2k(
    f: DirichletPolynomial,
    k: int,
    T: float,
    *,
    samples_per_period: int = 8,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    threads: int = 1,
) -> float:
    """(1/T) * integral of |f(t)|^(2k) over [0, T] by composite Simpson.

    The step keeps the fastest oscillation, 2k times the largest frequency
    gap, sampled at least ``samples_per_period`` points per period.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if T <= 0:
        raise ValueError("T must be positive")
    if not f.terms:
        return 0.0
    if any(not t.value.is_positive() for t in f.terms):
        raise ValueError(
            "numeric mean values need positive term values; "
            "use the exact mean value for mixed signs"
        )
    freqs = [t.frequency for t in f.terms]
    weights = [t.weight for t in f.terms]
    spread = max(freqs) - min(freqs)
    if spread == 0.0:
        # |f| is constant in t.
        return math.fsum(weights) ** (2 * k)
    omega = 2 * k * spread
    step_target = (2 * math.pi / omega) / samples_per_period
    intervals = max(2, math.ceil(T / step_target))
    if intervals % 2:
        intervals += 1
    if intervals + 1 > sample_budget:
        raise BudgetError(
            f"quadrature needs {intervals + 1} samples, over the budget of "
            f"{sample_budget}; reduce T or k"
        )
    h = T / intervals

    def integrand(points: list[int]) -> list[float]:
        out = []
        for idx in points:
            t = idx * h
            re = math.fsum(w * math.cos(fr * t) for w, fr in zip(weights, freqs))
            im = math.fsum(w * math.sin(fr * t) for w, fr in zip(weights, freqs))
            out.append((re * re + im * im) ** k)
        return out

    chunks = map_chunks(integrand, range(intervals + 1), threads)
    values = [v for chunk in chunks for v in chunk]
    total = math.fsum(
        (1.0 if i in (0, intervals) else (4.0 if i % 2 else 2.0)) * v
        for i, v in enumerate(values)
    )
    return total * h / 3.0 / T


def exact_mean_value(
    f: DirichletPolynomial,
    k: int,
    *,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> float:
    """The T -> infinity limit, delegated to the exact weighted energy."""
    values = f.values()
    return float(weighted_energy(values, k, f.weight_vector(), budget=budget))


@dataclass
class ConvergenceRow:
    T: float
    numeric: float
    exact: float

    @property
    def abs_error(self) -> float:
        return abs(self.numeric - self.exact)


@dataclass
class ConvergenceReport:
    """Mean values at increasing T against the exact limit."""

    k: int
    rows: list[ConvergenceRow]

    @property
    def slope(self) -> float | None:
        """Least-squares slope of log error against log T (None if any error is 0)."""
        pts = [(math.log(r.T), r.abs_error) for r in self.rows]
        if len(pts) < 2 or any(e == 0.0 for _, e in pts):
            return None
        xs = [x for x, _ in pts]
        ys = [math.log(e) for _, e in pts]
        n = len(pts)
        mx = math.fsum(xs) / n
        my = math.fsum(ys) / n
        denom = math.fsum((x - mx) ** 2 for x in xs)
        return math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys)) / denom

    def to_csv(self, fh) -> None:
        fh.write("T,numeric,exact,abs_error\n")
        for r in self.rows:
            fh.write(f"{r.T!r},{r.numeric!r},{r.exact!r},{r.abs_error!r}\n")


def convergence_report(
    f: DirichletPolynomial,
    k: int,
    T_list: Sequence[float],
    *,
    samples_per_period: int = 8,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> ConvergenceReport:
    exact = exact_mean_value(f, k, budget=budget)
    rows = []
    for T in T_list:
        numeric = mean_value_2k(
            f,
            k,
            T,
            samples_per_period=samples_per_period,
            sample_budget=sample_budget,
            threads=threads,
        )
        rows.append(ConvergenceRow(float(T), numeric, exact))
    return ConvergenceReport(k, rows)
