"""Certified lower bounds on the sphere-maximized weighted energy, and the
exact theorem-side upper bounds they are sandwiched against.

The estimator is a normalized-gradient fixed-point iteration (the power
method for even symmetric forms).  Because the objective has nonnegative
coefficients, the nonnegative unit sphere is invariant under the update
and every evaluated point yields a valid lower bound.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import sets
from ._parallel import map_chunks
from .energy import WeightVector, energy_k
from .errors import DEFAULT_TUPLE_BUDGET, RegimeError
from .rationals import FactoredRational, as_fraction, coprime
from .sets import RationalSet

# Above this, compare float estimates to exact integers through logarithms.
_LOG_COMPARE_THRESHOLD = 10**300


def real_leq_int(x: float, n: int) -> bool:
    """x <= n with exact comparison when n is representable, logs otherwise."""
    if x <= 0:
        return True
    if n > _LOG_COMPARE_THRESHOLD:
        return math.log(x) <= math.log(n)
    return Fraction(x) <= n


class _AscentKernel:
    """Static convolution plan reused across iterations of the ascent.

    Levels 1..k are built once as key lists plus contribution triples
    (out_index, prev_index, element_index); each iteration only refills
    float tables, so both the energy and its gradient are cheap.
    """

    def __init__(self, A: RationalSet, k: int, budget: int):
        if len(A) ** k > budget:
            from .errors import BudgetError

            raise BudgetError(
                f"order-{k} ascent on {len(A)} elements exceeds budget {budget}"
            )
        self.k = k
        self.n = len(A)
        self.keys: list[list[FactoredRational]] = [[], list(A.elements)]
        self.contribs: list[list[tuple[int, int, int]]] = [[], []]
        for level in range(2, k + 1):
            prev = self.keys[level - 1]
            index: dict[FactoredRational, int] = {}
            triples: list[tuple[int, int, int]] = []
            for j, key in enumerate(prev):
                for i, a in enumerate(A.elements):
                    out = key * a
                    idx = index.setdefault(out, len(index))
                    triples.append((idx, j, i))
            self.keys.append(list(index))
            self.contribs.append(triples)

    def tables(self, w: list[float]) -> list[list[float]]:
        levels: list[list[float]] = [[], list(w)]
        for level in range(2, self.k + 1):
            table = [0.0] * len(self.keys[level])
            prev = levels[level - 1]
            for out, j, i in self.contribs[level]:
                table[out] += prev[j] * w[i]
            levels.append(table)
        return levels

    def value_and_grad(self, w: list[float]) -> tuple[float, list[float]]:
        levels = self.tables(w)
        top = levels[self.k]
        energy = math.fsum(c * c for c in top)
        grad = [0.0] * self.n
        if self.k == 1:
            for i, c in enumerate(top):
                grad[i] = 2.0 * c
        else:
            prev = levels[self.k - 1]
            for out, j, i in self.contribs[self.k]:
                grad[i] += top[out] * prev[j]
            scale = 2.0 * self.k
            grad = [scale * g for g in grad]
        return energy, grad


@dataclass
class LambdaEstimate:
    """A certified lower bound on the sphere maximum with its witness."""

    value: float
    witness: WeightVector
    k: int
    restarts_used: int
    iterations: int
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.lambda_estimate/1",
            "value": self.value,
            "k": self.k,
            "witness": [repr(float(w)) for w in self.witness.weights],
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _dirichlet_start(n: int, rng: random.Random) -> list[float]:
    xs = [rng.expovariate(1.0) for _ in range(n)]
    total = sum(xs)
    return [math.sqrt(x / total) for x in xs]


def _ascend(
    kernel: _AscentKernel,
    start: list[float],
    max_iters: int,
    tol: float,
) -> tuple[float, list[float], int, bool]:
    k = kernel.k
    w = list(start)
    best_value = -math.inf
    best_w = w
    prev_value = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        energy, grad = kernel.value_and_grad(w)
        value = energy ** (1.0 / k)
        if value > best_value:
            best_value = value
            best_w = list(w)
        if prev_value is not None and abs(value - prev_value) <= tol:
            converged = True
            break
        prev_value = value
        norm = math.sqrt(math.fsum(g * g for g in grad))
        if norm == 0.0:
            break
        w = [g / norm for g in grad]
    return best_value, best_w, iterations, converged


def lambda_lower_estimate(
    A: RationalSet,
    k: int,
    *,
    restarts: int = 16,
    max_iters: int = 1000,
    tol: float = 1e-10,
    seed: int = 0,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> LambdaEstimate:
    """Best lower bound found by multi-restart ascent on the unit sphere.

    Restart 0 starts uniform; the rest start at seeded random points, so a
    fixed seed gives a fully deterministic result at any thread count.
    Returned values are valid lower bounds even without convergence.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    n = len(A)
    if n == 0:
        raise ValueError("estimate of an empty set")
    if k == 1:
        # The objective is identically 1 on the sphere for distinct elements.
        return LambdaEstimate(1.0, WeightVector.uniform(A), 1, 0, 0, True)
    kernel = _AscentKernel(A, k, budget)
    uniform = [1.0 / math.sqrt(n)] * n
    starts = [uniform] + [
        _dirichlet_start(n, random.Random(seed * 1_000_003 + r))
        for r in range(1, restarts)
    ]

    def work(chunk):
        return [_ascend(kernel, s, max_iters, tol) for s in chunk]

    results = [r for part in map_chunks(work, starts, threads) for r in part]
    best_idx = 0
    for i, res in enumerate(results):
        if res[0] > results[best_idx][0]:
            best_idx = i
    value, w, _, _ = results[best_idx]
    witness = WeightVector(A.elements, tuple(w), normalized=True)
    return LambdaEstimate(
        value=value,
        witness=witness,
        k=k,
        restarts_used=len(starts),
        iterations=sum(r[2] for r in results),
        converged=any(r[3] for r in results),
    )


@dataclass
class BoundReport:
    """Exact theorem-side bounds for one set, order, and shift.

    ``theorem_upper`` is the lambda-level bound of the active regime;
    the product-set lower bounds and the additive (sumset) lower bound
    are emitted as exact rationals for both regimes regardless.
    """

    k: int
    regime: str
    K_integer: int
    set_size: int
    shift: str
    theorem_upper: int
    energy_upper: int
    integer_product_lower: Fraction
    rational_product_lower: Fraction
    chang_sumset_lower: Fraction
    lambda_lower: float | None = None
    passed: bool | None = None

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.bound_report/1",
            "k": self.k,
            "regime": self.regime,
            "K_integer": self.K_integer,
            "set_size": self.set_size,
            "shift": self.shift,
            "theorem_upper": str(self.theorem_upper),
            "energy_upper": str(self.energy_upper),
            "integer_product_lower": str(self.integer_product_lower),
            "rational_product_lower": str(self.rational_product_lower),
            "chang_sumset_lower": str(self.chang_sumset_lower),
            "lambda_lower": None if self.lambda_lower is None else repr(self.lambda_lower),
            "passed": self.passed,
        }


def _coerce_shift(u) -> FactoredRational:
    if isinstance(u, FactoredRational):
        return u
    fr = as_fraction(u)
    if fr == 0:
        raise ValueError("shift must be nonzero")
    return FactoredRational.from_fraction(fr)


def _integer_regime_failure(A: RationalSet, u: FactoredRational) -> str | None:
    for a in A:
        if not (a.is_positive() and a.is_integer()):
            return f"element {a} is not a positive integer"
        if not coprime(u, a):
            return f"shift {u} shares a prime with element {a}"
    return None


def theorem_upper_bound(
    A: RationalSet,
    k: int,
    u=1,
    *,
    regime: str = "auto",
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> BoundReport:
    """Exact bound integers for the requested (or auto-detected) regime.

    The integer regime needs positive-integer elements and a shift coprime
    to all of them; the rational regime needs shift 1 (rescale first for
    any other shift).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    u_fr = _coerce_shift(u)
    failure = _integer_regime_failure(A, u_fr)
    rational_ok = u_fr.is_one()
    if regime == "auto":
        if failure is None:
            regime = "integer"
        elif rational_ok:
            regime = "rational"
        else:
            raise RegimeError(
                f"no regime applies: {failure}, and shift {u_fr} is not 1"
            )
    elif regime == "integer":
        if failure is not None:
            raise RegimeError(failure)
    elif regime == "rational":
        if not rational_ok:
            raise RegimeError(
                f"rational-regime bound requires shift 1; rescale the set by "
                f"1/{u_fr} and retry (got shift {u_fr})"
            )
    else:
        raise ValueError(f"unknown regime {regime!r}")

    K = sets.doubling(A, budget=budget, threads=threads).K_integer
    n = len(A)
    integer_base = (2 * k * k) ** K
    rational_base = (8 * k**4) ** K
    theorem_upper = integer_base if regime == "integer" else rational_base
    return BoundReport(
        k=k,
        regime=regime,
        K_integer=K,
        set_size=n,
        shift=str(u_fr),
        theorem_upper=theorem_upper,
        energy_upper=theorem_upper**k * n**k,
        integer_product_lower=Fraction(n**k, integer_base**k),
        rational_product_lower=Fraction(n**k, rational_base**k),
        chang_sumset_lower=Fraction(n**k, (2 * k * k - k) ** (k * K)),
    )


def sandwich_check(
    A: RationalSet,
    k: int,
    u=1,
    *,
    regime: str = "auto",
    restarts: int = 16,
    max_iters: int = 1000,
    tol: float = 1e-10,
    seed: int = 0,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> tuple[BoundReport, LambdaEstimate]:
    """Estimate the shifted set's lower bound and compare to the theorem bound."""
    report = theorem_upper_bound(A, k, u, regime=regime, budget=budget, threads=threads)
    shifted = sets.shift(A, _coerce_shift(u))
    estimate = lambda_lower_estimate(
        shifted,
        k,
        restarts=restarts,
        max_iters=max_iters,
        tol=tol,
        seed=seed,
        budget=budget,
        threads=threads,
    )
    report.lambda_lower = estimate.value
    report.passed = real_leq_int(estimate.value, report.theorem_upper)
    return report, estimate


@dataclass
class StabilityReport:
    """Subset energies checked against the whole-set theorem bound."""

    k: int
    K_integer: int
    theorem_upper: int
    samples: int
    max_ratio: float
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.stability_report/1",
            "k": self.k,
            "K_integer": self.K_integer,
            "theorem_upper": str(self.theorem_upper),
            "samples": self.samples,
            "max_ratio": repr(self.max_ratio),
            "failures": list(self.failures),
            "passed": self.passed,
        }


def subset_stability_check(
    A: RationalSet,
    k: int,
    *,
    samples: int = 20,
    seed: int = 0,
    u=1,
    regime: str = "rational",
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> StabilityReport:
    """For sampled subsets A' of the shifted set, check E_k(A')^(1/k) <= bound * |A'|.

    The comparison E_k(A') <= bound^k * |A'|^k runs in exact integers.
    """
    report = theorem_upper_bound(A, k, u, regime=regime, budget=budget, threads=threads)
    bound = report.theorem_upper
    shifted = sets.shift(A, _coerce_shift(u))
    rng = random.Random(seed)
    subsets = [shifted.elements]
    for _ in range(max(0, samples - 1)):
        size = rng.randint(1, len(shifted))
        subsets.append(tuple(rng.sample(shifted.elements, size)))
    max_ratio = 0.0
    failures: list[str] = []
    for elems in subsets:
        sub = RationalSet(elems)
        e = energy_k(sub, k, budget=budget, threads=threads)
        ok = e <= bound**k * len(sub) ** k
        ratio = e ** (1.0 / k) / (len(sub) * bound)
        max_ratio = max(max_ratio, ratio)
        if not ok:
            failures.append(
                f"subset of size {len(sub)} has energy {e} exceeding "
                f"{bound}^{k} * {len(sub)}^{k}"
            )
    return StabilityReport(k, report.K_integer, bound, len(subsets), max_ratio, failures)


@dataclass
class VerifyReport:
    """Consolidated exact checks of the energy and cardinality bounds."""

    k: int
    set_size: int
    K_integer: int
    shift: str
    shifted_energy: int
    shifted_product_size: int
    sumset_size: int | None
    checks: dict[str, bool]
    details: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.verify_report/1",
            "k": self.k,
            "set_size": self.set_size,
            "K_integer": self.K_integer,
            "shift": self.shift,
            "shifted_energy": str(self.shifted_energy),
            "shifted_product_size": self.shifted_product_size,
            "sumset_size": self.sumset_size,
            "checks": dict(self.checks),
            "details": list(self.details),
            "passed": self.passed,
        }


def verify_bounds(
    A: RationalSet,
    k: int,
    u=1,
    *,
    check_sumset: bool = True,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> VerifyReport:
    """Compute the shifted energy and product set and assert every bound
    applicable to the instance, in exact integer arithmetic."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    u_fr = _coerce_shift(u)
    n = len(A)
    K = sets.doubling(A, budget=budget, threads=threads).K_integer
    shifted = sets.shift(A, u_fr)
    e_shifted = energy_k(shifted, k, budget=budget, threads=threads)
    product = sets.k_fold_product(shifted, k, budget=budget, threads=threads)
    p_size = len(product)

    checks: dict[str, bool] = {}
    details: list[str] = []

    def record(name: str, ok: bool, dump: str) -> None:
        checks[name] = ok
        if not ok:
            details.append(dump)

    record(
        "cauchy_schwarz",
        e_shifted * p_size >= n ** (2 * k),
        f"E*|P| = {e_shifted}*{p_size} < {n}^{2 * k}",
    )
    if u_fr.is_one():
        denom = (8 * k**4) ** (k * K)
        record(
            "rational_energy_upper",
            e_shifted <= denom * n**k,
            f"E = {e_shifted} > (8k^4)^(kK)*|A|^k = {denom * n ** k}",
        )
        record(
            "rational_product_lower",
            p_size * denom >= n**k,
            f"|P| = {p_size} < |A|^k/(8k^4)^(kK)",
        )
    if _integer_regime_failure(A, u_fr) is None:
        denom = (2 * k * k) ** (k * K)
        record(
            "integer_energy_upper",
            e_shifted <= denom * n**k,
            f"E = {e_shifted} > (2k^2)^(kK)*|A|^k = {denom * n ** k}",
        )
        record(
            "integer_product_lower",
            p_size * denom >= n**k,
            f"|P| = {p_size} < |A|^k/(2k^2)^(kK)",
        )
    sum_size = None
    if check_sumset:
        sum_size = sets.k_fold_sumset(A, k, budget=budget, threads=threads).total_size
        denom = (2 * k * k - k) ** (k * K)
        record(
            "chang_sumset_lower",
            sum_size * denom >= n**k,
            f"|kA| = {sum_size} < |A|^k/(2k^2-k)^(kK)",
        )
    return VerifyReport(
        k=k,
        set_size=n,
        K_integer=K,
        shift=str(u_fr),
        shifted_energy=e_shifted,
        shifted_product_size=p_size,
        sumset_size=sum_size,
        checks=checks,
        details=details,
    )
