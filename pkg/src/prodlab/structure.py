"""The valuation-lattice layer: exponent-vector images, multiplicative
dimension, the affine canonical form, sign-pattern decomposition, and the
collision-consistency checker for shifted products.

All linear algebra is exact over Fraction; no floats enter this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import sets
from .errors import DEFAULT_TUPLE_BUDGET, BudgetError
from .rationals import FactoredRational, add_shift
from .sets import RationalSet


@dataclass(frozen=True)
class ValuationImage:
    """Integer exponent vectors of a set's elements over its prime support.

    Row i reconstructs element i exactly up to sign; signs are carried
    alongside.  The element order is recorded and fixed.
    """

    basis: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]
    elements: tuple[FactoredRational, ...]


def valuation_image(A: RationalSet) -> ValuationImage:
    if not len(A):
        raise ValueError("valuation image of an empty set")
    basis = A.support
    rows = tuple(tuple(x.valuation(p) for p in basis) for x in A.elements)
    signs = tuple(x.sign for x in A.elements)
    return ValuationImage(basis, rows, signs, A.elements)


def _echelon_with_permutation(
    diffs: list[list[Fraction]], width: int
) -> tuple[int, list[list[Fraction]], list[int]]:
    """Gauss-Jordan with greedy column pivoting.

    Returns (d, reduced, perm): reduced has d rows in reduced echelon form
    whose first d columns (in perm order) are the identity.
    """
    perm = list(range(width))
    rows = [list(r) for r in diffs]
    d = 0
    for pos in range(width):
        pivot_row = pivot_pos = None
        for col_pos in range(d, width):
            for row_idx in range(d, len(rows)):
                if rows[row_idx][col_pos] != 0:
                    pivot_row, pivot_pos = row_idx, col_pos
                    break
            if pivot_row is not None:
                break
        if pivot_row is None:
            break
        if pivot_pos != d:
            perm[d], perm[pivot_pos] = perm[pivot_pos], perm[d]
            for r in rows:
                r[d], r[pivot_pos] = r[pivot_pos], r[d]
        if pivot_row != d:
            rows[d], rows[pivot_row] = rows[pivot_row], rows[d]
        inv = Fraction(1) / rows[d][d]
        rows[d] = [v * inv for v in rows[d]]
        for i, r in enumerate(rows):
            if i != d and r[d] != 0:
                f = r[d]
                rows[i] = [a - f * b for a, b in zip(r, rows[d])]
        d += 1
    return d, rows[:d], perm


def affine_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of the differences from the first row (0 for a point)."""
    rows = [tuple(r) for r in rows]
    if not rows:
        return 0
    base = rows[0]
    diffs = [
        [Fraction(v - b) for v, b in zip(r, base)] for r in rows[1:]
    ]
    if not diffs:
        return 0
    d, _, _ = _echelon_with_permutation(diffs, len(base))
    return d


def mult_dimension(A: RationalSet) -> int:
    """Least dimension of an affine lattice containing the exponent vectors."""
    return affine_rank(valuation_image(A).rows)


@dataclass(frozen=True)
class AffineCanonicalForm:
    """Coordinates split into d free positions plus affine maps for the rest.

    ``permutation[i]`` is the original column index placed at position i;
    ``affine_maps[j]`` holds (c0, c1, ..., cd) expressing permuted
    coordinate d+j as c0 + sum(ci * x_i) over the first d permuted
    coordinates.
    """

    basis: tuple[int, ...]
    permutation: tuple[int, ...]
    d: int
    affine_maps: tuple[tuple[Fraction, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.affine_form/1",
            "basis": list(self.basis),
            "permutation": list(self.permutation),
            "d": self.d,
            "maps": [[str(c) for c in m] for m in self.affine_maps],
        }


def canonical_affine_form(image: ValuationImage) -> AffineCanonicalForm:
    """Exact rational row reduction of difference vectors.

    The reconstruction and projection-injectivity checks run before the
    form is returned; a failure there is a bug, never bad input.
    """
    width = len(image.basis)
    rows = image.rows
    base = rows[0]
    diffs = [[Fraction(v - b) for v, b in zip(r, base)] for r in rows[1:]]
    d, reduced, perm = _echelon_with_permutation(diffs, width)
    maps = []
    for j in range(d, width):
        coeffs = [reduced[i][j] for i in range(d)]
        c0 = Fraction(base[perm[j]]) - sum(
            (c * base[perm[i]] for i, c in enumerate(coeffs)), Fraction(0)
        )
        maps.append((c0, *coeffs))
    form = AffineCanonicalForm(image.basis, tuple(perm), d, tuple(maps))

    distinct_rows = set(rows)
    projections = set()
    for r in rows:
        permuted = [r[perm[i]] for i in range(width)]
        head = tuple(permuted[:d])
        projections.add(head)
        for j, m in enumerate(form.affine_maps):
            value = m[0] + sum((m[1 + i] * head[i] for i in range(d)), Fraction(0))
            assert value == permuted[d + j], (
                f"canonical form failed to reconstruct coordinate {perm[d + j]} "
                f"of row {r}: got {value}, expected {permuted[d + j]}"
            )
    assert len(projections) == len(distinct_rows), (
        "projection to the free coordinates is not injective on the rows"
    )
    return form


@dataclass(frozen=True)
class SignPatternDecomposition:
    """Partition of integer vectors by which coordinates are >= 0.

    A vector lands in pattern S iff its entries at positions in S are
    nonnegative and all other entries are negative; within a pattern,
    vectors are grouped by their values on S.  Keys are (S, values_on_S)
    with S as a sorted tuple of 0-based positions.
    """

    dimension: int
    groups: dict[tuple[tuple[int, ...], tuple[int, ...]], tuple[tuple[int, ...], ...]]

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.sign_patterns/1",
            "dimension": self.dimension,
            "groups": [
                {
                    "pattern": list(S),
                    "fixed": list(jS),
                    "vectors": [list(v) for v in vecs],
                }
                for (S, jS), vecs in self.groups.items()
            ],
        }


def sign_pattern_decompose(vectors: Iterable[Sequence[int]]) -> SignPatternDecomposition:
    """Group vectors by nonnegative-coordinate pattern and fixed values there.

    Zero entries count as nonnegative.  Group order is deterministic:
    patterns by size then lexicographically, fixed parts lexicographically.
    """
    vecs = [tuple(int(x) for x in v) for v in vectors]
    if vecs:
        dimension = len(vecs[0])
        if any(len(v) != dimension for v in vecs):
            raise ValueError("all vectors must share one dimension")
    else:
        dimension = 0
    buckets: dict[tuple[tuple[int, ...], tuple[int, ...]], list[tuple[int, ...]]] = {}
    for v in vecs:
        S = tuple(i for i, x in enumerate(v) if x >= 0)
        jS = tuple(v[i] for i in S)
        buckets.setdefault((S, jS), []).append(v)
    ordered = {}
    for key in sorted(buckets, key=lambda k: (len(k[0]), k[0], k[1])):
        ordered[key] = tuple(buckets[key])
    return SignPatternDecomposition(dimension, ordered)


@dataclass(frozen=True)
class CanonicalContext:
    """A positive set presented as head-prime powers times coprime cofactors.

    Each element equals ``prod(head_primes[i] ** vector[i]) * cofactor``
    where the cofactor's valuations are affine in the vector; vectors are
    the free coordinates of the canonical form and are distinct per element.
    """

    base: RationalSet
    image: ValuationImage
    form: AffineCanonicalForm
    head_primes: tuple[int, ...]
    vectors: tuple[tuple[int, ...], ...]
    cofactors: tuple[FactoredRational, ...]
    decomposition: SignPatternDecomposition

    def group_members(self, key) -> tuple[int, ...]:
        """Element indices belonging to a sign-pattern group."""
        wanted = set(self.decomposition.groups[key])
        return tuple(i for i, v in enumerate(self.vectors) if v in wanted)


def canonical_context(A: RationalSet) -> CanonicalContext:
    if any(not a.is_positive() for a in A):
        raise ValueError(
            "canonical product form requires positive elements; "
            "negative signs break the cofactor-product consistency"
        )
    image = valuation_image(A)
    form = canonical_affine_form(image)
    head = tuple(image.basis[form.permutation[i]] for i in range(form.d))
    vectors = []
    cofactors = []
    for idx, row in enumerate(image.rows):
        vec = tuple(row[form.permutation[i]] for i in range(form.d))
        head_part = FactoredRational(
            1, {p: e for p, e in zip(head, vec) if e != 0}
        )
        cof = image.elements[idx] / head_part
        assert set(cof.support).isdisjoint(head), "cofactor shares a head prime"
        vectors.append(vec)
        cofactors.append(cof)
    assert len(set(vectors)) == len(vectors), "free coordinates must be injective"
    decomposition = sign_pattern_decompose(vectors)
    return CanonicalContext(
        A, image, form, head, tuple(vectors), tuple(cofactors), decomposition
    )


@dataclass
class CollisionGroupReport:
    pattern: tuple[int, ...]
    fixed: tuple[int, ...]
    member_count: int
    collisions: int
    violations: list[str] = field(default_factory=list)


@dataclass
class CollisionClaimReport:
    """Consistency report for product collisions of a shifted group.

    For every ordered 2k-tuple inside a sign-pattern group whose shifted
    products match, three equalities are verified: the sums of the
    negative-coordinate parts agree, the cofactor products agree, and the
    unshifted products agree.
    """

    k: int
    groups: list[CollisionGroupReport]

    @property
    def total_collisions(self) -> int:
        return sum(g.collisions for g in self.groups)

    @property
    def total_violations(self) -> int:
        return sum(len(g.violations) for g in self.groups)

    @property
    def passed(self) -> bool:
        return self.total_violations == 0

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.collision_claim/1",
            "k": self.k,
            "groups": [
                {
                    "pattern": list(g.pattern),
                    "fixed": list(g.fixed),
                    "members": g.member_count,
                    "collisions": g.collisions,
                    "violations": list(g.violations),
                }
                for g in self.groups
            ],
            "passed": self.passed,
        }


def _check_group_collisions(
    ctx: CanonicalContext,
    key,
    k: int,
    budget: int,
) -> CollisionGroupReport:
    S, jS = key
    members = ctx.group_members(key)
    if len(members) ** (2 * k) > budget:
        raise BudgetError(
            f"group of size {len(members)} needs {len(members) ** (2 * k)} "
            f"tuples at k={k}, over the budget of {budget}"
        )
    negatives = [i for i in range(ctx.decomposition.dimension) if i not in S]
    shifted = {i: add_shift(ctx.base.elements[i], 1) for i in members}

    # Hash-join over k-tuples: classes of equal shifted product cover
    # exactly the ordered 2k-tuple collisions.
    classes: dict[FactoredRational, list[tuple]] = {}
    for tup in itertools.product(members, repeat=k):
        prod = FactoredRational.one()
        for i in tup:
            prod = prod * shifted[i]
        classes.setdefault(prod, []).append(tup)

    collisions = 0
    violations: list[str] = []
    for prod, tuples in classes.items():
        collisions += len(tuples) ** 2
        features = set()
        for tup in tuples:
            neg_sum = tuple(
                sum(ctx.vectors[i][pos] for i in tup) for pos in negatives
            )
            cof = FactoredRational.one()
            base_prod = FactoredRational.one()
            for i in tup:
                cof = cof * ctx.cofactors[i]
                base_prod = base_prod * ctx.base.elements[i]
            features.add((neg_sum, cof, base_prod))
        if len(features) > 1:
            violations.append(
                f"shifted product {prod} reached with inconsistent "
                f"features {sorted(str(f) for f in features)}"
            )
    return CollisionGroupReport(S, jS, len(members), collisions, violations)


def check_collision_claim(
    A: RationalSet,
    k: int,
    *,
    group=None,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> CollisionClaimReport:
    """Verify collision consistency for one sign-pattern group or all of them."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    ctx = canonical_context(A)
    keys = [group] if group is not None else list(ctx.decomposition.groups)
    reports = [_check_group_collisions(ctx, key, k, budget) for key in keys]
    return CollisionClaimReport(k, reports)


@dataclass
class DimensionDoublingReport:
    """Dimension versus doubling check with an explicit size threshold.

    The set-size threshold under which the implication is not asserted is
    exposed as a parameter (default 2K(K+1), from the classical sumset
    lower bound (m+1)|A| - m(m+1)/2 for full-dimensional sets).
    """

    set_size: int
    K_integer: int
    dimension: int
    threshold: int
    applicable: bool
    passed: bool | None

    def to_json_dict(self) -> dict:
        return {
            "schema": "prodlab.dimension_check/1",
            "set_size": self.set_size,
            "K_integer": self.K_integer,
            "dimension": self.dimension,
            "threshold": self.threshold,
            "applicable": self.applicable,
            "passed": self.passed,
        }


def dimension_doubling_check(
    A: RationalSet,
    *,
    threshold: int | None = None,
    budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> DimensionDoublingReport:
    """Check dimension <= K_integer for sets large enough for it to be forced."""
    rep = sets.doubling(A, budget=budget, threads=threads)
    K = rep.K_integer
    dim = mult_dimension(A)
    thr = threshold if threshold is not None else 2 * K * (K + 1)
    applicable = len(A) >= thr
    passed = (dim <= K) if applicable else None
    return DimensionDoublingReport(len(A), K, dim, thr, applicable, passed)
