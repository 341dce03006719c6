"""Valuation lattice, canonical form, sign patterns, and collision checks."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodlab.rationals import factor
from prodlab.sets import RationalSet, ggp, product_set
from prodlab.structure import (
    ValuationImage,
    affine_rank,
    canonical_affine_form,
    canonical_context,
    check_collision_claim,
    dimension_doubling_check,
    mult_dimension,
    sign_pattern_decompose,
    valuation_image,
)

from corpus import ggp_instances, small_sets


def ints(*values) -> RationalSet:
    return RationalSet.from_integers(values)


def fake_image(rows, basis=None):
    rows = tuple(tuple(r) for r in rows)
    basis = tuple(basis) if basis else tuple([2, 3, 5, 7, 11][: len(rows[0])])
    return ValuationImage(basis, rows, (1,) * len(rows), (factor(1),) * len(rows))


def test_valuation_image_examples():
    img = valuation_image(RationalSet([factor(12, 5)]))
    assert img.basis == (2, 3, 5)
    assert img.rows == ((2, 1, -1),)
    img2 = valuation_image(ints(2, 4, 8))
    assert img2.basis == (2,)
    assert set(img2.rows) == {(1,), (2,), (3,)}
    img3 = valuation_image(RationalSet([factor(-6), factor(6)]))
    assert img3.rows == ((1, 1), (1, 1))
    assert set(img3.signs) == {1, -1}


def test_product_image_is_sum_of_images():
    A = ints(2, 3, 12)
    image_of_product = set(valuation_image(product_set(A, A)).rows)
    rows = valuation_image(A).rows
    pairwise_sums = {
        tuple(u + v for u, v in zip(r1, r2)) for r1 in rows for r2 in rows
    }
    assert image_of_product == pairwise_sums


def test_mult_dimension_examples():
    assert mult_dimension(ints(2, 4, 8)) == 1
    assert mult_dimension(ggp([2, 3], [(0, 1), (0, 1)])) == 2
    assert mult_dimension(ints(2, 6, 18)) == 1
    assert mult_dimension(ints(7)) == 0


def test_dimension_invariance():
    rng = random.Random(21)
    for A in small_sets(8, seed=77):
        lam = factor(rng.randint(1, 30), rng.randint(1, 30))
        from prodlab.sets import dilate

        assert mult_dimension(dilate(A, lam)) == mult_dimension(A)
        assert mult_dimension(product_set(A, A)) == mult_dimension(A)


def test_affine_rank_translation_invariant():
    rows = [(1, 2, 3), (2, 4, 0), (0, 0, 1)]
    shifted = [tuple(v + 5 for v in r) for r in rows]
    assert affine_rank(rows) == affine_rank(shifted)


def test_canonical_form_examples():
    form = canonical_affine_form(fake_image([(1, 2), (2, 4), (3, 6)]))
    assert form.d == 1
    assert form.permutation == (0, 1)
    assert form.affine_maps == ((Fraction(0), Fraction(2)),)

    form0 = canonical_affine_form(fake_image([(5, 7), (5, 7)]))
    assert form0.d == 0
    assert form0.affine_maps == ((Fraction(5),), (Fraction(7),))

    form2 = canonical_affine_form(fake_image([(1, 0), (0, 1), (1, 1)]))
    assert form2.d == 2
    assert form2.affine_maps == ()


def test_canonical_form_needs_column_permutation():
    # first coordinate is constant, so the pivot must move
    form = canonical_affine_form(fake_image([(4, 1), (4, 2), (4, 5)]))
    assert form.d == 1
    assert form.permutation == (1, 0)
    assert form.affine_maps == ((Fraction(4), Fraction(0)),)


def test_canonical_form_reconstructs_on_corpus():
    for A, _ in ggp_instances(12, seed=88):
        form = canonical_affine_form(valuation_image(A))
        assert 0 <= form.d <= len(A.support)
        assert len(form.affine_maps) == len(A.support) - form.d


def test_canonical_form_json_schema():
    form = canonical_affine_form(fake_image([(1, 2), (2, 4)]))
    payload = form.to_json_dict()
    json.dumps(payload)
    assert payload["schema"] == "prodlab.affine_form/1"
    assert payload["maps"] == [["0", "2"]]


def test_sign_pattern_examples():
    dec = sign_pattern_decompose([(1, 0), (-1, 0), (1, 1)])
    assert dec.groups == {
        ((1,), (0,)): ((-1, 0),),
        ((0, 1), (1, 0)): ((1, 0),),
        ((0, 1), (1, 1)): ((1, 1),),
    }
    all_nonneg = sign_pattern_decompose([(0, 2), (3, 1)])
    assert list(all_nonneg.groups) == [((0, 1), (0, 2)), ((0, 1), (3, 1))]
    all_negative = sign_pattern_decompose([(-1, -2), (-3, -1)])
    assert list(all_negative.groups) == [((), ())]
    assert all_negative.groups[((), ())] == ((-1, -2), (-3, -1))


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(*[st.integers(min_value=-5, max_value=5)] * 3),
        min_size=0,
        max_size=20,
        unique=True,
    )
)
def test_sign_pattern_partition_property(vectors):
    dec = sign_pattern_decompose(vectors)
    collected = [v for vs in dec.groups.values() for v in vs]
    assert sorted(collected) == sorted(vectors)
    for (S, jS), vs in dec.groups.items():
        for v in vs:
            assert tuple(i for i, x in enumerate(v) if x >= 0) == S
            assert tuple(v[i] for i in S) == jS


def test_collision_claim_independent_elements():
    A = ints(2, 3, 5)
    rep = check_collision_claim(A, 2)
    assert rep.passed
    # shifted values 3, 4, 6 are multiplicatively dependent only trivially here
    assert rep.total_collisions >= len(A) ** 2


def test_collision_claim_negative_power_group():
    A = RationalSet.from_fractions([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
    rep = check_collision_claim(A, 2)
    assert len(rep.groups) == 1
    g = rep.groups[0]
    assert g.pattern == () and g.member_count == 3
    # 81 ordered quadruples reduce to 15 colliding ones, all consistent
    assert g.collisions == 15
    assert rep.total_violations == 0


def test_collision_claim_singleton_group():
    A = RationalSet.from_fractions([Fraction(1, 3)])
    rep = check_collision_claim(A, 2)
    assert [g.collisions for g in rep.groups] == [1]
    assert rep.passed


def test_collision_claim_specific_group_selection():
    A = RationalSet.from_fractions(
        [Fraction(2), Fraction(4), Fraction(1, 2), Fraction(1, 4)]
    )
    ctx_groups = check_collision_claim(A, 2).groups
    assert len(ctx_groups) == 2
    one = check_collision_claim(A, 2, group=((0,), (1,)))
    assert len(one.groups) == 1
    assert one.groups[0].member_count == 2


def test_collision_claim_rejects_negative_elements():
    A = RationalSet([factor(-2), factor(3)])
    with pytest.raises(ValueError):
        check_collision_claim(A, 2)


def test_collision_claim_on_mixed_ggp():
    G = ggp([2, 3], [(-2, 1), (-1, 1)])
    A = RationalSet(random.Random(13).sample(G.elements, 8))
    rep = check_collision_claim(A, 2)
    assert rep.passed
    assert rep.total_collisions >= sum(g.member_count**2 for g in rep.groups)


def test_dimension_doubling_check():
    # 16 powers of two: K_integer = 2, dimension 1, size over threshold
    A = ints(*[2**i for i in range(16)])
    rep = dimension_doubling_check(A)
    assert rep.K_integer == 2
    assert rep.threshold == 12
    assert rep.applicable and rep.passed is True
    small = dimension_doubling_check(ints(2, 3))
    assert not small.applicable and small.passed is None
    custom = dimension_doubling_check(ints(2, 3), threshold=1)
    assert custom.applicable
