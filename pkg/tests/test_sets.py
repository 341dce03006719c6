"""Set combinatorics against naive tuple-expansion oracles."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from prodlab.errors import BudgetError, ZeroValueError
from prodlab.rationals import FactoredRational, factor
from prodlab.sets import (
    RationalSet,
    dilate,
    doubling,
    ggp,
    k_fold_product,
    k_fold_sumset,
    product_set,
    read_set_file,
    shift,
    sum_multiplicities,
    sumset,
    write_set_file,
)

from corpus import small_sets


def ints(*values) -> RationalSet:
    return RationalSet.from_integers(values)


def naive_k_fold_product(A: RationalSet, k: int) -> set[Fraction]:
    """Oracle: expand all k-tuples over exact fractions."""
    fracs = A.to_fractions()
    out = set()
    for tup in itertools.product(fracs, repeat=k):
        prod = Fraction(1)
        for f in tup:
            prod *= f
        out.add(prod)
    return out


def naive_k_fold_sums(A: RationalSet, k: int) -> list[Fraction]:
    fracs = A.to_fractions()
    return [sum(tup) for tup in itertools.product(fracs, repeat=k)]


def test_rational_set_basics():
    A = RationalSet([factor(4, 2), factor(2), factor(3), factor(12, 5)])
    assert len(A) == 3
    assert A.support == (2, 3, 5)
    assert [x.to_fraction() for x in A.elements] == sorted(x.to_fraction() for x in A)
    assert factor(2) in A and factor(7) not in A
    assert A == RationalSet.from_literals(["2", "3", "12/5"])


def test_product_set_examples():
    assert len(product_set(ints(2, 3, 4), ints(2, 3, 4))) == 6
    assert product_set(ints(1), ints(1)) == ints(1)
    aa = product_set(ints(2, 4, 8), ints(2, 4, 8))
    assert {x.to_fraction() for x in aa} == {4, 8, 16, 32, 64}


def test_k_fold_product_examples():
    A = ints(2, 3, 4)
    assert k_fold_product(A, 2) == product_set(A, A)
    assert k_fold_product(A, 1) == A
    B = ints(2, 3)
    cube = k_fold_product(B, 3)
    assert {x.to_fraction() for x in cube} == {8, 12, 18, 27}


def test_k_fold_product_matches_naive_oracle():
    rng = random.Random(5)
    candidates = [A for A in small_sets(30, max_size=8, seed=9) if len(A) <= 8]
    for A in candidates[:12]:
        for k in (1, 2, 3, 4):
            got = {x.to_fraction() for x in k_fold_product(A, k)}
            assert got == naive_k_fold_product(A, k)
    # explicit boundary case: 8 elements, k = 4
    A = RationalSet([factor(n) for n in rng.sample(range(2, 40), 8)])
    got = {x.to_fraction() for x in k_fold_product(A, 4)}
    assert got == naive_k_fold_product(A, 4)


def test_sumset_examples():
    res = k_fold_sumset(ints(2, 4, 8), 2)
    assert {x.to_fraction() for x in res.values} == {4, 6, 8, 10, 12, 16}
    assert res.zero_tuples == 0
    assert res.total_size == 6
    assert {x.to_fraction() for x in k_fold_sumset(ints(1), 3).values} == {3}
    res2 = sumset(ints(1, -1), ints(1, -1))
    assert {x.to_fraction() for x in res2.values} == {2, -2}
    assert res2.zero_tuples == 2
    assert res2.total_size == 3


def test_sum_multiplicities_match_naive():
    for A in small_sets(8, max_size=5, seed=33):
        for k in (1, 2, 3):
            table = sum_multiplicities(A, k)
            naive = naive_k_fold_sums(A, k)
            assert sum(table.values()) == len(A) ** k
            for value, count in table.items():
                assert naive.count(value) == count


def test_shift_and_dilate_examples():
    assert shift(ints(1, 2, 3), factor(1)) == ints(2, 3, 4)
    assert dilate(ints(2, 4, 8), factor(1, 2)) == ints(1, 2, 4)
    with pytest.raises(ZeroValueError) as exc:
        shift(RationalSet([factor(-1), factor(2)]), factor(1))
    assert "-1" in str(exc.value)


def test_doubling_examples():
    rep = doubling(ints(2, 4, 8))
    assert rep.product_set_size == 5
    assert rep.K_integer == 2
    assert rep.K_exact == Fraction(5, 3)
    assert doubling(ints(7)).K_integer == 1
    grid = ggp([2, 3], [(0, 2), (0, 2)])
    rep2 = doubling(grid)
    assert (rep2.set_size, rep2.product_set_size, rep2.K_integer) == (9, 25, 3)


def test_ggp_doubling_is_at_most_two_to_r():
    for primes, box in [
        ([2], [(-1, 1)]),
        ([2, 3], [(-2, 2), (-2, 2)]),
        ([2, 3, 5], [(0, 1), (-1, 1), (0, 2)]),
    ]:
        G = ggp(primes, box)
        GG = product_set(G, G)
        assert len(GG) <= 2 ** len(primes) * len(G)


def test_size_bounds_hold_on_corpus():
    for A in small_sets(10, seed=44):
        for k in (1, 2, 3):
            assert len(k_fold_product(A, k)) <= len(A) ** k
            assert k_fold_sumset(A, k).total_size <= len(A) ** k


def test_dilate_invariance_of_doubling():
    rng = random.Random(3)
    for A in small_sets(8, seed=55):
        lam = factor(rng.randint(1, 40), rng.randint(1, 40))
        assert doubling(dilate(A, lam)).K_integer == doubling(A).K_integer
        assert len(product_set(dilate(A, lam), dilate(A, lam))) == len(product_set(A, A))


def test_budget_errors():
    A = ints(*range(2, 30))
    with pytest.raises(BudgetError):
        k_fold_product(A, 6, budget=10**4)
    with pytest.raises(BudgetError):
        k_fold_sumset(A, 6, budget=10**4)
    with pytest.raises(BudgetError):
        ggp([2, 3, 5], [(-9, 9)] * 3, budget=100)


def test_ggp_validation():
    with pytest.raises(ValueError):
        ggp([4], [(0, 1)])
    with pytest.raises(ValueError):
        ggp([2, 2], [(0, 1), (0, 1)])
    with pytest.raises(ValueError):
        ggp([2], [(1, 0)])
    with pytest.raises(ValueError):
        ggp([2], [(0, 1), (0, 1)])


def test_set_file_round_trip(tmp_path):
    A = RationalSet.from_literals(["2^2*3", "-7/2", "1", "5^-1"])
    path = tmp_path / "set.txt"
    write_set_file(path, A, header="example set")
    text = path.read_text()
    assert text.startswith("# example set\n")
    B = read_set_file(path)
    assert A == B
    # comments and blank lines are ignored
    path2 = tmp_path / "messy.txt"
    path2.write_text("# comment\n\n 2 \n3 # trailing\n")
    assert read_set_file(path2) == ints(2, 3)


def test_threads_do_not_change_results():
    for A in small_sets(6, seed=66):
        assert k_fold_product(A, 2, threads=1) == k_fold_product(A, 2, threads=8)
        t1 = sum_multiplicities(A, 2, threads=1)
        t8 = sum_multiplicities(A, 2, threads=8)
        assert t1 == t8
