"""Factored-rational arithmetic against exact fraction oracles."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodlab.errors import ZeroValueError
from prodlab.primes import factorize, first_primes, is_prime, primes_up_to
from prodlab.rationals import (
    FactoredRational,
    add_shift,
    coprime,
    factor,
    fraction_valuation,
    inv,
    mul,
    valuation,
)


def test_factor_examples():
    x = factor(12, 5)
    assert x.sign == 1
    assert x.exponents == {2: 2, 3: 1, 5: -1}
    assert factor(1, 1).exponents == {}
    assert factor(1, 1).sign == 1
    y = factor(-360, 98)
    assert y.sign == -1
    assert y.exponents == {2: 2, 3: 2, 5: 1, 7: -2}


def test_factor_rejects_zero_and_bad_denominator():
    with pytest.raises(ZeroValueError):
        factor(0)
    with pytest.raises(ValueError):
        factor(3, 0)
    with pytest.raises(ValueError):
        factor(3, -2)


def test_valuation_examples():
    x = factor(12, 5)
    assert valuation(x, 5) == -1
    assert valuation(x, 7) == 0
    assert valuation(factor(-360, 98), 7) == -2


def test_mul_and_inv_examples():
    assert mul(factor(2), factor(1, 2)) == FactoredRational.one()
    assert inv(factor(12, 5)).exponents == {2: -2, 3: -1, 5: 1}
    z = mul(factor(2, 3), factor(9, 4))
    assert z.to_fraction() == Fraction(3, 2)
    assert z.exponents == {2: -1, 3: 1}


def test_add_shift_examples():
    assert add_shift(factor(2), 1) == factor(3)
    with pytest.raises(ZeroValueError):
        add_shift(factor(-1), 1)
    assert add_shift(factor(2, 3), 1) == factor(5, 3)
    assert add_shift(factor(7), 0) == factor(7)
    assert add_shift(factor(2), factor(1, 2)) == factor(5, 2)


def test_coprime_examples():
    assert coprime(factor(12, 5), factor(7, 11))
    assert not coprime(factor(12, 5), factor(10))
    assert not coprime(factor(3, 4), factor(9))
    assert coprime(factor(1), factor(30))


def test_parse_and_format_round_trip():
    for text in ["2^2*3*5^-1", "-2^3*7^-2", "1", "-1", "11"]:
        x = FactoredRational.parse(text)
        assert str(x) == text
    assert FactoredRational.parse("12/5") == factor(12, 5)
    assert FactoredRational.parse("-360/98") == factor(-360, 98)
    assert FactoredRational.parse(" 6/4 ") == factor(3, 2)
    assert str(factor(12, 5)) == "2^2*3*5^-1"
    with pytest.raises(ValueError):
        FactoredRational.parse("4^2")  # composite base
    with pytest.raises(ValueError):
        FactoredRational.parse("")


def test_constructor_canonicalizes():
    x = FactoredRational(1, {2: 0, 3: 1})
    assert x.exponents == {3: 1}
    with pytest.raises(ValueError):
        FactoredRational(2, {})
    with pytest.raises(ValueError):
        FactoredRational(1, {4: 1})


def test_pow_and_neg():
    x = factor(-2, 3)
    assert (x**2).to_fraction() == Fraction(4, 9)
    assert (x**-1).to_fraction() == Fraction(-3, 2)
    assert (x**0) == FactoredRational.one()
    assert (-x).to_fraction() == Fraction(2, 3)
    assert abs(x).to_fraction() == Fraction(2, 3)


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(min_value=-(10**6), max_value=10**6).filter(lambda v: v != 0),
    d=st.integers(min_value=1, max_value=10**6),
)
def test_factor_round_trip(n, d):
    assert factor(n, d).to_fraction() == Fraction(n, d)


_small_rationals = st.builds(
    factor,
    st.integers(min_value=-300, max_value=300).filter(lambda v: v != 0),
    st.integers(min_value=1, max_value=300),
)


@settings(max_examples=150, deadline=None)
@given(x=_small_rationals, y=_small_rationals, z=_small_rationals)
def test_mul_algebra(x, y, z):
    assert mul(x, y) == mul(y, x)
    assert mul(mul(x, y), z) == mul(x, mul(y, z))
    assert inv(inv(x)) == x
    assert mul(x, inv(x)) == FactoredRational.one()


@settings(max_examples=150, deadline=None)
@given(x=_small_rationals, y=_small_rationals)
def test_valuation_additive_under_mul(x, y):
    product = mul(x, y)
    for p in sorted(set(x.support) | set(y.support)):
        assert valuation(product, p) == valuation(x, p) + valuation(y, p)


def test_add_shift_matches_fraction_oracle():
    rng = random.Random(7)
    for _ in range(1000):
        n = rng.randint(-500, 500) or 1
        d = rng.randint(1, 60)
        un = rng.randint(-20, 20)
        ud = rng.randint(1, 12)
        x = factor(n, d)
        u = Fraction(un, ud)
        expect = Fraction(n, d) + u
        if expect == 0:
            with pytest.raises(ZeroValueError):
                add_shift(x, u)
        else:
            assert add_shift(x, u).to_fraction() == expect


def test_hash_and_equality_are_structural():
    assert factor(6, 4) == factor(3, 2)
    assert hash(factor(6, 4)) == hash(factor(3, 2))
    assert factor(3, 2) != factor(-3, 2)
    assert len({factor(2), factor(4, 2), factor(2, 1)}) == 1


def test_fraction_valuation():
    assert fraction_valuation(Fraction(12, 5), 2) == 2
    assert fraction_valuation(Fraction(12, 5), 5) == -1
    assert fraction_valuation(Fraction(12, 5), 7) == 0


def test_primes_basics():
    assert first_primes(5) == [2, 3, 5, 7, 11]
    assert primes_up_to(30)[-1] == 29
    assert is_prime(2) and is_prime(97) and is_prime(2**31 - 1)
    assert not is_prime(1) and not is_prime(91)


def test_factorize_pollard_path_with_low_cap():
    # 10403 = 101 * 103; a trial cap below both forces the rho split.
    assert factorize(10403, trial_cap=10) == {101: 1, 103: 1}
    big = 1000003 * 1000033
    assert factorize(big, trial_cap=100) == {1000003: 1, 1000033: 1}
    assert factorize(1) == {}


def test_factorize_matches_reconstruction():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 10**9)
        exps = factorize(n)
        value = 1
        for p, e in exps.items():
            assert is_prime(p) and e > 0
            value *= p**e
        assert value == n
