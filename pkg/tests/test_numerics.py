import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from etacong.numerics import (
    INFINITE_VALUATION,
    FracExponent,
    NotEllIntegralError,
    PrecisionError,
    ResidueValue,
    ell_valuation,
    factorial_valuation,
    legendre_symbol,
    mod_inverse,
    prime_factors,
    primes_up_to,
    psi,
)


def test_ell_valuation_examples():
    # 4335 = 3 * 5 * 17^2
    assert ell_valuation(Fraction(4335, 61), 17) == 2
    assert ell_valuation(1, 5) == 0
    assert ell_valuation(Fraction(25, 3), 5) == 2
    assert ell_valuation(Fraction(1, 25), 5) == -2


def test_ell_valuation_zero_sentinel():
    v = ell_valuation(0, 7)
    assert v == INFINITE_VALUATION
    assert v > 10 ** 100
    with pytest.raises(OverflowError):
        int(v)


def test_psi_examples():
    assert psi(5, -12) == 3
    # 367 = 3*122 + 1, so the least nonnegative residue is 1 (== 123 mod 122)
    assert psi(122, 367) == 1
    assert psi(122, 367) == 123 % 122
    # 57/123 reduces to 19/41 and 41 inverts to 3 mod 122
    assert psi(122, Fraction(57, 123)) == 57


def test_psi_rejects_non_invertible_denominator():
    with pytest.raises(ValueError, match="psi undefined"):
        psi(10, Fraction(1, 5))


def test_mod_inverse():
    inv = mod_inverse(61, 289)
    assert 61 * inv % 289 == 1
    assert inv == 199
    with pytest.raises(ValueError):
        mod_inverse(17, 289)


def test_primes_and_factorials():
    assert primes_up_to(12) == [2, 3, 5, 7, 11]
    assert primes_up_to(1) == []
    assert factorial_valuation(10, 5) == 2
    assert factorial_valuation(86697, 17) == 5099 + 299 + 17 + 1
    assert prime_factors(1729) == [7, 13, 19]


def test_is_prime_agrees_with_sieve():
    from etacong.numerics import is_prime

    sieve = set(primes_up_to(3000))
    assert all(is_prime(n) == (n in sieve) for n in range(3000))


def test_legendre_symbol():
    assert legendre_symbol(4, 5) == 1
    assert legendre_symbol(2, 5) == -1
    assert legendre_symbol(10, 5) == 0


def test_frac_exponent_normalization():
    a = FracExponent(57, 61)
    assert (a.a, a.b) == (57, 61)
    assert FracExponent(2, -4) == FracExponent(-1, 2)
    assert FracExponent.parse("-3/4").fraction == Fraction(-3, 4)
    assert str(FracExponent.parse("5")) == "5"
    assert FracExponent(57, 61).is_ell_integral(17)
    assert not FracExponent(57, 61).is_ell_integral(61)
    with pytest.raises(ZeroDivisionError):
        FracExponent(1, 0)


@given(st.integers(min_value=2, max_value=400),
       st.fractions(max_denominator=50))
def test_psi_reflection(m, x):
    if math.gcd(x.denominator, m) != 1:
        return
    total = psi(m, x) + psi(m, -x)
    assert total in (0, m)


@given(st.fractions(max_denominator=1000), st.sampled_from([2, 3, 5, 7, 13]))
def test_valuation_strips_to_unit(x, ell):
    if x == 0:
        return
    v = ell_valuation(x, ell)
    unit = x * Fraction(ell) ** (-v)
    assert ell_valuation(unit, ell) == 0


def test_residue_value_basics():
    r = ResidueValue.from_rational(Fraction(57, 61), 17, 2)
    assert r.value == 57 * mod_inverse(61, 289) % 289
    assert r.precision == 2
    assert r.residue(1) == r.value % 17
    with pytest.raises(PrecisionError):
        r.residue(3)
    with pytest.raises(NotEllIntegralError):
        ResidueValue.from_rational(Fraction(1, 17), 17, 2)


def test_residue_value_precision_rules():
    a = ResidueValue(6, 5, 4, 3)
    b = ResidueValue(7, 5, 4, 2)
    assert (a + b).precision == 2
    assert (a * b).precision == 2
    # multiplying by an exact multiple of ell gains a digit
    assert (a * 5).precision == 4
    assert (a * 10).precision == 4
    assert (a * 3).precision == 3
    # dividing by ell costs a digit of both precision and modulus
    c = ResidueValue(50, 5, 4, 3)
    d = c.divide_exact_by(5)
    assert (d.value, d.modulus_exp, d.precision) == (10, 3, 2)
    with pytest.raises(ValueError):
        ResidueValue(51, 5, 4, 3).divide_exact_by(5)


def test_residue_value_division_precision_floor():
    tight = ResidueValue(25, 5, 3, 1)
    with pytest.raises(PrecisionError, match="insufficient padding"):
        tight.divide_exact_by(25)


_OPS = st.lists(
    st.one_of(
        st.tuples(st.just("add"), st.integers(-50, 50), st.integers(1, 9)),
        st.tuples(st.just("mul"), st.integers(-50, 50), st.integers(1, 9)),
        st.tuples(st.just("mulint"), st.integers(-20, 20), st.just(1)),
        st.tuples(st.just("div"), st.integers(1, 30), st.just(1)),
    ),
    max_size=8,
)


@given(st.sampled_from([5, 7]), _OPS)
def test_residue_arithmetic_matches_rational_oracle(ell, ops):
    """Random op sequences agree with exact rationals mod ell^precision."""
    exp = 8
    exact = Fraction(3, 2) if ell != 2 else Fraction(3)
    value = ResidueValue.from_rational(exact, ell, exp)
    for op, num, den in ops:
        if den % ell == 0:
            continue
        other = Fraction(num, den)
        if op == "add":
            value = value + ResidueValue.from_rational(other, ell, exp)
            exact = exact + other
        elif op == "mul":
            value = value * ResidueValue.from_rational(other, ell, exp)
            exact = exact * other
        elif op == "mulint":
            value = value * num
            exact = exact * num
        elif op == "div":
            e = ell_valuation(num, ell)
            if ell_valuation(exact, ell) < e or e > value.precision - 1:
                continue
            value = value.divide_exact_by(num)
            exact = exact / num
        if value.precision > 0:
            assert value.congruent_to(exact, value.precision)
