from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from etacong.numerics import NotEllIntegralError
from etacong.qseries import (
    QSeries,
    coefficient_denominator,
    divisor_sum_table,
    eta_power_mod,
    eta_power_rational,
    eta_power_residues,
    extract_progression,
    frobenius_congruence_check,
    frobenius_substitute,
    partition_numbers,
    reduce_series,
    series_inverse,
    series_mul,
    series_pow,
)


def partition_oracle(n_max):
    """Independent partition counts: coin-change dynamic programming."""
    table = [1] + [0] * n_max
    for part in range(1, n_max + 1):
        for n in range(part, n_max + 1):
            table[n] += table[n - part]
    return table


def pentagonal_set(n_max):
    out = {0}
    j = 1
    while j * (3 * j - 1) // 2 <= n_max:
        out.add(j * (3 * j - 1) // 2)
        if j * (3 * j + 1) // 2 <= n_max:
            out.add(j * (3 * j + 1) // 2)
        j += 1
    return out


def test_divisor_sum_table():
    sig = divisor_sum_table(1, 12)
    assert sig[6] == 1 + 2 + 3 + 6
    for p in (2, 3, 5, 7, 11):
        assert sig[p] == 1 + p
    sig3 = divisor_sum_table(3, 4)
    assert sig3[4] == 1 + 8 + 64


def test_eta_power_rational_is_partition_function():
    series = eta_power_rational(-1, 60)
    assert list(series.coeffs) == partition_oracle(60)
    assert series.coeffs[:6] == [1, 1, 2, 3, 5, 7]


def test_partition_numbers_helper_agrees_with_dp():
    assert partition_numbers(200) == partition_oracle(200)


def test_eta_power_rational_leading_terms():
    for alpha in (Fraction(1, 2), Fraction(-3, 4), Fraction(57, 61), Fraction(5)):
        series = eta_power_rational(alpha, 8)
        assert series[0] == 1
        assert series[1] == -alpha


def test_eta_power_rational_hand_value():
    # 2 c2 = -(1/2) (sigma1(1) c1 + sigma1(2) c0) with c1 = -1/2
    assert eta_power_rational(Fraction(1, 2), 2)[2] == Fraction(-5, 8)


def test_pentagonal_support():
    series = eta_power_rational(1, 100)
    support = {n for n, c in enumerate(series.coeffs) if c}
    assert support == pentagonal_set(100)
    assert all(series[n] in (1, -1) for n in support)


def test_coefficient_denominator_examples():
    assert coefficient_denominator(Fraction(1, 2), 2) == 8
    assert coefficient_denominator(Fraction(7, 1), 30) == 1
    assert coefficient_denominator(Fraction(57, 61), 3) == 61 ** 3


@pytest.mark.parametrize("alpha", [Fraction(1, 2), Fraction(-3, 4),
                                   Fraction(5, 6), Fraction(57, 61)])
def test_denominator_formula(alpha):
    series = eta_power_rational(alpha, 60)
    for n in range(61):
        assert series[n].denominator == coefficient_denominator(alpha, n)


def test_series_mul_identity_and_inverse():
    f = eta_power_rational(Fraction(-3, 4), 30)
    one = QSeries([1], 30)
    assert series_mul(f, one) == f
    g = eta_power_rational(Fraction(3, 4), 30)
    assert series_mul(f, g) == one
    assert series_inverse(f) == g


def test_series_pow_routes_negative_through_inverse():
    f = eta_power_rational(1, 20)
    assert series_pow(f, -1) == eta_power_rational(-1, 20)
    assert series_pow(f, 24) == eta_power_rational(24, 20)


def test_series_inverse_requires_unit():
    with pytest.raises(ValueError, match="not invertible"):
        series_inverse(QSeries([0, 1], 5))


@settings(max_examples=25, deadline=None)
@given(st.fractions(max_denominator=6), st.fractions(max_denominator=6))
def test_eta_power_homomorphism(alpha, beta):
    t = 25
    lhs = eta_power_rational(alpha + beta, t)
    rhs = series_mul(eta_power_rational(alpha, t), eta_power_rational(beta, t))
    assert [Fraction(c) for c in lhs.coeffs] == [Fraction(c) for c in rhs.coeffs]


def test_eta_power_homomorphism_fixed_grid():
    t = 100
    for alpha, beta in ((Fraction(1, 2), Fraction(-3, 4)),
                        (Fraction(57, 61), Fraction(-1)),
                        (Fraction(5, 6), Fraction(1, 6))):
        lhs = eta_power_rational(alpha + beta, t)
        rhs = series_mul(eta_power_rational(alpha, t),
                         eta_power_rational(beta, t))
        assert [Fraction(c) for c in lhs.coeffs] == [Fraction(c) for c in rhs.coeffs]


def test_frobenius_substitute():
    f = QSeries([1, -1, 0], 2)
    assert frobenius_substitute(f, 2).coeffs == [1, 0, -1]
    assert frobenius_substitute(f, 1) == f
    g = eta_power_rational(Fraction(1, 2), 20)
    # extracting the dilation recovers g up to the shrunken truncation
    section = extract_progression(frobenius_substitute(g, 3), 3, 0)
    assert section.coeffs == g.coeffs[: section.truncation + 1]


def test_extract_progression():
    f = eta_power_rational(-1, 54)
    assert extract_progression(f, 1, 0) == f
    assert extract_progression(f, 5, 4)[0] == 5  # p(4)
    assert extract_progression(f, 5, 4).truncation == 10
    with pytest.raises(ValueError):
        extract_progression(f, 5, 5)


def test_eta_power_mod_headline_coefficient():
    series = eta_power_mod(Fraction(57, 61), 17, 2, 300)
    assert series[286].residue(2) == 0
    assert series[286].precision >= 2


def test_eta_power_mod_ramanujan_progression():
    series = eta_power_mod(-1, 5, 1, 100)
    for n in range(4, 101, 5):
        assert series[n].residue(1) == 0


@pytest.mark.parametrize("alpha", [Fraction(1, 2), Fraction(-3, 4),
                                   Fraction(57, 61)])
@pytest.mark.parametrize("ell", [5, 7, 17])
@pytest.mark.parametrize("r", [1, 2])
def test_eta_power_mod_matches_rational_oracle(alpha, ell, r):
    t = 150
    exact = reduce_series(eta_power_rational(alpha, t), ell, r)
    for method in ("descent", "ledger"):
        series = eta_power_mod(alpha, ell, r, t, method=method)
        assert [c.residue(r) for c in series.coeffs] == exact
        assert all(c.precision >= r for c in series.coeffs)


def test_eta_power_mod_rejects_bad_prime():
    with pytest.raises(NotEllIntegralError, match="not 61-integral"):
        eta_power_mod(Fraction(57, 61), 61, 1, 10)
    with pytest.raises(NotEllIntegralError):
        eta_power_residues(Fraction(57, 61), 61, 1, 10)


def test_eta_power_residues_matches_object_route():
    vals = eta_power_residues(Fraction(-3, 4), 7, 2, 80)
    series = eta_power_mod(Fraction(-3, 4), 7, 2, 80)
    assert [int(v) for v in vals] == [c.residue(2) for c in series.coeffs]


@pytest.mark.parametrize("alpha,ell,r", [
    (Fraction(1, 2), 5, 1),
    (Fraction(57, 61), 17, 2),
    (Fraction(3), 7, 2),
])
def test_frobenius_congruence(alpha, ell, r):
    assert frobenius_congruence_check(alpha, ell, r, 200)


def test_frobenius_congruence_ledger_route_agrees():
    assert frobenius_congruence_check(Fraction(1, 2), 5, 1, 60, method="ledger")


def test_residue_series_multiplication_tracks_precision():
    f = eta_power_mod(Fraction(1, 2), 5, 2, 20)
    g = eta_power_mod(Fraction(-1, 2), 5, 2, 20)
    prod = f * g
    assert prod[0].residue(2) == 1
    for n in range(1, 21):
        assert prod[n].residue(2) == 0


def test_mixed_domain_multiplication_rejected():
    f = eta_power_rational(1, 5)
    g = eta_power_mod(1, 5, 1, 5)
    with pytest.raises(ValueError, match="mixed"):
        f * g
