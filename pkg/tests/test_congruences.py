from fractions import Fraction

import pytest

from etacong.numerics import NotEllIntegralError, psi
from etacong.congruences import (
    BALANCED,
    SQUARE_CLASS,
    CongruenceClaim,
    balanced_prime_admissible,
    good_prime_bound,
    integral_prime_bound,
    offset_admissible,
    progression_identity_check,
    scan_balanced,
    search_good_congruences,
    square_class_families,
    square_class_nonvacuous,
    verify_claim,
)


def test_good_prime_bound():
    assert good_prime_bound(Fraction(57, 61)) == 1529
    assert good_prime_bound(2) is None
    assert good_prime_bound(-1) == 27
    assert good_prime_bound(28) == 42  # even but outside [-14, 26]: bounded


def test_search_requires_cap_when_unbounded():
    with pytest.raises(ValueError, match="ell_max"):
        search_good_congruences(2)


def test_search_degenerate_integral_alpha():
    result = search_good_congruences(24, ell_max=30)
    reasons = {(r.ell, r.k): r.reason for r in result.rejections}
    for ell in (5, 7, 11, 13, 17, 19, 23, 29):
        assert reasons[(ell, 1)] == "r undefined (24k = alpha)"
    assert not result.certificates


def test_search_57_61_certificates(search_57_61):
    found = {(c.ell, c.k, c.r, c.m) for c in search_57_61.certificates}
    assert (17, 3, 2, 4) in found
    assert {c.ell for c in search_57_61.certificates} == \
        {7, 11, 17, 79, 103, 431, 797}
    for cert in search_57_61.certificates:
        assert 1 <= cert.k < cert.ell
        assert cert.gram_det_residue != 0
    for rej in search_57_61.rejections:
        assert 1 <= rej.k < rej.ell


def test_search_57_61_claims_shape(search_57_61):
    headline = [c for c in search_57_61.claims if c.ell == 17 and c.v == 2]
    assert len(headline) == 1
    claim = headline[0]
    assert claim.offset == 286 and claim.raw_offset == -3
    assert dict(claim.provenance)["canonical"] is True
    weaker = [c for c in search_57_61.claims if c.ell == 17 and c.v == 1]
    assert weaker[0].offset == 14
    assert dict(weaker[0].provenance)["canonical"] is False


def test_search_soundness_at_200(search_57_61):
    for claim in search_57_61.claims:
        report = verify_claim(claim, 200)
        assert report.verified, claim.describe()


def test_search_monotonicity_headline(search_57_61):
    # the v-1 companion of every multi-exponent claim verifies as well
    tops = [c for c in search_57_61.claims
            if c.v > 1 and dict(c.provenance)["canonical"]]
    assert tops
    for claim in tops:
        lowered = CongruenceClaim(
            variant=BALANCED, alpha=claim.alpha, ell=claim.ell, v=claim.v - 1,
            offset=claim.offset % claim.ell ** (claim.v - 1))
        assert verify_claim(lowered, 200).verified


def test_search_respects_residue_filter(search_57_61):
    for claim in search_57_61.claims:
        assert balanced_prime_admissible(Fraction(57, 61), claim.ell)


def test_weight_cap_env_override(monkeypatch):
    monkeypatch.setenv("ETACONG_MAX_WEIGHT", "100")
    result = search_good_congruences(Fraction(57, 61), ell_max=110)
    # (103, 26) sits at weight 312 > 100: an error entry, not a certificate
    reasons = {(r.ell, r.k): r.reason for r in result.rejections}
    assert "exceeds the cap" in reasons[(103, 26)]
    assert all(c.weight <= 100 for c in result.certificates)
    assert {c.ell for c in result.certificates} == {7, 11, 17, 79}


def test_offset_admissible():
    assert offset_admissible(-1, 5, 4)
    assert [offset_admissible(-1, 5, c) for c in range(4)] == [False] * 4
    assert offset_admissible(Fraction(57, 61), 17, 286 % 17)
    with pytest.raises(NotEllIntegralError):
        offset_admissible(Fraction(1, 5), 5, 0)


def test_integral_prime_bound_cases():
    assert (integral_prime_bound(-2).bound,
            integral_prime_bound(-2).applicable) == (6, True)
    assert (integral_prime_bound(5).bound,
            integral_prime_bound(5).applicable) == (9, True)
    assert integral_prime_bound(2).applicable is False
    assert integral_prime_bound(-3).applicable is False
    assert integral_prime_bound(3).applicable is False
    with pytest.raises(ValueError):
        integral_prime_bound(Fraction(1, 2))


def test_balanced_prime_admissible_details():
    res = balanced_prime_admissible(Fraction(57, 61), 367)
    assert not res
    assert res.r == 367 % 122 == 1
    assert res.psi_value == 57
    # the same witness written through the congruent representative 123
    assert psi(122, Fraction(57, 123)) == 57
    silent = balanced_prime_admissible(Fraction(57, 61), 17)
    assert silent and silent.silent
    with pytest.raises(ValueError):
        balanced_prime_admissible(Fraction(2), 11)


def test_balanced_prime_admissible_never_blocks_partition_function():
    # alpha = -1 is odd and small, so no prime bound is asserted for it; the
    # least-residue filter agrees by staying consistent at every prime
    for ell in (7, 11, 13, 101, 367):
        assert balanced_prime_admissible(-1, ell)


def test_square_class_families_euler():
    claims = square_class_families(26, 5)
    assert len(claims) == 1
    claim = claims[0]
    assert (claim.stride, claim.shift, claim.v) == (24, 1, 2)
    assert verify_claim(claim, 300).verified
    assert square_class_nonvacuous(claim, 200)


def test_square_class_families_jacobi():
    claims = square_class_families(8, 5)
    assert [(c.stride, c.shift, c.v) for c in claims] == [(8, 1, 1)]
    assert verify_claim(claims[0], 300).verified
    assert square_class_nonvacuous(claims[0], 200)


def test_square_class_families_empty():
    # alpha == 2 mod 5 hits neither valuation
    assert square_class_families(22, 5) == []
    with pytest.raises(ValueError, match="identity unavailable"):
        square_class_families(26, 3)
    with pytest.raises(NotEllIntegralError):
        square_class_families(Fraction(1, 5), 5)


def test_verify_claim_counterexample():
    claim = CongruenceClaim(variant=BALANCED, alpha="-1", ell=5, v=1, offset=1)
    report = verify_claim(claim, 10)
    assert report.outcome == "counterexample"
    assert report.counterexample == (0, 1, 1)  # p(1) = 1


def test_verify_claim_ramanujan():
    for ell, offset in ((5, 4), (7, 5), (11, 6)):
        claim = CongruenceClaim(variant=BALANCED, alpha="-1", ell=ell, v=1,
                                offset=offset)
        assert verify_claim(claim, 1000).verified


def test_scan_balanced_ramanujan():
    hits = scan_balanced(-1, 5, 1, 500)
    assert [c.offset for c in hits] == [4]
    assert hits[0].offset_admissible
    assert hits[0].label == "empirical (500-tested)"
    assert scan_balanced(-1, 13, 1, 500) == []


def test_scan_candidates_satisfy_offset_filter():
    for ell in (5, 7, 11, 13):
        for cand in scan_balanced(-1, ell, 1, 300):
            assert offset_admissible(-1, ell, cand.offset % ell)


def test_scan_balanced_headline():
    offsets = [c.offset for c in scan_balanced(Fraction(57, 61), 17, 2, 400)]
    assert 286 in offsets


def test_progression_identity():
    assert progression_identity_check(Fraction(57, 61), 17, 3, 2, 1, 150)
    assert progression_identity_check(Fraction(57, 61), 17, 3, 2, 2, 100)
    with pytest.raises(ValueError):
        progression_identity_check(Fraction(57, 61), 17, 3, 2, 3, 50)
    with pytest.raises(ValueError, match="ord_ell"):
        progression_identity_check(Fraction(57, 61), 17, 3, 1, 1, 50)


def test_claim_validation():
    with pytest.raises(ValueError):
        CongruenceClaim(variant=BALANCED, alpha="-1", ell=5, v=1, offset=7)
    with pytest.raises(ValueError):
        CongruenceClaim(variant=SQUARE_CLASS, alpha="8", ell=5, v=1,
                        stride=12, shift=1)
    with pytest.raises(ValueError):
        CongruenceClaim(variant="other", alpha="-1", ell=5, v=1, offset=0)
