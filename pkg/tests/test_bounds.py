import math
from fractions import Fraction

import pytest

from subsetsieve.algebra import DomainSpec, GroupSpec, PolySpec, Zn, build_field
from subsetsieve.bounds import (
    ConstantChoice,
    applicability_abelian,
    applicability_fq,
    applicability_zn,
    bound_abelian,
    bound_fq,
    bound_zn,
    check_hua,
    check_weil,
    default_constant_zn,
    hua_constant,
    hua_sum_bound,
    verify_theorem,
)
from subsetsieve.counting import CountQuery
from subsetsieve.numtheory import binomial_real, delta, falling_factorial


def test_hua_constants():
    assert hua_constant(1, ConstantChoice.HUA_E185D) >= math.exp(1.85)
    assert hua_constant(2, ConstantChoice.HUA_E185D) >= math.exp(3.70)
    assert hua_constant(3, ConstantChoice.DINGQI_E174D) >= math.exp(1.74 * 3)
    assert hua_constant(5, ConstantChoice.COCHRANE_ZHENG_441) >= 4.41
    with pytest.raises(ValueError):
        hua_constant(2, ConstantChoice.DINGQI_E174D)


def test_default_constant():
    assert default_constant_zn(8, 1) == ConstantChoice.COCHRANE_ZHENG_441
    assert default_constant_zn(6, 1) == ConstantChoice.HUA_E185D
    assert default_constant_zn(6, 3) == ConstantChoice.DINGQI_E174D


def test_constant_consistency_enforced():
    with pytest.raises(ValueError):
        bound_zn(6, 0, 1, 1, ConstantChoice.COCHRANE_ZHENG_441)  # 6 not a prime power
    with pytest.raises(ValueError):
        applicability_zn(9, 0, 2, ConstantChoice.DINGQI_E174D)  # d < 3


def test_bound_zn_k0():
    assert bound_zn(12, 0, 0, 1, ConstantChoice.HUA_E185D).value == 1.0
    assert bound_zn(8, 1, 0, 2, ConstantChoice.COCHRANE_ZHENG_441).value == 1.0


def test_bound_zn_overestimates_exact_formula():
    # round-up value dominates a nearest-rounding evaluation of the same formula
    for n, c, k, d in [(12, 1, 3, 1), (9, 0, 2, 2), (30, 2, 5, 1), (49, 1, 4, 3)]:
        const = default_constant_zn(n, d)
        cd = hua_constant(d, const)
        p = min(p for p, _ in __import__("subsetsieve.numtheory", fromlist=["factorize"]).factorize(n))
        dl = float(delta(n))
        arg = dl * (n - c) + (1 - dl) * (cd * n * p ** (-1 / d) + c) + k - 1
        naive = falling_factorial(arg, k) / math.factorial(k)
        assert bound_zn(n, c, k, d, const).value >= naive * (1 - 1e-12)


def test_applicability_zn():
    ok, reason = applicability_zn(997, 0, 1, ConstantChoice.COCHRANE_ZHENG_441)
    assert ok and reason == ""
    ok, reason = applicability_zn(12, 0, 1, ConstantChoice.HUA_E185D)
    assert not ok and "below" in reason
    ok, reason = applicability_zn(997, 0, 1, ConstantChoice.COCHRANE_ZHENG_441, content=7)
    assert not ok and "content" in reason
    # d = 1 with the e^{1.85} constant: need n - c >= e^{1.85} n / p + c
    for n in (101, 499):
        ok, _ = applicability_zn(n, 2, 1, ConstantChoice.HUA_E185D)
        assert ok == (n - 2 >= math.exp(1.85) * n / n + 2)


def test_bound_fq_example():
    rb = bound_fq(7, 7, 1, 2, 2)
    assert abs(rb.value - 9.919) < 1e-2 and rb.rounding == "up"
    assert bound_fq(9, 3, 0, 0, 2).value == 1.0


def test_bound_fq_prime_field_collapse():
    # for q = p the argument is at most (d-1) sqrt(p) + c + k
    for p in (5, 7, 11, 13):
        for c in (0, 1, 2):
            for d in (2, 3):
                for k in (1, 3, 5):
                    outer = binomial_real((d - 1) * math.sqrt(p) + c + k, k).value
                    assert bound_fq(p, p, c, k, d).value <= outer * (1 + 1e-9)


def test_applicability_fq():
    ok, _ = applicability_fq(16, 2, 1, 3)
    assert ok
    ok, reason = applicability_fq(16, 2, 0, 2)
    assert not ok and "divisible" in reason
    ok, reason = applicability_fq(9, 3, 4, 2)
    assert not ok and "below" in reason


def test_bound_abelian():
    # p-elementary groups: delta(p) = 1/p
    for p, r in [(2, 3), (3, 2), (5, 1)]:
        order = p**r
        for c in (0, 1):
            for k in (0, 1, 2, 4):
                got = bound_abelian(order, c, p, k)
                want = binomial_real(Fraction(c) + Fraction(order - 2 * c, p) + k - 1, k)
                assert got.value == want.value
    assert bound_abelian(12, 0, 12, 3).value == binomial_real(12 * delta(12) + 2, 3).value
    ok, _ = applicability_abelian(10, 5)
    assert ok
    ok, reason = applicability_abelian(10, 6)
    assert not ok and "smaller" in reason


def test_bounds_monotone_in_k():
    # nondecreasing in k while the binomial argument stays above k
    prev = 0.0
    for k in range(0, 12):
        v = bound_abelian(24, 2, 12, k).value
        assert v >= prev * (1 - 1e-12)
        prev = v
    prev = 0.0
    for k in range(0, 10):
        v = bound_fq(13, 13, 1, k, 2).value
        assert v >= prev * (1 - 1e-12)
        prev = v


def test_verify_theorem_z4_example():
    z4 = Zn(4)
    rep = verify_theorem(CountQuery(z4, DomainSpec.full(z4), None, 2, 0), "abelian")
    assert rep.deviation == Fraction(1, 2)
    assert rep.main_term == Fraction(6, 4)
    assert rep.applicable and rep.holds


def test_verify_theorem_inapplicable_reports_reason():
    z12 = Zn(12)
    rep = verify_theorem(CountQuery(z12, DomainSpec.full(z12), None, 2, 0), "zn")
    assert not rep.applicable and rep.holds is None and rep.reason


def test_verify_theorem_applicable_instances_hold():
    for moduli in [(5,), (2, 4), (3, 3), (12,)]:
        g = GroupSpec(moduli)
        dom = DomainSpec.complement(g, [g.element(1)])
        for k in range(dom.m + 1):
            for b in range(g.order):
                rep = verify_theorem(CountQuery(g, dom, None, k, g.element(b)), "abelian")
                assert rep.applicable and rep.holds, (moduli, k, b)


def test_verify_theorem_structure_mismatch():
    z5 = Zn(5)
    with pytest.raises(ValueError):
        verify_theorem(CountQuery(z5, DomainSpec.full(z5), None, 1, 0), "fq")


def test_check_weil_gauss_tightness():
    for p in (3, 5, 7, 11, 13):
        fp = build_field(p, 1)
        rep = check_weil(DomainSpec.full(fp), PolySpec(fp, ((0,), (0,), (1,))))
        assert rep.applicable and rep.holds
        assert abs(rep.max_abs - math.sqrt(p)) < 1e-9
        assert rep.max_ratio is not None and rep.max_ratio <= 1 + 1e-9


def test_check_weil_linear_is_orthogonality():
    f8 = build_field(2, 3)
    rep = check_weil(DomainSpec.full(f8), PolySpec.identity(f8))
    assert rep.applicable and rep.max_abs < 1e-9 and rep.holds


def test_check_weil_cubic_f7():
    f7 = build_field(7, 1)
    rep = check_weil(DomainSpec.full(f7), PolySpec(f7, ((0,), (0,), (0,), (1,))))
    assert rep.holds and rep.max_abs <= 2 * math.sqrt(7) + 1e-9


def test_check_weil_degree_divisible_by_p():
    f4 = build_field(2, 2)
    rep = check_weil(DomainSpec.full(f4), PolySpec(f4, ((0, 0), (0, 0), (1, 0))))
    assert not rep.applicable and rep.holds is None


def test_check_hua_examples():
    z9 = Zn(9)
    rep = check_hua(z9, PolySpec(z9, (0, 1, 0, 1)))  # x^3 + x
    assert rep.applicable and rep.holds and rep.cz_holds and rep.reduction_holds
    assert rep.bound >= math.exp(1.85 * 3) * 9 ** (2 / 3) * (1 - 1e-12)
    # d = 1: primitive sums vanish
    rep = check_hua(Zn(12), PolySpec.identity(Zn(12)))
    assert rep.max_abs < 1e-9 and rep.holds and rep.cz_bound is None


def test_check_hua_content_gate():
    z6 = Zn(6)
    rep = check_hua(z6, PolySpec(z6, (1, 2)))  # gcd(2, 6) = 2
    assert not rep.applicable and "content" in rep.reason


def test_hua_sum_bound_values():
    assert hua_sum_bound(9, 3, ConstantChoice.COCHRANE_ZHENG_441) >= 4.41 * 9 ** (2 / 3)
    assert hua_sum_bound(10, 2, ConstantChoice.HUA_E185D) >= math.exp(3.7) * math.sqrt(10)
