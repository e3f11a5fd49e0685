import math

import numpy as np
import pytest

from subsetsieve.algebra import (
    Character,
    DomainSpec,
    Fq,
    GroupSpec,
    PolySpec,
    Zn,
    add_table,
    build_field,
    char_eval,
    char_matrix,
    char_order,
    eval_poly,
    mul_table,
    partial_char_sum,
    poly_values,
    power_table,
    principal_character,
    ramanujan_sum_exact_order,
    scalar_table,
    trace,
)
from subsetsieve.sweeps import abelian_groups_upto


# --- field construction ---


def test_build_field_prime():
    f2 = build_field(2, 1)
    assert f2.q == 2 and f2.modulus == (0, 1)


def test_build_field_f4_unique_quadratic():
    f4 = build_field(2, 2)
    assert f4.modulus == (1, 1, 1)  # x^2 + x + 1, the only monic irreducible


def test_build_field_custom_modulus():
    f9 = build_field(3, 2, (1, 0, 1))  # x^2 + 1, irreducible since -1 is a nonresidue mod 3
    assert f9.q == 9
    with pytest.raises(ValueError):
        build_field(3, 2, (0, 0, 1))  # x^2 is reducible
    with pytest.raises(ValueError):
        build_field(4, 1)  # 4 is not prime
    with pytest.raises(ValueError):
        build_field(2, 2, (1, 1))  # wrong degree


@pytest.mark.parametrize("p,t", [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6),
                                 (3, 1), (3, 2), (3, 3), (5, 1), (5, 2),
                                 (7, 1), (7, 2), (11, 1), (13, 1)])
def test_field_axioms(p, t):
    # inverses total; associativity/distributivity sampled (q <= 64)
    f = build_field(p, t)
    q = f.q
    mul = mul_table(f)
    add = add_table(f)
    one = f.index_of(f.one())
    for x in range(1, q):
        assert one in mul[x], f"{x} has no inverse"
    rng = np.random.default_rng(q)
    for _ in range(200):
        a, b, c = rng.integers(0, q, size=3)
        assert mul[mul[a, b], c] == mul[a, mul[b, c]]
        assert add[add[a, b], c] == add[a, add[b, c]]
        assert mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]
        assert mul[a, b] == mul[b, a]


def test_frobenius_is_additive_sanity():
    f8 = build_field(2, 3)
    for x in f8.elements():
        for y in f8.elements():
            s = f8.add(x, y)
            assert f8.mul(s, s) == f8.add(f8.mul(x, x), f8.mul(y, y))


# --- trace ---


def test_trace_examples():
    f4 = build_field(2, 2)
    assert trace(f4, (0, 0)) == 0
    assert trace(f4, (0, 1)) == 1  # x + x^2 = x + (x+1) = 1
    f5 = build_field(5, 1)
    for x in range(5):
        assert trace(f5, (x,)) == x
    # trace is F_p-linear and onto for small fields
    f9 = build_field(3, 2)
    values = {trace(f9, e) for e in f9.elements()}
    assert values == {0, 1, 2}


# --- characters ---


def test_char_eval_examples():
    z4 = Zn(4)
    psi = Character.for_element(z4, 1)
    assert abs(char_eval(psi, 2) - (-1)) < 1e-12
    assert char_eval(principal_character(z4), 3) == 1
    for g in range(4):
        assert abs(abs(char_eval(psi, g)) - 1) < 1e-12


def test_char_orthogonality():
    for n in (2, 5, 12, 30):
        z = Zn(n)
        for c in range(1, n):
            total = sum(char_eval(Character.for_element(z, c), g) for g in range(n))
            assert abs(total) < 1e-9
        assert sum(char_eval(principal_character(z), g) for g in range(n)) == n


def test_char_order_examples():
    z12 = Zn(12)
    assert char_order(Character.for_element(z12, 4)) == 3
    assert char_order(principal_character(z12)) == 1
    f9 = build_field(3, 2)
    for c in range(1, 9):
        assert char_order(Character(f9, c)) == 3


def test_dual_pairing_nondegenerate_up_to_200():
    for g in abelian_groups_upto(200):
        W = char_matrix(g)
        row_is_one = np.abs(W - 1.0).max(axis=1) < 1e-9
        assert row_is_one[0]
        assert not row_is_one[1:].any(), g.moduli


def test_char_order_minimal_by_exhaustion():
    from subsetsieve.numtheory import factorize

    for g in abelian_groups_upto(60):
        for c in range(g.order):
            h = char_order(Character(g, c))
            elt = g.element(c)
            smallest = next(
                m for m in range(1, g.exponent + 1) if all(x == 0 for x in g.scalar(m, elt))
            )
            assert h == smallest
    # larger groups: minimality via the prime quotients of the computed order
    for g in abelian_groups_upto(200)[-40:]:
        for c in range(g.order):
            h = char_order(Character(g, c))
            elt = g.element(c)
            assert all(x == 0 for x in g.scalar(h, elt))
            for p, _ in factorize(h):
                assert any(x != 0 for x in g.scalar(h // p, elt))


def test_char_power_is_index_scaling():
    # psi^i evaluated everywhere equals the character indexed by i*c
    for g in abelian_groups_upto(100):
        W = char_matrix(g)
        smul = scalar_table(g, g.order)
        cur = np.ones_like(W)
        for i in range(1, g.order + 1):
            cur = cur * W
            assert np.abs(cur - W[smul[i]]).max() < 1e-7, (g.moduli, i)


def test_character_power_object():
    z12 = Zn(12)
    psi = Character.for_element(z12, 5)
    assert psi.power(3).index == 3  # 15 mod 12
    assert psi.power(0).is_principal()
    f4 = build_field(2, 2)
    chi = Character.for_element(f4, (1, 1))
    assert chi.power(2).is_principal()


def test_exponent_is_max_element_order():
    spot = [GroupSpec(m) for m in [(8, 9, 7), (2, 4, 8, 3), (625,), (16, 25), (4, 6, 10, 3)]]
    for g in abelian_groups_upto(120) + spot:
        orders = [g.element_order(g.element(i)) for i in range(g.order)]
        assert max(orders) == g.exponent
        assert g.exponent % max(orders) == 0 and g.order % g.exponent == 0


# --- polynomial evaluation ---


def test_eval_poly_examples():
    z6 = Zn(6)
    f = PolySpec(z6, (1, 0, 2))  # 2x^2 + 1
    assert eval_poly(f, 2) == 3
    ident = PolySpec.identity(z6)
    for x in range(6):
        assert eval_poly(ident, x) == x
    f4 = build_field(2, 2)
    cube = PolySpec(f4, (f4.zero(), f4.zero(), f4.zero(), f4.one()))
    for x in f4.elements():
        expected = f4.one() if any(x) else f4.zero()
        assert eval_poly(cube, x) == expected


def test_poly_values_matches_eval():
    f9 = build_field(3, 2)
    f = PolySpec(f9, ((1, 2), (0, 1), (2, 0)))
    fv = poly_values(f9, f)
    for i in range(9):
        assert fv[i] == f9.index_of(eval_poly(f, f9.element(i)))


def test_poly_validation():
    z6 = Zn(6)
    with pytest.raises(ValueError):
        PolySpec(z6, (1, 0))  # zero leading coefficient
    assert PolySpec(z6, (0, 3, 2)).zn_content() == math.gcd(3, 2, 6)
    assert PolySpec(z6, (5,)).degree == 0
    f4 = build_field(2, 2)
    assert PolySpec(f4, (f4.zero(), f4.zero(), f4.one())).degree_divisible_by_char() is True


# --- domains and partial sums ---


def test_domain_spec():
    z5 = Zn(5)
    d = DomainSpec.of_elements(z5, [3, 1, 2])
    assert d.included == (1, 2, 3) and d.m == 3 and d.c == 2
    full = DomainSpec.full(z5)
    assert full.m == 5 and full.describe() == "full"
    comp = DomainSpec.complement(z5, [0])
    assert comp.included == (1, 2, 3, 4) and comp.complement_form
    with pytest.raises(ValueError):
        DomainSpec(z5, (1, 1))
    with pytest.raises(ValueError):
        DomainSpec(z5, (7,))


def test_partial_char_sum_examples():
    z8 = Zn(8)
    dom = DomainSpec.of_elements(z8, [1, 2, 5])
    assert abs(partial_char_sum(dom, None, principal_character(z8)) - 3) < 1e-12
    psi = Character.for_element(z8, 3)
    full = DomainSpec.full(z8)
    assert abs(partial_char_sum(full, None, psi)) < 1e-9
    f7 = build_field(7, 1)
    sq = PolySpec(f7, ((0,), (0,), (1,)))
    s = partial_char_sum(DomainSpec.full(f7), sq, Character.for_element(f7, (1,)))
    assert abs(abs(s) - math.sqrt(7)) < 1e-9


def test_partial_sum_complement_consistency():
    z12 = Zn(12)
    f = PolySpec(z12, (2, 1, 3))
    for excl in [(0,), (0, 5), (1, 2, 3)]:
        dom = DomainSpec.complement(z12, excl)
        rest = DomainSpec.of_elements(z12, excl)
        full = DomainSpec.full(z12)
        for c in range(12):
            psi = Character.for_element(z12, c)
            lhs = partial_char_sum(dom, f, psi) + partial_char_sum(rest, f, psi)
            assert abs(lhs - partial_char_sum(full, f, psi)) < 1e-9


# --- Ramanujan sums ---


def test_ramanujan_trivial_order():
    for g in [GroupSpec((6,)), GroupSpec((2, 2)), GroupSpec((4, 3))]:
        for b in range(g.order):
            assert ramanujan_sum_exact_order(g, 1, g.element(b)) == 1


def test_ramanujan_cyclic_matches_bruteforce():
    from subsetsieve.numtheory import divisors

    for n in range(2, 31):
        g = GroupSpec((n,))
        W = char_matrix(g)
        orders = [char_order(Character(g, c)) for c in range(n)]
        for d in divisors(n):
            for b in range(n):
                brute = sum(W[c, b] for c in range(n) if orders[c] == d)
                got = ramanujan_sum_exact_order(g, d, (b,))
                assert abs(brute - got) < 1e-9, (n, d, b)


def test_ramanujan_z6_order2():
    assert ramanujan_sum_exact_order(GroupSpec((6,)), 2, (0,)) == 1


def test_ramanujan_sums_partition_group_order():
    from subsetsieve.numtheory import divisors

    for g in abelian_groups_upto(40):
        total = sum(ramanujan_sum_exact_order(g, d, g.zero()) for d in divisors(g.exponent))
        assert total == g.order
        # no characters of an order not dividing e(G)
        for d in (g.exponent + 1, 2 * g.exponent):
            if g.exponent % d:
                assert ramanujan_sum_exact_order(g, d, g.zero()) == 0


def test_group_element_encoding_is_lexicographic():
    g = GroupSpec((2, 3, 2))
    elems = [g.element(i) for i in range(g.order)]
    assert elems == sorted(elems)
    for i, e in enumerate(elems):
        assert g.index_of(e) == i


def test_fq_encoding_constants_first():
    f9 = build_field(3, 2)
    for r in range(3):
        assert f9.element(r) == (r, 0)
    assert f9.parse_element("4") == f9.element(4)
    assert f9.parse_element("1,2") == (1, 2)
    assert f9.format_element((1, 2)) == "1,2"


def test_power_table():
    z7 = Zn(7)
    pw = power_table(z7, 3)
    for x in range(7):
        assert pw[x, 0] == 1 and pw[x, 1] == x and pw[x, 2] == (x * x) % 7 and pw[x, 3] == pow(x, 3, 7)
