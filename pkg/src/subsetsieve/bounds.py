"""Explicit deviation bounds for subset-sum counts, and their verification.

Each theorem-style bound controls |N - C(|D|, k)/|R|| by a binomial
expression. Bound values are computed with directed rounding: transcendental
atoms (exp, sqrt, p^(-1/d)) are nudged up by a couple of ulps, everything
after that is exact rational arithmetic, and the final float conversion
rounds toward +inf. Deviations are exact rationals, so a "holds" verdict is
conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .algebra import DomainSpec, Fq, GroupSpec, PolySpec, Structure, Zn, char_matrix, poly_values
from .counting import CountQuery, count_dp
from .numtheory import (
    RealBound,
    binomial,
    binomial_real,
    delta,
    float_up,
    is_prime_power,
    smallest_prime_factor,
)

WEIL_SLACK = 1e-9


class ConstantChoice(str, Enum):
    """Constant C_d in the Z_n exponential-sum bound C_d * n^(1 - 1/d)."""

    HUA_E185D = "hua"  # e^{1.85 d}, any n
    DINGQI_E174D = "dingqi"  # e^{1.74 d}, requires d >= 3
    COCHRANE_ZHENG_441 = "cz"  # absolute 4.41, requires prime-power n


def _ulp_up(x: float, steps: int = 2) -> float:
    for _ in range(steps):
        x = math.nextafter(x, math.inf)
    return x


def hua_constant(d: int, constant: ConstantChoice) -> float:
    """C_d as an upper-rounded double."""
    if constant is ConstantChoice.HUA_E185D:
        return _ulp_up(math.exp(_ulp_up(1.85 * d, 1)))
    if constant is ConstantChoice.DINGQI_E174D:
        if d < 3:
            raise ValueError("the e^{1.74 d} constant requires d >= 3")
        return _ulp_up(math.exp(_ulp_up(1.74 * d, 1)))
    return _ulp_up(4.41, 1)


def default_constant_zn(n: int, d: int) -> ConstantChoice:
    """cz for prime powers, dingqi for d >= 3, else hua."""
    if is_prime_power(n):
        return ConstantChoice.COCHRANE_ZHENG_441
    if d >= 3:
        return ConstantChoice.DINGQI_E174D
    return ConstantChoice.HUA_E185D


def _check_constant(n: int, d: int, constant: ConstantChoice) -> None:
    if constant is ConstantChoice.COCHRANE_ZHENG_441 and not is_prime_power(n):
        raise ValueError("the 4.41 constant requires a prime-power modulus")
    if constant is ConstantChoice.DINGQI_E174D and d < 3:
        raise ValueError("the e^{1.74 d} constant requires d >= 3")


def _root_pow_up(p: int, d: int) -> Fraction:
    """Upper bound for p^(-1/d), exact rational of an up-rounded double."""
    e = math.nextafter(-1.0 / d, math.inf)
    return Fraction(_ulp_up(p**e))


def _sqrt_up(q: int) -> Fraction:
    s = math.isqrt(q)
    if s * s == q:
        return Fraction(s)
    return Fraction(_ulp_up(math.sqrt(q), 1))


def _cdnp_up(n: int, d: int, constant: ConstantChoice) -> Fraction:
    """Upper bound for C_d * n * p^(-1/d), p the smallest prime factor of n."""
    p = smallest_prime_factor(n)
    return Fraction(hua_constant(d, constant)) * n * _root_pow_up(p, d)


def bound_zn(n: int, c: int, k: int, d: int, constant: ConstantChoice) -> RealBound:
    """C(delta(n)(n-c) + (1-delta(n))(C_d n p^(-1/d) + c) + k - 1, k), rounded up."""
    if not (n >= 2 and 0 <= c <= n and k >= 0 and d >= 1):
        raise ValueError("bound_zn arguments out of range")
    _check_constant(n, d, constant)
    dl = delta(n)
    arg = dl * (n - c) + (1 - dl) * (_cdnp_up(n, d, constant) + c) + (k - 1)
    return binomial_real(arg, k, "up")


def applicability_zn(
    n: int, c: int, d: int, constant: ConstantChoice, content: int = 1
) -> tuple[bool, str]:
    """Whether the Z_n deviation bound applies: |D| = n-c >= C_d n p^(-1/d) + c
    (right side rounded up) and gcd(a_1, ..., a_d, n) = 1."""
    _check_constant(n, d, constant)
    if content != 1:
        return False, f"content condition fails: gcd(a_1..a_d, n) = {content}"
    threshold = _cdnp_up(n, d, constant) + c
    if Fraction(n - c) < threshold:
        return False, f"|D| = {n - c} below C_d n p^(-1/d) + c ~ {float(threshold):.6g}"
    return True, ""


def bound_fq(q: int, p: int, c: int, k: int, d: int) -> RealBound:
    """C((q-c)/p + ((p-1)/p)((d-1) sqrt(q) + c) + k - 1, k), rounded up."""
    if not (q >= 2 and p >= 2 and q % p == 0 and 0 <= c <= q and k >= 0 and d >= 1):
        raise ValueError("bound_fq arguments out of range")
    arg = Fraction(q - c, p) + Fraction(p - 1, p) * ((d - 1) * _sqrt_up(q) + c) + (k - 1)
    return binomial_real(arg, k, "up")


def applicability_fq(q: int, p: int, c: int, d: int) -> tuple[bool, str]:
    """Whether the F_q bound applies: p does not divide d and |D| >= (d-1) sqrt(q) + c."""
    if d % p == 0:
        return False, f"degree {d} divisible by the characteristic {p}"
    threshold = (d - 1) * _sqrt_up(q) + c
    if Fraction(q - c) < threshold:
        return False, f"|D| = {q - c} below (d-1) sqrt(q) + c ~ {float(threshold):.6g}"
    return True, ""


def bound_abelian(order: int, c: int, exponent: int, k: int) -> RealBound:
    """C(c + (|G| - 2c) delta(e(G)) + k - 1, k), rounded up (exact rationals inside)."""
    if not (order >= 1 and 0 <= c <= order and exponent >= 1 and k >= 0):
        raise ValueError("bound_abelian arguments out of range")
    arg = c + (order - 2 * c) * delta(exponent) + (k - 1)
    return binomial_real(arg, k, "up")


def applicability_abelian(order: int, c: int) -> tuple[bool, str]:
    """Whether the abelian-group bound applies: |D| = |G| - c >= c."""
    if order - c < c:
        return False, f"|D| = {order - c} smaller than c = {c}"
    return True, ""


@dataclass(frozen=True)
class BoundReport:
    """Exact deviation versus a round-up bound, with an applicability verdict.

    ``holds`` is None when the theorem's preconditions fail; the bound value
    is still reported, never silently passed.
    """

    main_term: Fraction
    deviation: Fraction
    bound: RealBound
    applicable: bool
    reason: str
    holds: Optional[bool]
    constant: Optional[ConstantChoice] = None


def _theorem_for(structure: Structure) -> str:
    if isinstance(structure, Zn):
        return "zn"
    if isinstance(structure, Fq):
        return "fq"
    return "abelian"


def verify_theorem(
    query: CountQuery,
    theorem: Optional[str] = None,
    constant: Optional[ConstantChoice] = None,
    n_value: Optional[int] = None,
) -> BoundReport:
    """Exact count (dp), exact deviation from C(|D|,k)/|R|, bound, verdict.

    ``theorem`` defaults to the structure's own bound; ``n_value`` lets a
    caller reuse an already-computed count.
    """
    s = query.structure
    theorem = theorem or _theorem_for(s)
    order = s.order
    m = query.domain.m
    c = order - m
    k = query.k
    d = query.poly.degree if query.poly is not None else 1

    if theorem == "zn":
        if not isinstance(s, Zn):
            raise ValueError("the zn bound needs a Z_n structure")
        constant = constant or default_constant_zn(s.n, d)
        content = query.poly.zn_content() if query.poly is not None else 1
        applicable, reason = applicability_zn(s.n, c, d, constant, content or 1)
        bound = bound_zn(s.n, c, k, d, constant)
    elif theorem == "fq":
        if not isinstance(s, Fq):
            raise ValueError("the fq bound needs an F_q structure")
        applicable, reason = applicability_fq(s.q, s.p, c, d)
        bound = bound_fq(s.q, s.p, c, k, d)
        constant = None
    elif theorem == "abelian":
        if not _is_additive_query(query):
            raise ValueError("the abelian-group bound is for f = x")
        exponent = s.exponent if isinstance(s, GroupSpec) else (s.n if isinstance(s, Zn) else s.p)
        applicable, reason = applicability_abelian(order, c)
        bound = bound_abelian(order, c, exponent, k)
        constant = None
    else:
        raise ValueError(f"unknown theorem {theorem!r}")

    n = n_value if n_value is not None else count_dp(query).n
    main = Fraction(binomial(m, k), order)
    dev = abs(Fraction(n) - main)
    holds = (dev <= Fraction(bound.value)) if applicable else None
    return BoundReport(main, dev, bound, applicable, reason, holds, constant)


def _is_additive_query(query: CountQuery) -> bool:
    if query.poly is None:
        return True
    s = query.structure
    return not isinstance(s, GroupSpec) and query.poly.coeffs == (s.zero(), s.one())


# ---------------------------------------------------------------------------
# character-sum bound checks


@dataclass(frozen=True)
class CharSumCheck:
    """Outcome of sweeping character sums against an explicit bound."""

    applicable: bool
    reason: str
    bound: float
    max_abs: float
    max_ratio: Optional[float]
    holds: Optional[bool]
    checked: int


def check_weil(domain: DomainSpec, poly: PolySpec) -> CharSumCheck:
    """Partial sums over D against (d-1) sqrt(q) + c, every nontrivial character.

    Requires deg f not divisible by the characteristic; reports the largest
    magnitude and its ratio to the bound (the Gauss case f = x^2, D = F_q
    attains ratio 1 up to rounding).
    """
    s = domain.structure
    if not isinstance(s, Fq):
        raise ValueError("check_weil needs an F_q domain")
    d = poly.degree
    if d % s.p == 0:
        return CharSumCheck(False, f"degree {d} divisible by p = {s.p}", 0.0, 0.0, None, None, 0)
    bound = float_up((d - 1) * _sqrt_up(s.q) + domain.c)
    W = char_matrix(s)
    fv = poly_values(s, poly)[domain.indices()]
    mags = np.abs(W[1:, fv].sum(axis=1)) if domain.m else np.zeros(s.q - 1)
    max_abs = float(mags.max()) if mags.size else 0.0
    ratio = max_abs / bound if bound > 0 else None
    return CharSumCheck(True, "", bound, max_abs, ratio, max_abs <= bound + WEIL_SLACK, int(mags.size))


@dataclass(frozen=True)
class HuaCheck:
    """Full-ring sums over Z_n for every primitive character, plus the
    order-h reduction identity for every nonprincipal character."""

    applicable: bool
    reason: str
    bound: float
    max_abs: float
    holds: Optional[bool]
    cz_bound: Optional[float]
    cz_holds: Optional[bool]
    reduction_max_diff: float
    reduction_holds: bool
    checked: int


def _zn_pow_up(n: int, d: int) -> Fraction:
    """Upper bound for n^(1 - 1/d)."""
    e = math.nextafter(1.0 - 1.0 / d, math.inf)
    return Fraction(_ulp_up(float(n) ** e))


def hua_sum_bound(n: int, d: int, constant: ConstantChoice) -> float:
    """Round-up value of C_d * n^(1 - 1/d)."""
    return float_up(Fraction(hua_constant(d, constant)) * _zn_pow_up(n, d))


def check_hua(ring: Union[Zn, int], poly: PolySpec) -> HuaCheck:
    """Exponential-sum bound C_d n^(1-1/d) over all primitive characters.

    Also verifies, for every nonprincipal character of order h, that the full
    Z_n sum equals (n/h) times the induced primitive Z_h sum, and checks the
    4.41 constant when n is a prime power.
    """
    s = ring if isinstance(ring, Zn) else Zn(ring)
    n = s.n
    d = poly.degree
    if d < 1:
        raise ValueError("check_hua needs a polynomial of positive degree")
    content = poly.zn_content()
    if content != 1:
        return HuaCheck(False, f"content condition fails: gcd = {content}", 0.0, 0.0, None,
                        None, None, 0.0, True, 0)
    W = char_matrix(s)
    fv = poly_values(s, poly)
    prim = [cc for cc in range(1, n) if math.gcd(cc, n) == 1]
    sums = W[prim][:, fv].sum(axis=1)
    max_abs = float(np.abs(sums).max()) if prim else 0.0
    bound = hua_sum_bound(n, d, ConstantChoice.HUA_E185D)
    holds = max_abs <= bound + WEIL_SLACK
    cz_bound = cz_holds = None
    if is_prime_power(n):
        cz_bound = hua_sum_bound(n, d, ConstantChoice.COCHRANE_ZHENG_441)
        cz_holds = max_abs <= cz_bound + WEIL_SLACK
    # order-h reduction: full sum = (n/h) * induced primitive sum over Z_h
    maxdiff = 0.0
    coeffs = [s.index_of(a) for a in poly.coeffs]
    for cc in range(1, n):
        h = n // math.gcd(cc, n)
        step = n // h
        cp = cc // step
        fvh = np.zeros(h, dtype=np.int64)
        xh = np.arange(h, dtype=np.int64)
        for a in reversed(coeffs):
            fvh = (fvh * xh + a % h) % h
        s_n = complex(W[cc][fv].sum())
        s_h = complex(W[step * cp][fvh].sum())
        maxdiff = max(maxdiff, abs(s_n - step * s_h))
    return HuaCheck(True, "", bound, max_abs, holds, cz_bound, cz_holds,
                    maxdiff, maxdiff <= WEIL_SLACK, len(prim))
