"""Exact number-theoretic and combinatorial primitives.

Everything here is pure and exact: counts are Python ints, rationals are
``fractions.Fraction``. The only floating-point surface is :class:`RealBound`,
which carries an explicit rounding direction so that bound values can be
certified as overestimates of the exact quantity they approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Number = Union[int, float, Fraction]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 by trial division, as (prime, exponent) pairs."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def is_prime_power(n: int) -> bool:
    return n >= 2 and len(factorize(n)) == 1


def smallest_prime_factor(n: int) -> int:
    if n < 2:
        raise ValueError("n must be >= 2")
    return factorize(n)[0][0]


def divisors(n: int) -> list[int]:
    """All positive divisors of n, sorted ascending."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def moebius(n: int) -> int:
    """Möbius function: 0 on non-squarefree n, else (-1)^(number of prime factors)."""
    if n < 1:
        raise ValueError("moebius requires n >= 1")
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def delta(n: int) -> Fraction:
    """Sum of 1/i over divisors i of n with moebius(i) = -1.

    Equals 1/p for prime powers p^t; 0 for n = 1. This is the quantity that
    controls how much of a domain the nontrivial characters can "see" in the
    sieve bounds.
    """
    if n < 1:
        raise ValueError("delta requires n >= 1")
    return sum((Fraction(1, i) for i in divisors(n) if moebius(i) == -1), Fraction(0))


def falling_factorial(x: Number, k: int) -> Number:
    """(x)_k = x (x-1) ... (x-k+1); (x)_0 = 1. Exact for int/Fraction inputs."""
    if k < 0:
        raise ValueError("falling_factorial requires k >= 0")
    out = x**0
    for j in range(k):
        out = out * (x - j)
    return out


def binomial(n: int, k: int) -> int:
    """Exact integer binomial coefficient; 0 for k < 0 or k > n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class RealBound:
    """A double-precision value with a declared rounding direction.

    rounding="up" promises every arithmetic step rounded toward +inf, so
    ``value`` over-estimates the exact quantity; "nearest" is best effort.
    """

    value: float
    rounding: str = "up"


def float_up(x: Number) -> float:
    """Smallest representable double >= x (best effort: +inf on overflow)."""
    if isinstance(x, float):
        return x
    try:
        f = float(x)
    except OverflowError:
        return math.inf
    if not math.isfinite(f):
        return f
    exact = x if isinstance(x, Fraction) else Fraction(x)
    if Fraction(f) < exact:
        f = math.nextafter(f, math.inf)
    return f


def binomial_real(x: Number, k: int, rounding: str = "up") -> RealBound:
    """C(x, k) = (x)_k / k! for real x, with directed rounding.

    Computed exactly in rational arithmetic (floats are exact binary
    rationals), then rounded in the requested direction, so the "up" result
    is the tightest double that does not under-estimate.
    """
    if k < 0:
        raise ValueError("binomial_real requires k >= 0")
    exact = falling_factorial(Fraction(x), k) / math.factorial(k)
    if rounding == "up":
        return RealBound(float_up(exact), "up")
    return RealBound(float(exact), "nearest")


@dataclass(frozen=True)
class CycleType:
    """A conjugacy class of S_k: counts[i-1] cycles of length i, sum i*c_i = k."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts):
            raise ValueError("cycle counts must be nonnegative")
        if sum(i * c for i, c in enumerate(self.counts, start=1)) != len(self.counts):
            raise ValueError("cycle counts do not describe a permutation of k elements")

    @property
    def k(self) -> int:
        return len(self.counts)

    def parts(self) -> list[tuple[int, int]]:
        """(cycle length, multiplicity) pairs with nonzero multiplicity."""
        return [(i, c) for i, c in enumerate(self.counts, start=1) if c]


def _partitions_desc(remaining: int, maxpart: int):
    if remaining == 0:
        yield ()
        return
    for part in range(min(remaining, maxpart), 0, -1):
        for rest in _partitions_desc(remaining - part, part):
            yield (part,) + rest


@lru_cache(maxsize=None)
def cycle_types(k: int) -> tuple[CycleType, ...]:
    """All cycle types of S_k, one per integer partition of k.

    Enumeration order (stable, documented): partitions with parts written in
    non-increasing order, listed lexicographically decreasing — [k] first,
    [1]*k last. k = 0 yields the single empty type.
    """
    if k < 0:
        raise ValueError("cycle_types requires k >= 0")
    out = []
    for partition in _partitions_desc(k, k):
        counts = [0] * k
        for part in partition:
            counts[part - 1] += 1
        out.append(CycleType(tuple(counts)))
    return tuple(out)


def class_size(t: CycleType) -> int:
    """Number of permutations in S_k with cycle type t: k! / prod i^{c_i} c_i!."""
    denom = 1
    for i, c in t.parts():
        denom *= i**c * math.factorial(c)
    return math.factorial(t.k) // denom


def sign_of_type(t: CycleType) -> int:
    """(-1)^(k - number of cycles), fixed points included."""
    return -1 if (t.k - sum(t.counts)) % 2 else 1


def cycle_index_eval(k: int, weights) -> Number:
    """Sum over cycle types of class_size * prod_i w_i^{c_i}.

    ``weights`` is a mapping {i: w_i} or a sequence [w_1, ..., w_k] of weights
    per cycle length. All w_i = 1 gives k!; exact when weights are
    ints/Fractions, double precision otherwise.
    """
    if isinstance(weights, Mapping):
        w = [weights[i] for i in range(1, k + 1)]
    else:
        w = list(weights)
        if len(w) != k:
            raise ValueError(f"need {k} weights, got {len(w)}")
    total = 0
    for t in cycle_types(k):
        term: Number = class_size(t)
        for i, c in t.parts():
            term = term * w[i - 1] ** c
        total = total + term
    return total


def _binom_general(e: Number, j: int) -> Number:
    """C(e, j) for arbitrary e; integer when e is an integer."""
    num = falling_factorial(e, j)
    d = math.factorial(j)
    if isinstance(num, int):
        q, r = divmod(num, d)
        return q if r == 0 else Fraction(num, d)
    return num / d


def series_coeff(k: int, factors: Iterable[tuple[int, Number]]) -> Number:
    """[x^k] of prod_j (1 - x^{m_j})^{e_j} by truncated series multiplication.

    ``factors`` lists (m_j, e_j); negative e_j are denominators. Real e_j are
    expanded with the generalized binomial series term by term; int/Fraction
    exponents give exact coefficients.
    """
    if k < 0:
        raise ValueError("negative series index")
    coeffs: list[Number] = [1] + [0] * k
    for m, e in factors:
        if m < 1:
            raise ValueError("factor degree must be >= 1")
        jmax = k // m
        fac: list[Number] = [0] * (k + 1)
        for j in range(jmax + 1):
            term = _binom_general(e, j)
            fac[m * j] = -term if j % 2 else term
        new: list[Number] = [0] * (k + 1)
        for i, a in enumerate(coeffs):
            if a == 0:
                continue
            for j in range(0, k - i + 1, m):
                b = fac[j]
                if b != 0:
                    new[i + j] = new[i + j] + a * b
        coeffs = new
    return coeffs[k]
