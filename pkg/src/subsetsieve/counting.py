"""The four counting paths for N_f(D, k, b) and their cross-validation.

``N_f(D, k, b)`` is the number of k-element subsets S of the domain D with
sum of f(x) over S equal to b. Paths:

* ``bruteforce`` — exhaustive subset enumeration (the independent oracle);
* ``dp``         — dynamic programming over (elements, size, partial sum),
                   exact integers, the authoritative fast path;
* ``charsum``    — the character-sum sieve over cycle types of S_k, in double
                   precision complex arithmetic with an explicit residual;
* ``closedform`` — the exact divisor/Ramanujan-sum formula for D = G, f = x.

k = 0 follows the empty-sum convention N = [b = 0] on every path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from . import backend
from .algebra import (
    DomainSpec,
    Element,
    Fq,
    GroupSpec,
    PolySpec,
    Structure,
    Zn,
    add_table,
    char_matrix,
    poly_values,
    scalar_table,
)
from .numtheory import binomial, class_size, cycle_types, divisors, sign_of_type

DEFAULT_ENUM_BUDGET = 10**7
DEFAULT_TOLERANCE = 1e-6
_INT64_SAFE = 2**62
_EXACT_FLOAT = float(2**52)


class BudgetError(RuntimeError):
    """An enumeration or memory budget would be exceeded."""


class ResidualError(RuntimeError):
    """The character-sum accumulator cannot be rounded safely."""


class CrossCheckError(RuntimeError):
    """Two counting methods disagreed; carries both values."""

    def __init__(self, message: str, results: dict):
        super().__init__(message)
        self.results = results


@dataclass(frozen=True)
class CountQuery:
    """One counting instance: structure, domain, polynomial (None = identity), k, b."""

    structure: Structure
    domain: DomainSpec
    poly: Optional[PolySpec]
    k: int
    b: Element

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.domain.structure != self.structure:
            raise ValueError("domain belongs to a different structure")
        if self.poly is not None and self.poly.structure != self.structure:
            raise ValueError("polynomial belongs to a different structure")
        self.structure.index_of(self.b)  # validates b


@dataclass(frozen=True)
class CountResult:
    n: int
    method: str
    residual: Optional[float] = None


def _is_identity(structure: Structure, poly: Optional[PolySpec]) -> bool:
    if poly is None:
        return True
    if isinstance(structure, GroupSpec):
        return False
    return poly.coeffs == (structure.zero(), structure.one())


@lru_cache(maxsize=None)
def cycle_type_pack(kmax: int):
    """Flat int64 arrays describing the cycle types of every k <= kmax.

    Returns (tk_off, t_coeff, t_poff, p_len, p_cnt):
    types of k live at tk_off[k]:tk_off[k+1]; type t carries the signed class
    size t_coeff[t] and its (length, multiplicity) pairs in p_len/p_cnt at
    t_poff[t]:t_poff[t+1].
    """
    tk_off = [0]
    t_coeff: list[int] = []
    t_poff = [0]
    p_len: list[int] = []
    p_cnt: list[int] = []
    for k in range(kmax + 1):
        for t in cycle_types(k):
            t_coeff.append(sign_of_type(t) * class_size(t))
            for i, c in t.parts():
                p_len.append(i)
                p_cnt.append(c)
            t_poff.append(len(p_len))
        tk_off.append(len(t_coeff))
    return (
        np.array(tk_off, dtype=np.int64),
        np.array(t_coeff, dtype=np.int64),
        np.array(t_poff, dtype=np.int64),
        np.array(p_len, dtype=np.int64),
        np.array(p_cnt, dtype=np.int64),
    )


def _domain_fvals(structure: Structure, domain: DomainSpec, poly) -> np.ndarray:
    return poly_values(structure, poly)[domain.indices()]


def _dp_int64_safe(m: int, kmax: int) -> bool:
    return binomial(m, min(kmax, m // 2)) < _INT64_SAFE


def _dp_python(d_fvals, add, kmax: int) -> list[list[int]]:
    """Exact big-integer DP, used when int64 could overflow."""
    q = add.shape[0]
    T = [[0] * q for _ in range(kmax + 1)]
    T[0][0] = 1
    targets = [list(map(int, add[:, v])) for v in d_fvals]
    for pos, tgt in enumerate(targets):
        for j in range(min(pos + 1, kmax), 0, -1):
            src = T[j - 1]
            dst = T[j]
            for s in range(q):
                x = src[s]
                if x:
                    dst[tgt[s]] += x
    return T


DP_TABLE_BUDGET = 10**8  # max (k+1) * |R| table entries


def dp_grid(structure: Structure, domain: DomainSpec, poly=None, kmax: int = 0) -> list[list[int]]:
    """Exact N(k, b) for all k <= kmax and every b index, via subset-sum DP."""
    kmax = min(kmax, domain.m)
    if (kmax + 1) * structure.order > DP_TABLE_BUDGET:
        raise BudgetError(
            f"dp table of {(kmax + 1) * structure.order} entries exceeds the memory budget"
        )
    d_fvals = _domain_fvals(structure, domain, poly)
    if _dp_int64_safe(domain.m, kmax):
        k = backend.kernels()
        if isinstance(structure, Zn):
            return k.dp_table_zn(d_fvals, structure.n, kmax).tolist()
        return k.dp_table(d_fvals, add_table(structure), kmax).tolist()
    return _dp_python(d_fvals, add_table(structure), kmax)


def bruteforce_grid(
    structure: Structure,
    domain: DomainSpec,
    poly=None,
    kmax: int = 0,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> list[list[int]]:
    """N(k, b) for all k <= kmax, b by exhaustive subset enumeration."""
    kmax = min(kmax, domain.m)
    n_subsets = sum(binomial(domain.m, j) for j in range(kmax + 1))
    if n_subsets > budget:
        raise BudgetError(f"enumerating {n_subsets} subsets exceeds the budget of {budget}")
    d_fvals = _domain_fvals(structure, domain, poly)
    return backend.kernels().brute_counts(d_fvals, add_table(structure), kmax).tolist()


def _rising(m: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= m + j
    return out


def charsum_acc_grid(structure: Structure, domain: DomainSpec, poly, kmax: int) -> np.ndarray:
    """Raw complex accumulator ACC[k, b] ~ |R| * k! * N(k, b)."""
    d_fvals = _domain_fvals(structure, domain, poly)
    pack = cycle_type_pack(kmax)
    W = char_matrix(structure)
    smul = scalar_table(structure, kmax)
    return backend.kernels().charsum_acc(d_fvals, W, smul, *pack)


def charsum_grid(
    structure: Structure,
    domain: DomainSpec,
    poly=None,
    kmax: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> tuple[list[list[int]], float]:
    """(N table, max residual) from the character-sum sieve.

    The accumulator is rounded to the nearest integer and divided by
    |R| * k! only afterwards; the residual is the distance of the k!*N
    estimate from that integer (plus any imaginary leakage), relative to
    max(1, magnitude). Raises ResidualError when it reaches ``tolerance`` or
    when magnitudes leave the exactly-roundable double range.
    """
    q = structure.order
    kmax = min(kmax, domain.m)
    if q * _rising(domain.m, kmax) >= _EXACT_FLOAT:
        raise ResidualError(
            f"accumulator magnitude ~{q * _rising(domain.m, kmax):.2e} exceeds the "
            "exactly-roundable double range; use dp instead"
        )
    acc = charsum_acc_grid(structure, domain, poly, kmax)
    est = acc.real / q
    dist = np.abs(est - np.rint(est))
    resid = np.maximum(dist, np.abs(acc.imag) / q) / np.maximum(1.0, np.abs(est))
    max_resid = float(resid.max())
    if max_resid >= tolerance:
        raise ResidualError(f"charsum residual {max_resid:.3g} >= tolerance {tolerance:.3g}")
    out: list[list[int]] = []
    for k in range(kmax + 1):
        div = q * math.factorial(k)
        row = []
        for b in range(q):
            racc = round(float(acc.real[k, b]))
            if racc % div:
                raise ResidualError(
                    f"rounded accumulator {racc} not divisible by |R|*k! = {div} at k={k}, b={b}"
                )
            row.append(racc // div)
        out.append(row)
    return out, max_resid


def _as_group(structure: Structure) -> GroupSpec:
    if isinstance(structure, GroupSpec):
        return structure
    if isinstance(structure, Zn):
        return structure.additive_group()
    return GroupSpec((structure.p,) * structure.t)


def _group_element(structure: Structure, b: Element) -> tuple:
    """Map b from a structure's native element form into its additive group."""
    if isinstance(structure, Zn):
        return (structure.index_of(b),)
    return tuple(b)


def closed_form_value(G: GroupSpec, k: int, b) -> int:
    """Exact N(G, k, b) for the whole group under f = x.

    Main term C(n, k)/n plus, for every divisor d > 1 of gcd(n, k), the term
    (-1)^{k + k/d} C(n/d, k/d) times the generalized Ramanujan sum of exact
    order d at b, all divided by n. The division must be exact — anything
    else is an implementation fault, never rounded over.
    """
    from .algebra import ramanujan_sum_exact_order

    n = G.order
    if k < 0 or k > n:
        return 0
    total = binomial(n, k)
    for d in divisors(math.gcd(n, k)):
        if d == 1:
            continue
        sign = -1 if (k + k // d) % 2 else 1
        total += sign * binomial(n // d, k // d) * ramanujan_sum_exact_order(G, d, b)
    if total % n:
        raise AssertionError(f"closed form produced non-integer {total}/{n} at k={k}, b={b}")
    return total // n


def closed_form_grid(G: GroupSpec, kmax: int) -> list[list[int]]:
    return [[closed_form_value(G, k, G.element(bi)) for bi in range(G.order)] for k in range(kmax + 1)]


def count_bruteforce(query: CountQuery, budget: int = DEFAULT_ENUM_BUDGET) -> CountResult:
    """Exhaustive oracle; refuses when C(|D|, k) exceeds the budget."""
    if binomial(query.domain.m, query.k) > budget:
        raise BudgetError(f"C({query.domain.m}, {query.k}) exceeds the budget of {budget}")
    if query.k > query.domain.m:
        return CountResult(0, "bruteforce")
    grid = bruteforce_grid(query.structure, query.domain, query.poly, query.k, budget=budget)
    return CountResult(grid[query.k][query.structure.index_of(query.b)], "bruteforce")


def count_dp(query: CountQuery) -> CountResult:
    if query.k > query.domain.m:
        return CountResult(0, "dp")
    grid = dp_grid(query.structure, query.domain, query.poly, query.k)
    return CountResult(grid[query.k][query.structure.index_of(query.b)], "dp")


def count_charsum(query: CountQuery, tolerance: float = DEFAULT_TOLERANCE) -> CountResult:
    if query.k > query.domain.m:
        return CountResult(0, "charsum")
    grid, resid = charsum_grid(query.structure, query.domain, query.poly, query.k, tolerance)
    return CountResult(grid[query.k][query.structure.index_of(query.b)], "charsum", resid)


def count_closed_form(G: Union[GroupSpec, Zn, Fq], k: int, b) -> CountResult:
    """Exact count for D = G under f = x; b in G's native element form."""
    group = G if isinstance(G, GroupSpec) else _as_group(G)
    return CountResult(closed_form_value(group, k, _group_element(G, b)), "closedform")


def closed_form_applies(query: CountQuery) -> bool:
    return query.domain.m == query.structure.order and _is_identity(query.structure, query.poly)


def count(
    query: CountQuery,
    method: str = "auto",
    budget: int = DEFAULT_ENUM_BUDGET,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CountResult:
    """Dispatch: auto = closedform when D is the whole group under f = x, else dp.

    method="crosscheck" runs dp and charsum (plus closedform when it applies)
    and raises CrossCheckError on any disagreement.
    """
    if method == "auto":
        method = "closedform" if closed_form_applies(query) else "dp"
    if method == "bruteforce":
        return count_bruteforce(query, budget)
    if method == "dp":
        return count_dp(query)
    if method == "charsum":
        return count_charsum(query, tolerance)
    if method == "closedform":
        if not closed_form_applies(query):
            raise ValueError("closedform requires D = G and f = x")
        return count_closed_form(query.structure, query.k, query.b)
    if method == "crosscheck":
        results = {
            "dp": count_dp(query),
            "charsum": count_charsum(query, tolerance),
        }
        if closed_form_applies(query):
            results["closedform"] = count_closed_form(query.structure, query.k, query.b)
        values = {name: r.n for name, r in results.items()}
        if len(set(values.values())) != 1:
            raise CrossCheckError(f"cross-check mismatch: {values}", results)
        return CountResult(results["dp"].n, "crosscheck", results["charsum"].residual)
    raise ValueError(f"unknown method {method!r}")
