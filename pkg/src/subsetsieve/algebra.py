"""Finite abelian groups, residue rings Z_n, finite fields F_q, their additive
characters, and polynomial evaluation.

Element encodings
-----------------
Every structure enumerates its elements by indices ``0 .. order-1``:

* ``Zn``: element = index = residue.
* ``GroupSpec``: residue tuples (b_1, ..., b_r); the index is big-endian mixed
  radix, so index order coincides with lexicographic order on tuples (this is
  what "lexicographically first" means throughout).
* ``Fq``: coefficient tuples (c_0, ..., c_{t-1}) in the power basis of the
  modulus; the index is sum c_j p^j, so indices 0 .. p-1 are the prime-field
  constants.

Characters are indexed by elements through the standard pairings — products
of roots of unity componentwise for Z_n and groups, exp(2*pi*i*Tr(c*x)/p) for
F_q. With that convention, powers and orders of characters reduce to integer
arithmetic on the index.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .numtheory import is_prime

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# structures


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group given as a product of cyclic factors Z_{n_j}."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.moduli or any(n < 2 for n in self.moduli):
            raise ValueError("each cyclic modulus must be >= 2")
        object.__setattr__(self, "moduli", tuple(int(n) for n in self.moduli))

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def exponent(self) -> int:
        """e(G): the maximal element order, lcm of the cyclic moduli."""
        return math.lcm(*self.moduli)

    def index_of(self, elt: Sequence[int]) -> int:
        if len(elt) != len(self.moduli):
            raise ValueError("element arity does not match the group")
        idx = 0
        for b, n in zip(elt, self.moduli):
            idx = idx * n + (b % n)
        return idx

    def element(self, index: int) -> tuple[int, ...]:
        out = []
        for n in reversed(self.moduli):
            out.append(index % n)
            index //= n
        return tuple(reversed(out))

    def elements(self) -> Iterator[tuple[int, ...]]:
        return (self.element(i) for i in range(self.order))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.moduli))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % n for x, n in zip(a, self.moduli))

    def scalar(self, i: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((i * x) % n for x, n in zip(a, self.moduli))

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.moduli)

    def element_order(self, a: Sequence[int]) -> int:
        return math.lcm(*(n // math.gcd(x, n) for x, n in zip(a, self.moduli)))

    def parse_element(self, text: str) -> tuple[int, ...]:
        parts = [int(p) for p in text.split(",")]
        if len(parts) != len(self.moduli):
            raise ValueError(f"expected {len(self.moduli)} residues, got {text!r}")
        return tuple(b % n for b, n in zip(parts, self.moduli))

    def format_element(self, elt: Sequence[int]) -> str:
        return ",".join(str(b) for b in elt)

    def describe(self) -> str:
        return "abelian:" + ",".join(str(n) for n in self.moduli)


@dataclass(frozen=True)
class Zn:
    """The residue ring Z_n, n >= 2."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("Z_n requires n >= 2")

    @property
    def order(self) -> int:
        return self.n

    @property
    def char_modulus(self) -> int:
        """Additive order of 1 — the modulus scalars are reduced by."""
        return self.n

    def additive_group(self) -> GroupSpec:
        return GroupSpec((self.n,))

    def index_of(self, elt: int) -> int:
        return elt % self.n

    def element(self, index: int) -> int:
        return index % self.n

    def elements(self) -> Iterator[int]:
        return iter(range(self.n))

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.n

    def neg(self, a: int) -> int:
        return (-a) % self.n

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.n

    def scalar(self, i: int, a: int) -> int:
        return (i * a) % self.n

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def element_order(self, a: int) -> int:
        return self.n // math.gcd(a, self.n)

    def parse_element(self, text: str) -> int:
        return int(text) % self.n

    def format_element(self, elt: int) -> str:
        return str(elt)

    def describe(self) -> str:
        return f"zn:{self.n}"


# --- polynomial helpers over F_p (coefficient lists, constant term first) ---


def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _fp_trim(out)


def _fp_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        a = _fp_trim(a)
        if len(a) - 1 < dm:
            break
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        a = _fp_trim(a)
    return a


def _fp_is_irreducible(m: Sequence[int], p: int) -> bool:
    """Trial division by all monic polynomials of degree 1 .. deg(m)//2."""
    t = len(m) - 1
    if t < 1:
        return False
    for deg in range(1, t // 2 + 1):
        for rep in range(p**deg):
            div = []
            r = rep
            for _ in range(deg):
                div.append(r % p)
                r //= p
            div.append(1)
            if not _fp_mod(m, div, p):
                return False
    return True


@dataclass(frozen=True)
class Fq:
    """The finite field F_{p^t} as polynomial residues modulo an irreducible.

    ``modulus`` is the monic degree-t modulus as a coefficient tuple
    (constant term first). Construct via :func:`build_field`, which validates
    irreducibility.
    """

    p: int
    t: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.t

    @property
    def order(self) -> int:
        return self.q

    @property
    def char_modulus(self) -> int:
        return self.p

    def index_of(self, elt: Sequence[int]) -> int:
        if len(elt) != self.t:
            raise ValueError(f"expected {self.t} coefficients")
        return sum((c % self.p) * self.p**j for j, c in enumerate(elt))

    def element(self, index: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.t):
            out.append(index % self.p)
            index //= self.p
        return tuple(out)

    def elements(self) -> Iterator[tuple[int, ...]]:
        return (self.element(i) for i in range(self.q))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % self.p for x in a)

    def scalar(self, i: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((i * x) % self.p for x in a)

    def mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        prod = _fp_mod(_fp_mul(list(a), list(b), self.p), self.modulus, self.p)
        return tuple(prod) + (0,) * (self.t - len(prod))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.t

    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.t - 1)

    def element_order(self, a: Sequence[int]) -> int:
        """Additive order: 1 for zero, p otherwise."""
        return 1 if all(x == 0 for x in a) else self.p

    def parse_element(self, text: str) -> tuple[int, ...]:
        if "," in text:
            parts = [int(x) for x in text.split(",")]
            if len(parts) != self.t:
                raise ValueError(f"expected {self.t} coefficients, got {text!r}")
            return tuple(x % self.p for x in parts)
        return self.element(int(text) % self.q)

    def format_element(self, elt: Sequence[int]) -> str:
        return ",".join(str(c) for c in elt)

    def describe(self) -> str:
        return f"fq:{self.p},{self.t}," + ":".join(str(c) for c in self.modulus)


Structure = Union[GroupSpec, Zn, Fq]
Element = Union[int, tuple]


def build_field(p: int, t: int, modulus: Optional[Sequence[int]] = None) -> Fq:
    """Construct F_{p^t}.

    Without an explicit modulus, picks the lexicographically first monic
    irreducible of degree t over F_p (coefficients compared constant term
    first); a user modulus must be monic of degree t and irreducible.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if t < 1:
        raise ValueError("extension degree must be >= 1")
    if modulus is not None:
        m = tuple(c % p for c in modulus)
        if len(m) != t + 1 or m[-1] != 1:
            raise ValueError("modulus must be monic of degree t")
        if t > 1 and not _fp_is_irreducible(list(m), p):
            raise ValueError("modulus is reducible over F_p")
        return Fq(p, t, m)
    if t == 1:
        return Fq(p, 1, (0, 1))
    for rep in range(p**t):
        low = []
        r = rep
        for _ in range(t):
            low.append(r % p)
            r //= p
        # big-endian digits of rep as (a_0, ..., a_{t-1}): lexicographic
        # enumeration with the constant term most significant
        low.reverse()
        cand = low + [1]
        if _fp_is_irreducible(cand, p):
            return Fq(p, t, tuple(cand))
    raise RuntimeError("no irreducible polynomial found")  # unreachable


def trace(field: Fq, x: Element) -> int:
    """Absolute trace Tr(x) = x + x^p + ... + x^(p^(t-1)), as an element of F_p."""
    acc = field.zero()
    y = tuple(c % field.p for c in x)
    for _ in range(field.t):
        acc = field.add(acc, y)
        y_idx = _pow_index(field, field.index_of(y), field.p)
        y = field.element(y_idx)
    if any(acc[1:]):
        raise AssertionError("trace did not land in the prime field")
    return acc[0]


def _pow_index(field: Fq, idx: int, e: int) -> int:
    mul = mul_table(field)
    out = field.index_of(field.one())
    base = idx
    while e:
        if e & 1:
            out = int(mul[out, base])
        base = int(mul[base, base])
        e >>= 1
    return out


# ---------------------------------------------------------------------------
# cached numpy tables (read-only; keyed on the frozen structure, bounded
# LRU since sweeps touch structures one at a time)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=128)
def add_table(s: Structure) -> np.ndarray:
    """int64 [order, order]: index of x + y."""
    q = s.order
    if isinstance(s, Zn):
        idx = np.arange(q, dtype=np.int64)
        return _frozen((idx[:, None] + idx[None, :]) % q)
    if isinstance(s, Fq):
        digits = _digit_matrix(q, s.p, s.t)  # little-endian
        sums = (digits[:, None, :] + digits[None, :, :]) % s.p
        weights = s.p ** np.arange(s.t, dtype=np.int64)
        return _frozen(np.tensordot(sums, weights, axes=(2, 0)).astype(np.int64))
    digits = _group_digit_matrix(s)
    sums = (digits[:, None, :] + digits[None, :, :]) % np.asarray(s.moduli, dtype=np.int64)
    weights = _group_weights(s)
    return _frozen(np.tensordot(sums, weights, axes=(2, 0)).astype(np.int64))


@lru_cache(maxsize=128)
def neg_table(s: Structure) -> np.ndarray:
    """int64 [order]: index of -x."""
    out = np.array([s.index_of(s.neg(s.element(i))) for i in range(s.order)], dtype=np.int64)
    return _frozen(out)


@lru_cache(maxsize=128)
def mul_table(s: Union[Zn, Fq]) -> np.ndarray:
    """int64 [order, order]: index of x * y (rings only)."""
    q = s.order
    if isinstance(s, Zn):
        idx = np.arange(q, dtype=np.int64)
        return _frozen((idx[:, None] * idx[None, :]) % q)
    out = np.empty((q, q), dtype=np.int64)
    elts = [s.element(i) for i in range(q)]
    for i in range(q):
        for j in range(i, q):
            v = s.index_of(s.mul(elts[i], elts[j]))
            out[i, j] = v
            out[j, i] = v
    return _frozen(out)


@lru_cache(maxsize=128)
def power_table(s: Union[Zn, Fq], dmax: int) -> np.ndarray:
    """int64 [order, dmax+1]: index of x^j for j = 0..dmax (x^0 = 1)."""
    q = s.order
    mul = mul_table(s)
    out = np.empty((q, dmax + 1), dtype=np.int64)
    one = s.index_of(s.one())
    out[:, 0] = one
    for j in range(1, dmax + 1):
        out[:, j] = mul[out[:, j - 1], np.arange(q)]
    return _frozen(out)


@lru_cache(maxsize=128)
def scalar_table(s: Structure, imax: int) -> np.ndarray:
    """int64 [imax+1, order]: index of the i-fold sum x + ... + x."""
    q = s.order
    out = np.empty((imax + 1, q), dtype=np.int64)
    for idx in range(q):
        e = s.element(idx)
        for i in range(imax + 1):
            out[i, idx] = s.index_of(s.scalar(i, e))
    return _frozen(out)


@lru_cache(maxsize=128)
def trace_table(s: Fq) -> np.ndarray:
    out = np.array([trace(s, s.element(i)) for i in range(s.q)], dtype=np.int64)
    return _frozen(out)


@lru_cache(maxsize=128)
def char_matrix(s: Structure) -> np.ndarray:
    """complex128 [order, order]: W[c, x] = value at x of the character indexed by c."""
    if isinstance(s, Zn):
        idx = np.arange(s.n, dtype=np.int64)
        ang = (idx[:, None] * idx[None, :]) % s.n
        return _frozen(np.exp(2j * np.pi * ang / s.n))
    if isinstance(s, Fq):
        tr = trace_table(s)
        ang = tr[mul_table(s)]
        return _frozen(np.exp(2j * np.pi * ang / s.p))
    digits = _group_digit_matrix(s)
    theta = np.zeros((s.order, s.order), dtype=np.float64)
    for j, n in enumerate(s.moduli):
        theta += (np.outer(digits[:, j], digits[:, j]) % n) / n
    return _frozen(np.exp(2j * np.pi * theta))


def _digit_matrix(q: int, base: int, width: int) -> np.ndarray:
    idx = np.arange(q, dtype=np.int64)
    return np.stack([(idx // base**j) % base for j in range(width)], axis=1)


@lru_cache(maxsize=128)
def _group_digit_matrix(s: GroupSpec) -> np.ndarray:
    out = np.empty((s.order, len(s.moduli)), dtype=np.int64)
    for i in range(s.order):
        out[i] = s.element(i)
    return _frozen(out)


def _group_weights(s: GroupSpec) -> np.ndarray:
    w = []
    acc = 1
    for n in reversed(s.moduli):
        w.append(acc)
        acc *= n
    return np.array(list(reversed(w)), dtype=np.int64)


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class Character:
    """An additive character, indexed by a dual element c of the structure."""

    structure: Structure
    index: int

    @classmethod
    def for_element(cls, s: Structure, c: Element) -> "Character":
        return cls(s, s.index_of(c))

    @property
    def element(self) -> Element:
        return self.structure.element(self.index)

    def is_principal(self) -> bool:
        return self.index == 0

    def power(self, i: int) -> "Character":
        """psi^i — the character indexed by the i-fold sum of c."""
        s = self.structure
        return Character(s, s.index_of(s.scalar(i, self.element)))


def principal_character(s: Structure) -> Character:
    return Character(s, 0)


def characters(s: Structure) -> Iterator[Character]:
    """All additive characters, in dual-index order (principal first)."""
    return (Character(s, c) for c in range(s.order))


def char_eval(psi: Character, g: Element) -> complex:
    """Value of the character at g; unit modulus, exactly 1 for the principal."""
    s = psi.structure
    c = psi.element
    if isinstance(s, Zn):
        return cmath.exp(2j * math.pi * ((c * g) % s.n) / s.n)
    if isinstance(s, Fq):
        gi = g if isinstance(g, int) else s.index_of(g)
        tr = int(trace_table(s)[int(mul_table(s)[psi.index, gi])])
        return cmath.exp(2j * math.pi * tr / s.p)
    if len(g) != len(s.moduli):
        raise ValueError("element does not belong to the character's group")
    theta = sum(((cj * gj) % n) / n for cj, gj, n in zip(c, g, s.moduli))
    return cmath.exp(2j * math.pi * theta)


def char_order(psi: Character) -> int:
    """Order of psi in the dual group = additive order of its index element."""
    return psi.structure.element_order(psi.element)


# ---------------------------------------------------------------------------
# polynomials and domains


@dataclass(frozen=True)
class PolySpec:
    """A polynomial a_0 + a_1 x + ... + a_d x^d with coefficients in the ring.

    Coefficients are ring elements (ints for Z_n, tuples for F_q), constant
    term first; the leading coefficient must be nonzero unless d = 0.
    """

    structure: Union[Zn, Fq]
    coeffs: tuple

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("need at least a constant coefficient")
        if len(self.coeffs) > 1:
            lead = self.coeffs[-1]
            if (lead == 0 if isinstance(self.structure, Zn) else not any(lead)):
                raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def zn_content(self) -> Optional[int]:
        """gcd(a_1, ..., a_d, n) for Z_n polynomials of positive degree."""
        if not isinstance(self.structure, Zn) or self.degree < 1:
            return None
        return math.gcd(self.structure.n, *self.coeffs[1:])

    def degree_divisible_by_char(self) -> Optional[bool]:
        if not isinstance(self.structure, Fq) or self.degree < 1:
            return None
        return self.degree % self.structure.p == 0

    def add_constant(self, a: Element) -> "PolySpec":
        s = self.structure
        return PolySpec(s, (s.add(self.coeffs[0], a),) + self.coeffs[1:])

    def describe(self) -> str:
        s = self.structure
        sep = "," if isinstance(s, Zn) else ";"
        return sep.join(s.format_element(c) for c in self.coeffs)

    @classmethod
    def identity(cls, s: Union[Zn, Fq]) -> "PolySpec":
        return cls(s, (s.zero(), s.one()))


def eval_poly(f: PolySpec, x: Element) -> Element:
    """Horner evaluation in exact ring arithmetic."""
    s = f.structure
    acc = f.coeffs[-1]
    for a in reversed(f.coeffs[:-1]):
        acc = s.add(s.mul(acc, x), a)
    return acc


def poly_values(s: Structure, f: Optional[PolySpec]) -> np.ndarray:
    """int64 [order]: index of f(x) for every element index x (f = None: identity)."""
    q = s.order
    if f is None:
        return np.arange(q, dtype=np.int64)
    if f.structure != s:
        raise ValueError("polynomial is over a different structure")
    if isinstance(s, Zn):
        vals = np.zeros(q, dtype=np.int64)
        x = np.arange(q, dtype=np.int64)
        for a in reversed(f.coeffs):
            vals = (vals * x + a) % s.n
        return vals
    mul = mul_table(s)
    add = add_table(s)
    vals = np.full(q, s.index_of(f.coeffs[-1]), dtype=np.int64)
    x = np.arange(q, dtype=np.int64)
    for a in reversed(f.coeffs[:-1]):
        vals = add[mul[vals, x], s.index_of(a)]
    return vals


@dataclass(frozen=True)
class DomainSpec:
    """A duplicate-free subset D of the structure, explicit or complement-form.

    ``included`` is the canonical sorted tuple of element indices;
    ``complement_form`` records how the domain was specified (it also selects
    the full-sum-minus-excluded evaluation route for character sums).
    """

    structure: Structure
    included: tuple[int, ...]
    complement_form: bool = False

    def __post_init__(self) -> None:
        q = self.structure.order
        if any(i < 0 or i >= q for i in self.included):
            raise ValueError("domain element out of range")
        if len(set(self.included)) != len(self.included):
            raise ValueError("domain elements must be distinct")
        object.__setattr__(self, "included", tuple(sorted(self.included)))

    @classmethod
    def full(cls, s: Structure) -> "DomainSpec":
        return cls(s, tuple(range(s.order)), complement_form=True)

    @classmethod
    def of_elements(cls, s: Structure, elements: Iterable[Element]) -> "DomainSpec":
        return cls(s, tuple(s.index_of(e) for e in elements), complement_form=False)

    @classmethod
    def complement(cls, s: Structure, excluded: Iterable[Element]) -> "DomainSpec":
        bad = sorted({s.index_of(e) for e in excluded})
        keep = sorted(set(range(s.order)) - set(bad))
        return cls(s, tuple(keep), complement_form=True)

    @property
    def m(self) -> int:
        return len(self.included)

    @property
    def c(self) -> int:
        return self.structure.order - self.m

    def excluded(self) -> tuple[int, ...]:
        return tuple(sorted(set(range(self.structure.order)) - set(self.included)))

    def elements(self) -> list[Element]:
        return [self.structure.element(i) for i in self.included]

    def indices(self) -> np.ndarray:
        return np.array(self.included, dtype=np.int64)

    def describe(self) -> str:
        s = self.structure
        if self.m == s.order:
            return "full"
        if self.complement_form:
            return "complement:" + ";".join(s.format_element(s.element(i)) for i in self.excluded())
        return "list:" + ";".join(s.format_element(s.element(i)) for i in self.included)


def partial_char_sum(domain: DomainSpec, f: Optional[PolySpec], psi: Character) -> complex:
    """Sum of psi(f(a)) over a in D.

    Complement-form domains are evaluated as the full-structure sum minus the
    excluded elements' contributions.
    """
    s = domain.structure
    if psi.structure != s:
        raise ValueError("character and domain live on different structures")
    W = char_matrix(s)
    fv = poly_values(s, f)
    row = W[psi.index]
    if domain.complement_form:
        total = complex(row[fv].sum())
        for i in domain.excluded():
            total -= row[fv[i]]
        return total
    return complex(row[fv[domain.indices()]].sum())


def ramanujan_sum_exact_order(G: GroupSpec, d: int, b: Sequence[int]) -> int:
    """Sum of psi(b) over characters psi of order exactly d (a rational integer).

    Möbius inversion over e | d of T(e, b), where T(e, b) sums psi(b) over the
    psi with psi^e principal: T(e, b) = prod_j gcd(e, n_j) when
    gcd(e, n_j) | b_j for all j, and 0 otherwise. Classical Ramanujan sum
    c_d(b) when G is cyclic; 0 whenever d does not divide e(G).
    """
    if d < 1:
        raise ValueError("order must be >= 1")
    from .numtheory import divisors, moebius

    b = tuple(x % n for x, n in zip(b, G.moduli))
    total = 0
    for e in divisors(d):
        mu = moebius(d // e)
        if mu == 0:
            continue
        t = 1
        for bj, nj in zip(b, G.moduli):
            g = math.gcd(e, nj)
            if bj % g:
                t = 0
                break
            t *= g
        total += mu * t
    return total
