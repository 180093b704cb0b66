"""Exact arithmetic in a totally real number field.

A field is described by a monic irreducible integer polynomial with all
roots real.  Elements are rational coordinate vectors in the power basis
1, t, ..., t^(n-1) of a root t.  Real embeddings are ordered by increasing
root and are only ever produced as rational-endpoint enclosing intervals,
refinable to any width; signs of nonzero elements are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import linalg
from .errors import (
    DegenerateRoots,
    MixedExponents,
    NotAUnit,
    NotIrreducible,
    NotTotallyPositive,
    NotTotallyReal,
    SearchBoundExceeded,
    ZeroInput,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# rational intervals


@dataclass(frozen=True)
class RatInterval:
    """Closed interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        assert self.lo <= self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def sign(self) -> int | None:
        """Certified sign, or None if the interval straddles zero."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def __add__(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "RatInterval":
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other: "RatInterval") -> "RatInterval":
        return self + (-other)

    def __mul__(self, other: "RatInterval") -> "RatInterval":
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return RatInterval(min(products), max(products))

    def scale(self, c: Fraction) -> "RatInterval":
        if c >= 0:
            return RatInterval(self.lo * c, self.hi * c)
        return RatInterval(self.hi * c, self.lo * c)

    def shift(self, c: Fraction) -> "RatInterval":
        return RatInterval(self.lo + c, self.hi + c)

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.midpoint())


def interval_poly_eval(coeffs: Sequence[Fraction], iv: RatInterval) -> RatInterval:
    """Interval Horner evaluation of a rational polynomial."""
    acc = RatInterval(_ZERO, _ZERO)
    for c in reversed(coeffs):
        acc = acc * iv
        acc = acc.shift(c)
    return acc


# ---------------------------------------------------------------------------
# polynomials over the rationals (dense, ascending coefficients)


def poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = _ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_deriv(p: Sequence[Fraction]) -> list[Fraction]:
    return [c * k for k, c in enumerate(p)][1:]


def poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]):
    num = list(num)
    den = list(den)
    if len(num) < len(den):
        return [], num
    quot = [_ZERO] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        q = num[k + len(den) - 1] / lead
        quot[k] = q
        if q != 0:
            for i, c in enumerate(den):
                num[k + i] -= q * c
    return quot, poly_trim(num)


def sturm_chain(p: Sequence[Fraction]) -> list[list[Fraction]]:
    chain = [list(p), poly_deriv(p)]
    while len(chain[-1]) > 1:
        _, rem = poly_divmod(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p: Sequence[Fraction], lo: Fraction, hi: Fraction) -> int:
    chain = sturm_chain(p)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def isolate_real_roots(p: Sequence[Fraction]) -> list[RatInterval]:
    """Disjoint isolating intervals for the real roots, sorted increasing.

    Assumes p squarefree with no rational roots, so interval endpoints are
    never roots themselves.
    """
    lead = p[-1]
    bound = Fraction(1) + max(abs(c / lead) for c in p[:-1]) if len(p) > 1 else _ONE
    chain = sturm_chain(p)

    def nroots(lo, hi):
        return _sign_variations(chain, lo) - _sign_variations(chain, hi)

    result: list[RatInterval] = []
    stack = [(-bound, bound, nroots(-bound, bound))]
    while stack:
        lo, hi, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            result.append(RatInterval(lo, hi))
            continue
        mid = (lo + hi) / 2
        kl = nroots(lo, mid)
        stack.append((lo, mid, kl))
        stack.append((mid, hi, k - kl))
    result.sort(key=lambda iv: iv.lo)
    return result


# ---------------------------------------------------------------------------
# scaled rationals  q * sqrt(D)^e


def _exact_isqrt(d: int) -> int | None:
    r = math.isqrt(d)
    return r if r * r == d else None


@dataclass(frozen=True)
class ScaledRational:
    """Exact value q * sqrt(D)^e with rational q and e in {-1, 0, 1}.

    D is the positive discriminant of the ambient field; determinants of
    embedding matrices of field elements always land in Q * sqrt(D).  When D
    is a perfect square the sqrt folds into q and e normalizes to 0.
    """

    q: Fraction
    e: int
    disc: int

    def __post_init__(self):
        assert self.e in (-1, 0, 1)
        assert self.disc > 0
        q = Fraction(self.q)
        e = self.e
        if q == 0:
            e = 0
        elif e != 0:
            s = _exact_isqrt(self.disc)
            if s is not None:
                q = q * s if e == 1 else q / s
                e = 0
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "e", e)

    @classmethod
    def rational(cls, q, disc: int) -> "ScaledRational":
        return cls(Fraction(q), 0, disc)

    def _parts(self) -> tuple[Fraction, Fraction]:
        """(rational part, coefficient of sqrt(D))."""
        if self.e == 0:
            return self.q, _ZERO
        coef = self.q if self.e == 1 else self.q / self.disc
        return _ZERO, coef

    def is_zero(self) -> bool:
        return self.q == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScaledRational):
            return NotImplemented
        a0, a1 = self._parts()
        b0, b1 = other._parts()
        if a1 != 0 or b1 != 0:
            if self.disc != other.disc:
                return False
        return (a0, a1) == (b0, b1)

    def __hash__(self):
        r, c = self._parts()
        return hash((r, c, self.disc if c != 0 else 0))

    def __neg__(self) -> "ScaledRational":
        return ScaledRational(-self.q, self.e, self.disc)

    def __add__(self, other: "ScaledRational") -> "ScaledRational":
        if not isinstance(other, ScaledRational):
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.disc != other.disc:
            raise MixedExponents("values over different discriminants")
        if self.e == other.e:
            return ScaledRational(self.q + other.q, self.e, self.disc)
        if self.e != 0 and other.e != 0:
            # q/sqrt(D) == (q/D)*sqrt(D): rewrite in the left operand's form
            q2 = other.q * self.disc if self.e == -1 else other.q / self.disc
            return ScaledRational(self.q + q2, self.e, self.disc)
        raise MixedExponents(
            f"cannot add exponents {self.e} and {other.e} exactly"
        )

    def __sub__(self, other: "ScaledRational") -> "ScaledRational":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ScaledRational):
            if self.disc != other.disc and not (self.is_zero() or other.is_zero()):
                raise MixedExponents("values over different discriminants")
            e = self.e + other.e
            q = self.q * other.q
            if e == 2:
                return ScaledRational(q * self.disc, 0, self.disc)
            if e == -2:
                return ScaledRational(q / self.disc, 0, self.disc)
            return ScaledRational(q, e, self.disc)
        return ScaledRational(self.q * Fraction(other), self.e, self.disc)

    __rmul__ = __mul__

    def inverse(self) -> "ScaledRational":
        if self.q == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.e == 0:
            return ScaledRational(1 / self.q, 0, self.disc)
        if self.e == 1:  # 1/(q sqrt(D)) = (1/(qD)) sqrt(D)
            return ScaledRational(1 / (self.q * self.disc), 1, self.disc)
        # 1/(q/sqrt(D)) = (1/q) sqrt(D)
        return ScaledRational(1 / self.q, 1, self.disc)

    def __truediv__(self, other):
        if isinstance(other, ScaledRational):
            return self * other.inverse()
        return ScaledRational(self.q / Fraction(other), self.e, self.disc)

    def with_exponent(self, e: int) -> "ScaledRational":
        """Equal value rewritten with the requested exponent when possible."""
        if self.e == e or self.is_zero() or _exact_isqrt(self.disc) is not None:
            return self
        if {self.e, e} == {-1, 1}:
            q = self.q * self.disc if e == -1 else self.q / self.disc
            return ScaledRational(q, e, self.disc)
        raise MixedExponents(f"cannot rewrite exponent {self.e} as {e}")

    def to_mpf(self, prec_bits: int = 128):
        import mpmath

        with mpmath.workprec(prec_bits):
            val = mpmath.mpf(self.q.numerator) / self.q.denominator
            if self.e == 1:
                val *= mpmath.sqrt(self.disc)
            elif self.e == -1:
                val /= mpmath.sqrt(self.disc)
            return +val

    def __float__(self) -> float:
        return float(self.to_mpf(64))

    def exact_str(self) -> str:
        if self.e == 0:
            return str(self.q)
        if self.e == 1:
            return f"{self.q}√{self.disc}"
        return f"{self.q}/√{self.disc}"

    def __repr__(self):
        return f"ScaledRational({self.exact_str()})"


# ---------------------------------------------------------------------------
# the field and its elements


class FieldElement:
    """Element of a totally real field in power-basis coordinates."""

    __slots__ = ("field", "coords")

    def __init__(self, field: "TotallyRealField", coords: Iterable):
        self.field = field
        c = tuple(Fraction(v) for v in coords)
        assert len(c) == field.degree
        self.coords = c

    # -- ring structure ------------------------------------------------------

    def _coerce(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, (a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, (-a for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, (a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return FieldElement(self.field, (a * q for a in self.coords))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._multiply(self, o)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return self.field._invert(self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return FieldElement(self.field, (a / q for a in self.coords))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    # -- invariants ------------------------------------------------------------

    def trace(self) -> Fraction:
        return sum(c * p for c, p in zip(self.coords, self.field.power_traces))

    def norm(self) -> Fraction:
        return self.field.norm(self)

    def embeddings(self, prec_bits: int = 30) -> list[RatInterval]:
        return self.field.embed(self, prec_bits)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def rational_value(self) -> Fraction:
        assert self.is_rational()
        return self.coords[0]

    # -- canonical projective / ray keys ---------------------------------------

    def proj_key(self) -> tuple[Fraction, ...]:
        """Canonical representative of the projective point: first nonzero
        coordinate scaled to 1."""
        for c in self.coords:
            if c != 0:
                return tuple(v / c for v in self.coords)
        raise ZeroInput("zero vector has no projective class")

    def ray_key(self) -> tuple[Fraction, ...]:
        """Canonical representative of the ray: positive scaling with first
        nonzero coordinate of absolute value 1."""
        for c in self.coords:
            if c != 0:
                return tuple(v / abs(c) for v in self.coords)
        raise ZeroInput("zero vector spans no ray")

    def __repr__(self):
        return f"FieldElement{self.coords}"


class TotallyRealField:
    """Totally real number field presented by its defining polynomial."""

    def __init__(self, min_poly: Sequence[int]):
        poly = [int(c) for c in min_poly]
        n = len(poly) - 1
        if n < 2 or poly[-1] != 1:
            raise NotIrreducible("defining polynomial must be monic of degree >= 2")
        self.min_poly = tuple(poly)
        self.degree = n
        self._check_irreducible(poly)

        fpoly = [Fraction(c) for c in poly]
        chain = sturm_chain(fpoly)
        lead = fpoly[-1]
        bound = Fraction(1) + max(abs(c / lead) for c in fpoly[:-1])
        total = _sign_variations(chain, -bound) - _sign_variations(chain, bound)
        if total < n:
            raise NotTotallyReal(f"only {total} of {n} roots are real")
        roots = isolate_real_roots(fpoly)
        if len(roots) != n:
            raise DegenerateRoots("could not isolate distinct real roots")
        # refinement chains, one per root, extended lazily
        self._root_chains: list[list[RatInterval]] = [[iv] for iv in roots]

        self._build_tables()

    @staticmethod
    def _check_irreducible(poly: list[int]) -> None:
        import sympy

        x = sympy.Symbol("x")
        expr = sum(c * x**k for k, c in enumerate(poly))
        if not sympy.Poly(expr, x, domain="QQ").is_irreducible:
            raise NotIrreducible(f"{poly} is reducible over the rationals")

    def _build_tables(self) -> None:
        n = self.degree
        # theta^k for k = 0 .. 2n-2, reduced to the power basis
        powers: list[tuple[Fraction, ...]] = []
        cur = [_ZERO] * n
        cur[0] = _ONE
        powers.append(tuple(cur))
        for _ in range(2 * n - 2):
            shifted = [_ZERO] + cur[:]
            if len(shifted) > n:
                top = shifted.pop()
                # theta^n = -(a_0 + a_1 theta + ... + a_{n-1} theta^{n-1})
                shifted = [
                    s - top * Fraction(self.min_poly[i]) for i, s in enumerate(shifted)
                ]
            cur = shifted
            powers.append(tuple(cur))
        self._power_table = powers

        # power sums of the roots via Newton's identities
        a = self.min_poly
        p: list[Fraction] = [Fraction(n)]
        for k in range(1, 2 * n - 1):
            s = _ZERO
            for i in range(1, k):
                if k - i <= n:
                    s += Fraction(a[n - (k - i)]) * p[i]
            if k <= n:
                s += Fraction(k) * Fraction(a[n - k])
            p.append(-s)
        self._power_sums = p
        self.power_traces = tuple(p[k] for k in range(n))

        # trace form on the power basis and the discriminant
        self.trace_matrix = [
            tuple(self._trace_of_power(i + j) for j in range(n)) for i in range(n)
        ]
        disc = linalg.det(self.trace_matrix)
        if disc.denominator != 1 or disc <= 0:
            raise DegenerateRoots(f"discriminant {disc} is not a positive integer")
        self.disc_abs = int(disc)

        self.zero = FieldElement(self, [Fraction(0)] * n)
        self.one = self.from_rational(1)
        self.theta = FieldElement(
            self, [Fraction(1) if i == 1 else Fraction(0) for i in range(n)]
        )

    def _trace_of_power(self, k: int) -> Fraction:
        return self._power_sums[k]

    # -- element constructors ---------------------------------------------------

    def element(self, coords: Iterable) -> FieldElement:
        return FieldElement(self, coords)

    def from_rational(self, q) -> FieldElement:
        coords = [Fraction(q)] + [_ZERO] * (self.degree - 1)
        return FieldElement(self, coords)

    # -- arithmetic backends ------------------------------------------------------

    def _multiply(self, x: FieldElement, y: FieldElement) -> FieldElement:
        n = self.degree
        prod = [_ZERO] * (2 * n - 1)
        for i, a in enumerate(x.coords):
            if a == 0:
                continue
            for j, b in enumerate(y.coords):
                if b != 0:
                    prod[i + j] += a * b
        coords = [_ZERO] * n
        for k, c in enumerate(prod):
            if c != 0:
                for j, t in enumerate(self._power_table[k]):
                    coords[j] += c * t
        return FieldElement(self, coords)

    def mult_matrix(self, x: FieldElement) -> list[tuple[Fraction, ...]]:
        """Matrix of multiplication by x on the power basis (rows = images)."""
        cols = []
        for k in range(self.degree):
            basis_vec = FieldElement(
                self, [_ONE if i == k else _ZERO for i in range(self.degree)]
            )
            cols.append((x * basis_vec).coords)
        return cols

    def norm(self, x: FieldElement) -> Fraction:
        return linalg.det(self.mult_matrix(x))

    def _invert(self, x: FieldElement) -> FieldElement:
        if x.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        rows = list(zip(*self.mult_matrix(x)))  # columns act on coordinates
        e0 = [_ONE] + [_ZERO] * (self.degree - 1)
        sol = linalg.solve_unique(rows, e0)
        return FieldElement(self, sol)

    # -- embeddings and signs ----------------------------------------------------

    def _root_interval(self, place: int, depth: int) -> RatInterval:
        chain = self._root_chains[place]
        while len(chain) <= depth:
            iv = chain[-1]
            mid = iv.midpoint()
            fpoly = [Fraction(c) for c in self.min_poly]
            # the midpoint is rational, hence never a root of an irreducible
            # polynomial of degree >= 2
            if poly_eval(fpoly, iv.lo) * poly_eval(fpoly, mid) < 0:
                chain.append(RatInterval(iv.lo, mid))
            else:
                chain.append(RatInterval(mid, iv.hi))
        return chain[depth]

    def embed_at(self, x: FieldElement, place: int, prec_bits: int) -> RatInterval:
        target = Fraction(1, 2**prec_bits)
        depth = 0
        while True:
            iv = interval_poly_eval(x.coords, self._root_interval(place, depth))
            if iv.width <= target:
                return iv
            depth += 1

    def embed(self, x: FieldElement, prec_bits: int = 30) -> list[RatInterval]:
        return [self.embed_at(x, i, prec_bits) for i in range(self.degree)]

    def sign_at(self, x: FieldElement, place: int) -> int:
        """Exact sign of the embedding of x at the given place."""
        if x.is_zero():
            return 0
        depth = 0
        while True:
            iv = interval_poly_eval(x.coords, self._root_interval(place, depth))
            s = iv.sign()
            if s is not None:
                return s
            depth += 1

    def signs(self, x: FieldElement) -> list[int]:
        return [self.sign_at(x, i) for i in range(self.degree)]

    def __repr__(self):
        return f"TotallyRealField({list(self.min_poly)})"

    def __reduce__(self):
        return (make_field, (self.min_poly,))


@lru_cache(maxsize=None)
def _field_cache(min_poly: tuple[int, ...]) -> TotallyRealField:
    return TotallyRealField(min_poly)


def make_field(min_poly: Sequence[int]) -> TotallyRealField:
    """Construct (or fetch the cached copy of) a totally real field.

    Coefficients are ascending: [c0, c1, ..., 1].
    """
    return _field_cache(tuple(int(c) for c in min_poly))


# ---------------------------------------------------------------------------
# public operations


def trace_pairing(x: FieldElement, y: FieldElement) -> Fraction:
    """Trace form <x, y> = Tr(x*y); equals the dot product of embeddings."""
    return (x * y).trace()


def norm(x: FieldElement) -> Fraction:
    return x.norm()


def is_totally_positive(x: FieldElement) -> bool:
    if x.is_zero():
        raise ZeroInput("total positivity is undefined for 0")
    return all(x.field.sign_at(x, i) > 0 for i in range(x.field.degree))


def embed(x: FieldElement, prec_bits: int = 30) -> list[RatInterval]:
    return x.field.embed(x, prec_bits)


def det_scaled(elements: Sequence[FieldElement]) -> ScaledRational:
    """Determinant of the embedding matrix of n elements, as q*sqrt(D).

    With places ordered by increasing root, the power-basis Vandermonde has
    determinant +sqrt(D), so the sign of q is the orientation of the tuple.
    """
    field = elements[0].field
    assert len(elements) == field.degree
    q = linalg.det([e.coords for e in elements])
    return ScaledRational(q, 1, field.disc_abs)


def min_poly_of(x: FieldElement) -> list[Fraction]:
    """Monic minimal polynomial of x over the rationals, ascending."""
    field = x.field
    rows = []
    power = field.one
    for _ in range(field.degree + 1):
        rows.append(power.coords)
        ker = linalg.kernel(list(zip(*rows)))
        if ker:
            coeffs = list(ker[0])
            lead = next(c for c in reversed(coeffs) if c != 0)
            return [c / lead for c in poly_trim(coeffs)]
        power = power * x
    raise AssertionError("unreachable: degree bound exceeded")


def is_unit(x: FieldElement) -> bool:
    """True when x is an algebraic integer with norm +-1."""
    if x.is_zero():
        return False
    mp = min_poly_of(x)
    if any(c.denominator != 1 for c in mp):
        return False
    return abs(mp[0]) == 1


def limit_pair(eps: FieldElement) -> tuple[frozenset[int], frozenset[int]]:
    """(argmin places, argmax places) of the embeddings of a unit.

    Powers of a totally positive unit converge projectively to the basis
    direction of the largest embedding (and, for negative powers, of the
    smallest); the unit is generic exactly when both sets are singletons.
    Places are numbered from 1.
    """
    field = eps.field
    if not is_unit(eps):
        raise NotAUnit(f"{eps} is not a unit")
    if not is_totally_positive(eps):
        raise NotTotallyPositive(f"{eps} is not totally positive")

    mp = min_poly_of(eps)
    if len(mp) == 2:  # rational, hence +-1; all embeddings equal
        every = frozenset(range(1, field.degree + 1))
        return every, every
    root_ivs = isolate_real_roots(mp)
    # map each place to the unique root of the minimal polynomial it carries
    assignment = []
    for place in range(field.degree):
        depth = 0
        while True:
            iv = interval_poly_eval(eps.coords, field._root_interval(place, depth))
            hits = [k for k, r in enumerate(root_ivs) if not (iv.hi < r.lo or r.hi < iv.lo)]
            if len(hits) == 1:
                assignment.append(hits[0])
                break
            depth += 1
    lo_root = min(assignment)
    hi_root = max(assignment)
    mins = frozenset(i + 1 for i, k in enumerate(assignment) if k == lo_root)
    maxs = frozenset(i + 1 for i, k in enumerate(assignment) if k == hi_root)
    return mins, maxs


def _is_squarefree(d: int) -> bool:
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def fundamental_unit_quadratic(d: int, search_bound: int = 2_000_000) -> FieldElement:
    """Smallest totally positive unit > 1 of the ring of integers of Q(sqrt(d)).

    Brute-force Pell search over the second coordinate; if the fundamental
    unit has norm -1 its square is returned.
    """
    if d < 2 or not _is_squarefree(d):
        raise SearchBoundExceeded(f"d = {d} must be a squarefree integer >= 2")
    field = make_field([-d, 0, 1])
    half_coords = d % 4 == 1  # ring Z[(1+sqrt d)/2]
    for b in range(1, search_bound + 1):
        if half_coords:
            for target in (d * b * b - 4, d * b * b + 4):
                if target <= 0:
                    continue
                a = math.isqrt(target)
                if a * a == target and (a - b * d) % 2 == 0:
                    u = field.element([Fraction(a, 2), Fraction(b, 2)])
                    return u if u.norm() == 1 else u * u
        else:
            for target in (d * b * b - 1, d * b * b + 1):
                a = math.isqrt(target)
                if a * a == target:
                    u = field.element([a, b])
                    return u if u.norm() == 1 else u * u
    raise SearchBoundExceeded(f"no unit found with b <= {search_bound}")


@dataclass(frozen=True)
class UnitGroupData:
    """Generators of a finite-index group of totally positive units."""

    generators: tuple[FieldElement, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if not is_unit(g):
                raise NotAUnit(f"{g} is not a unit")
            if not is_totally_positive(g):
                raise NotTotallyPositive(f"{g} is not totally positive")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def field(self) -> TotallyRealField:
        return self.generators[0].field

    def power_product(self, exponents: Sequence[int]) -> FieldElement:
        result = self.field.one
        for g, a in zip(self.generators, exponents):
            if a:
                result = result * g**a
        return result
