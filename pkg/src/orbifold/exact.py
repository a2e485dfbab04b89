"""Exact arithmetic kernels shared by the whole package.

Three small algebra layers live here:

* ``RatPoly``: dense univariate polynomials over Q, used for Hilbert
  polynomials in the auxiliary variable T.
* ``Cyclotomic``: elements of Q(zeta_n) stored as coefficient vectors modulo
  the n-th cyclotomic polynomial.  Root-of-unity sums in the Riemann-Roch
  formulas are evaluated in these fields and certified rational at the end;
  nothing is ever approximated by floats.
* ``HalfExpLaurent``: truncated Laurent series in descending powers of q
  whose exponents may be half-integers.  Exponents are keyed by their
  doubles, so every key is an ordinary int.  Each series carries the cutoff
  ``min2exp`` below which its coefficients are unknown, and multiplication
  shrinks the sound window accordingly instead of silently producing
  contaminated coefficients.

All coefficients are ``fractions.Fraction``; ``Rational`` is an alias for it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Tuple, Union

Rational = Fraction
RationalLike = Union[int, Fraction]

__all__ = [
    "Rational",
    "RatPoly",
    "Cyclotomic",
    "HalfExpLaurent",
    "cyclotomic_poly",
    "cyc_inverse",
    "rational_part",
    "laurent_mul",
    "geometric_factor",
    "monomial",
]


# ---------------------------------------------------------------------------
# dense polynomial helpers (little-endian coefficient lists over Fraction)


def _trim(coeffs):
    i = len(coeffs)
    while i > 0 and coeffs[i - 1] == 0:
        i -= 1
    return coeffs[:i]


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _trim(out)


def _poly_divmod(a, b):
    """Quotient and remainder of a by b over Q.  b must be nonzero."""
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(x) for x in a]
    rem = _trim(rem)
    db = len(b) - 1
    lead = b[-1]
    quot = [Fraction(0)] * max(len(rem) - db, 0)
    while len(rem) - 1 >= db and rem:
        shift = len(rem) - 1 - db
        factor = rem[-1] / lead
        quot[shift] = factor
        for i, bi in enumerate(b):
            rem[shift + i] -= factor * bi
        rem = _trim(rem)
    return _trim(quot), rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> Tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest first.

    Computed by dividing x^n - 1 by the cyclotomic polynomials of the proper
    divisors of n; the division is exact over Z.

    >>> cyclotomic_poly(1)
    (-1, 1)
    >>> cyclotomic_poly(2)
    (1, 1)
    >>> cyclotomic_poly(12)
    (1, 0, -1, 0, 1)
    """
    if n < 1:
        raise ValueError("order must be a positive integer")
    num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    den = [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            den = _poly_mul(den, [Fraction(c) for c in cyclotomic_poly(d)])
    quot, rem = _poly_divmod(num, den)
    if rem:
        raise AssertionError("cyclotomic division left a remainder")
    out = []
    for c in quot:
        if c.denominator != 1:
            raise AssertionError("cyclotomic polynomial not integral")
        out.append(int(c))
    return tuple(out)


def _phi_degree(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


# ---------------------------------------------------------------------------
# cyclotomic field elements


@dataclass(frozen=True)
class Cyclotomic:
    """An element of Q(zeta_n), reduced modulo the n-th cyclotomic polynomial.

    ``coeffs`` has length phi(n) and represents sum(coeffs[i] * zeta_n^i).
    Elements of different orders never mix; callers pick one field per sum.
    """

    order: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        if len(self.coeffs) != _phi_degree(self.order):
            raise ValueError("coefficient vector has wrong length")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, order: int, value: RationalLike) -> "Cyclotomic":
        deg = _phi_degree(order)
        coeffs = [Fraction(value)] + [Fraction(0)] * (deg - 1)
        return cls(order, tuple(coeffs))

    @classmethod
    def zero(cls, order: int) -> "Cyclotomic":
        return cls.from_rational(order, 0)

    @classmethod
    def one(cls, order: int) -> "Cyclotomic":
        return cls.from_rational(order, 1)

    @classmethod
    def root_power(cls, order: int, k: int) -> "Cyclotomic":
        """zeta_order^k as a field element; k may be any integer.

        >>> Cyclotomic.root_power(4, 2) == Cyclotomic.from_rational(4, -1)
        True
        """
        return _root_power(order, k % order)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Cyclotomic"):
        if self.order != other.order:
            raise ValueError("cyclotomic orders differ")

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        return Cyclotomic(
            self.order,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return Cyclotomic(self.order, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return Cyclotomic(self.order, tuple(a * f for a in self.coeffs))
        self._check(other)
        prod = _poly_mul(list(self.coeffs), list(other.coeffs))
        return Cyclotomic(self.order, _reduce_mod_phi(self.order, prod))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            if f == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / f)
        return self * other.inverse()

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            return other
        return Cyclotomic.from_rational(self.order, other)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def inverse(self) -> "Cyclotomic":
        """Multiplicative inverse via the extended Euclidean algorithm.

        Q[x]/Phi_n is a field, so every nonzero element is invertible.
        """
        if self.is_zero:
            raise ZeroDivisionError("zero has no inverse")
        phi = [Fraction(c) for c in cyclotomic_poly(self.order)]
        # invariants: r0 = s0*self + t0*phi, r1 = s1*self + t1*phi
        r0, r1 = _trim(list(self.coeffs)), phi
        s0, s1 = [Fraction(1)], []
        while r1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _trim(
                [
                    (s0[i] if i < len(s0) else Fraction(0)) - c
                    for i, c in enumerate(_pad(_poly_mul(q, s1), len(s0)))
                ]
            )
        if len(r0) != 1:
            raise AssertionError("element not invertible mod Phi_n")
        inv = [c / r0[0] for c in s0]
        return Cyclotomic(self.order, _reduce_mod_phi(self.order, inv))

    def rational_part(self) -> Fraction:
        """The element as a rational number; raises if it is not rational."""
        if any(c != 0 for c in self.coeffs[1:]):
            raise ValueError("element is not rational: %r" % (self,))
        return self.coeffs[0]

    def __repr__(self):
        return "Cyclotomic(order=%d, coeffs=%s)" % (self.order, list(self.coeffs))


def _pad(coeffs, n):
    out = list(coeffs)
    while len(out) < n:
        out.append(Fraction(0))
    return out


def _reduce_mod_phi(order, coeffs) -> Tuple[Fraction, ...]:
    phi = [Fraction(c) for c in cyclotomic_poly(order)]
    _, rem = _poly_divmod(coeffs, phi)
    return tuple(_pad(rem, len(phi) - 1))


@lru_cache(maxsize=None)
def _root_power(order: int, k: int) -> Cyclotomic:
    mono = [Fraction(0)] * k + [Fraction(1)]
    return Cyclotomic(order, _reduce_mod_phi(order, mono))


def cyc_inverse(z: Cyclotomic) -> Cyclotomic:
    return z.inverse()


def rational_part(z) -> Fraction:
    """Certified rational value of a cyclotomic element (or pass a Fraction through)."""
    if isinstance(z, (int, Fraction)):
        return Fraction(z)
    return z.rational_part()


# ---------------------------------------------------------------------------
# rational polynomials in one variable


@dataclass(frozen=True)
class RatPoly:
    """Polynomial over Q, coefficients lowest degree first, trailing zeros stripped."""

    coeffs: Tuple[Fraction, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[RationalLike]) -> "RatPoly":
        c = _trim([Fraction(x) for x in coeffs])
        return cls(tuple(c))

    @classmethod
    def zero(cls) -> "RatPoly":
        return cls(())

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __call__(self, x: RationalLike) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * Fraction(x) + c
        return acc

    def __add__(self, other: "RatPoly") -> "RatPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly.from_coeffs(
            [self.coeff(i) + other.coeff(i) for i in range(n)]
        )

    def __sub__(self, other: "RatPoly") -> "RatPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly.from_coeffs(
            [self.coeff(i) - other.coeff(i) for i in range(n)]
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RatPoly.from_coeffs([c * Fraction(other) for c in self.coeffs])
        return RatPoly(tuple(_poly_mul(list(self.coeffs), list(other.coeffs))))

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"coeffs": [_frac_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "RatPoly":
        return cls.from_coeffs([Fraction(s) for s in data["coeffs"]])

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append("%s*T" % c if c != 1 else "T")
            else:
                parts.append("%s*T^%d" % (c, i) if c != 1 else "T^%d" % i)
        return " + ".join(parts).replace("+ -", "- ")


def _frac_str(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


# ---------------------------------------------------------------------------
# truncated Laurent series with half-integer exponents


class HalfExpLaurent:
    """Truncated Laurent series in q with exponents in (1/2)Z.

    Terms are stored as ``{2*exponent: coefficient}``.  ``min2exp`` is the
    doubled cutoff: coefficients at doubled exponents >= min2exp are exact,
    anything lower has been dropped and is unknown.  The high end is always
    exact (truncation only ever discards low-order tail).
    """

    __slots__ = ("min2exp", "_terms")

    def __init__(self, min2exp: int, terms: Union[Mapping[int, RationalLike], Iterable] = ()):
        self.min2exp = int(min2exp)
        data = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e2, c in items:
            e2 = int(e2)
            c = Fraction(c)
            if c == 0 or e2 < self.min2exp:
                continue
            data[e2] = data.get(e2, Fraction(0)) + c
        self._terms = {e: c for e, c in data.items() if c != 0}

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coeff2(self, e2: int) -> Fraction:
        """Coefficient at doubled exponent e2 (must be inside the sound window)."""
        if e2 < self.min2exp:
            raise ValueError("exponent %s/2 is below the sound cutoff" % e2)
        return self._terms.get(e2, Fraction(0))

    def coeff(self, e: RationalLike) -> Fraction:
        e2 = Fraction(e) * 2
        if e2.denominator != 1:
            raise ValueError("exponent must be a half-integer")
        return self.coeff2(int(e2))

    @property
    def max2exp(self):
        """Largest stored doubled exponent, or min2exp for an empty window."""
        return max(self._terms) if self._terms else self.min2exp

    @property
    def is_zero(self) -> bool:
        return not self._terms

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "HalfExpLaurent") -> "HalfExpLaurent":
        lo = max(self.min2exp, other.min2exp)
        merged = dict(self._terms)
        for e, c in other._terms.items():
            merged[e] = merged.get(e, Fraction(0)) + c
        return HalfExpLaurent(lo, merged)

    def __neg__(self):
        return HalfExpLaurent(self.min2exp, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor: RationalLike) -> "HalfExpLaurent":
        f = Fraction(factor)
        return HalfExpLaurent(self.min2exp, {e: c * f for e, c in self._terms.items()})

    def shift2(self, d2: int) -> "HalfExpLaurent":
        """Multiply by q^(d2/2)."""
        return HalfExpLaurent(
            self.min2exp + d2, {e + d2: c for e, c in self._terms.items()}
        )

    def __mul__(self, other: "HalfExpLaurent") -> "HalfExpLaurent":
        # Dropped tail of one factor meets stored terms of the other below
        # min + partner's max; the sound window of the product starts there.
        lo = max(self.min2exp + other.max2exp, other.min2exp + self.max2exp)
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                if e < lo:
                    continue
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return HalfExpLaurent(lo, out)

    def truncate(self, new_min2exp: int) -> "HalfExpLaurent":
        """Restrict to a smaller window; the cutoff can only move up."""
        if new_min2exp < self.min2exp:
            raise ValueError("cannot widen a truncated series")
        return HalfExpLaurent(new_min2exp, self._terms)

    # -- comparisons, serialization, display -------------------------------

    def __eq__(self, other):
        if not isinstance(other, HalfExpLaurent):
            return NotImplemented
        return self.min2exp == other.min2exp and self._terms == other._terms

    def __hash__(self):
        return hash((self.min2exp, tuple(sorted(self._terms.items()))))

    def same_window_coeffs(self, other: "HalfExpLaurent") -> bool:
        """Equality of coefficients on the intersection of sound windows."""
        lo = max(self.min2exp, other.min2exp)
        keys = {e for e in self._terms if e >= lo}
        keys |= {e for e in other._terms if e >= lo}
        return all(
            self._terms.get(e, Fraction(0)) == other._terms.get(e, Fraction(0))
            for e in keys
        )

    def to_json(self) -> dict:
        items = sorted(self._terms.items(), reverse=True)
        return {
            "min2exp": self.min2exp,
            "terms": [{"exp2": e, "coeff": _frac_str(c)} for e, c in items],
            "variable": "q",
        }

    @classmethod
    def from_json(cls, data: dict) -> "HalfExpLaurent":
        return cls(
            int(data["min2exp"]),
            {int(t["exp2"]): Fraction(t["coeff"]) for t in data["terms"]},
        )

    def __str__(self):
        if not self._terms:
            return "0 + O(q^%s)" % _exp_str(self.min2exp)
        parts = []
        for e2 in sorted(self._terms, reverse=True):
            c = self._terms[e2]
            if e2 == 0:
                parts.append(_frac_str(c))
            else:
                cs = "" if c == 1 else ("-" if c == -1 else _frac_str(c) + "*")
                var = "q" if e2 == 2 else "q^%s" % _exp_str(e2)
                parts.append(cs + var)
        body = " + ".join(parts).replace("+ -", "- ")
        return "%s + O(q^%s)" % (body, _exp_str(self.min2exp))

    def __repr__(self):
        return "HalfExpLaurent(min2exp=%d, terms=%r)" % (
            self.min2exp,
            dict(sorted(self._terms.items(), reverse=True)),
        )


def _exp_str(e2: int) -> str:
    if e2 % 2 == 0:
        return str(e2 // 2)
    return "(%d/2)" % e2


def monomial(exp: RationalLike, coeff: RationalLike = 1, min2exp=None) -> HalfExpLaurent:
    """The single-term series coeff * q^exp.

    A lone monomial is exact; its default cutoff sits at its own exponent,
    which keeps products with window-truncated series maximally sound.
    """
    e2 = Fraction(exp) * 2
    if e2.denominator != 1:
        raise ValueError("exponent must be a half-integer")
    e2 = int(e2)
    if min2exp is None:
        min2exp = e2
    return HalfExpLaurent(min2exp, {e2: Fraction(coeff)})


def laurent_mul(a: HalfExpLaurent, b: HalfExpLaurent) -> HalfExpLaurent:
    """Product of two truncated series with the sound-window bookkeeping."""
    return a * b


def geometric_factor(step: RationalLike, power: int, min2exp: int) -> HalfExpLaurent:
    """Expansion of (1 - q^(-step))^(-power) down to the cutoff.

    The coefficient of q^(-step*j) is binomial(j + power - 1, power - 1).

    >>> s = geometric_factor(1, 2, -6)
    >>> [s.coeff(-j) for j in range(4)]
    [Fraction(1, 1), Fraction(2, 1), Fraction(3, 1), Fraction(4, 1)]
    """
    step2 = Fraction(step) * 2
    if step2.denominator != 1 or step2 <= 0:
        raise ValueError("step must be a positive half-integer")
    step2 = int(step2)
    if power < 1:
        raise ValueError("power must be a positive integer")
    terms = {}
    j = 0
    while -step2 * j >= min2exp:
        terms[-step2 * j] = Fraction(math.comb(j + power - 1, power - 1))
        j += 1
    return HalfExpLaurent(min2exp, terms)


def series_to_json_str(series: HalfExpLaurent) -> str:
    return json.dumps(series.to_json(), sort_keys=True)


if __name__ == "__main__":
    import doctest

    doctest.testmod()
