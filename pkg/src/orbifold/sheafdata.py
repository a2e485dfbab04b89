"""Combinatorial data of equivariant sheaves of rank 1 and 2.

Rank-1 sheaves on the surface are encoded by quadruples (B1..B4) of chart
gradings; rank-2 indecomposables by a gauge-fixed pair (B1, B2), four
filtration jumps (L1..L4), and an incidence pattern of the four flag points
on the fiber line.  This module provides the translations between those
codes and geometric invariants (first Chern class, fine gradings, modified
Euler characteristic), the slope-stability predicates, and the bookkeeping
used by the series engines: exponent formulas, Euler weights of incidence
strata, and partition-coded rank-1 quotients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple, Union

from .geometry import (
    HirzebruchParams,
    PicClass,
    modified_euler_characteristic,
)

__all__ = [
    "EquivLineBundle",
    "Rank2Datum",
    "PartitionQuadruple",
    "underlying_c1",
    "fine_gradings",
    "gauge_fix",
    "stability_check",
    "euler_weight",
    "all_incidence_types",
    "incidence_chi_correction",
    "f_exponent",
    "rank2_chi_exponent",
    "rank2_c1_chi",
    "rank1_quotient_chi",
    "tensor_shift",
]

ClassLike = Union[PicClass, Tuple[int, int]]


def _mn(cls: ClassLike) -> Tuple[int, int]:
    if isinstance(cls, PicClass):
        return cls.m, cls.n
    m, n = cls
    return int(m), int(n)


@dataclass(frozen=True)
class EquivLineBundle:
    """Equivariant line bundle encoded by its four chart gradings."""

    b1: int
    b2: int
    b3: int
    b4: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.b1, self.b2, self.b3, self.b4)


def underlying_c1(bundle: EquivLineBundle, params: HirzebruchParams) -> PicClass:
    """First Chern class of the underlying line bundle.

    >>> from orbifold.geometry import derive_params
    >>> underlying_c1(EquivLineBundle(1, 0, 0, 0), derive_params(2, 3, 1))
    PicClass(m=-1, n=0)
    """
    r = params.r
    return PicClass(-bundle.b1 - bundle.b3 - r * bundle.b4,
                    -bundle.b2 - bundle.b4)


def fine_gradings(bundle: EquivLineBundle,
                  params: HirzebruchParams) -> Tuple[int, int, int, int]:
    """Box-summand residues of the bundle on the four charts."""
    a, b, r = params.a, params.b, params.r
    left = bundle.b1 + bundle.b3 - r * bundle.b2
    right = bundle.b1 + bundle.b3 + r * bundle.b4
    return (left % b, left % a, right % a, right % b)


def gauge_fix(bundle: EquivLineBundle,
              params: HirzebruchParams) -> EquivLineBundle:
    """Tensor away the third and fourth gradings; idempotent, c1-preserving."""
    r = params.r
    return EquivLineBundle(bundle.b1 + bundle.b3 + r * bundle.b4,
                           bundle.b2 + bundle.b4, 0, 0)


# incidence patterns: the flag points P1..P4 all distinct with every jump
# positive (type1), one vanishing jump (type2), or one coinciding pair with
# all jumps positive (type3); 1 + 4 + 6 = 11 patterns in total
Incidence = Tuple


def all_incidence_types() -> Tuple[Incidence, ...]:
    out = [("type1",)]
    out.extend(("type2", i) for i in range(1, 5))
    out.extend(("type3", i, j) for i in range(1, 5) for j in range(i + 1, 5))
    return tuple(out)


_ADJACENT = (frozenset((1, 2)), frozenset((2, 3)),
             frozenset((3, 4)), frozenset((4, 1)))


def _check_incidence(incidence: Incidence) -> Incidence:
    if not incidence or incidence[0] not in ("type1", "type2", "type3"):
        raise ValueError("unknown incidence %r" % (incidence,))
    kind = incidence[0]
    if kind == "type1":
        if len(incidence) != 1:
            raise ValueError("type1 takes no index")
        return ("type1",)
    if kind == "type2":
        if len(incidence) != 2 or incidence[1] not in (1, 2, 3, 4):
            raise ValueError("type2 needs one corner index")
        return ("type2", int(incidence[1]))
    if len(incidence) != 3:
        raise ValueError("type3 needs a pair of corner indices")
    i, j = sorted((int(incidence[1]), int(incidence[2])))
    if not (1 <= i < j <= 4):
        raise ValueError("type3 pair must be two distinct corners")
    return ("type3", i, j)


@dataclass(frozen=True)
class Rank2Datum:
    """Gauge-fixed combinatorial datum of an indecomposable rank-2 sheaf.

    lam holds the four filtration jumps; the positivity pattern must match
    the incidence type (a type2 datum has exactly the named jump zero).
    Divisibility of the jumps by the chart orders depends on the surface and
    is checked by the operations that take params.
    """

    b1: int
    b2: int
    lam: Tuple[int, int, int, int]
    incidence: Incidence = ("type1",)

    def __post_init__(self):
        lam = tuple(int(x) for x in self.lam)
        if len(lam) != 4 or min(lam) < 0:
            raise ValueError("lam must be four nonnegative integers")
        incidence = _check_incidence(self.incidence)
        kind = incidence[0]
        if kind == "type2":
            zero = incidence[1] - 1
            if lam[zero] != 0:
                raise ValueError("type2 datum needs its named jump zero")
            if min(lam[k] for k in range(4) if k != zero) <= 0:
                raise ValueError("type2 datum needs the other jumps positive")
        elif min(lam) <= 0:
            raise ValueError("%s datum needs all jumps positive" % kind)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "incidence", incidence)

    @classmethod
    def from_bundle(cls, bundle: EquivLineBundle, params: HirzebruchParams,
                    lam: Sequence[int],
                    incidence: Incidence = ("type1",)) -> "Rank2Datum":
        """Build from an arbitrary quadruple, gauge-fixing it first."""
        fixed = gauge_fix(bundle, params)
        return cls(fixed.b1, fixed.b2, tuple(lam), incidence)


def _require_divisibility(lam: Sequence[int], params: HirzebruchParams):
    if lam[0] % params.a != 0:
        raise ValueError("first jump must be divisible by a")
    if lam[2] % params.b != 0:
        raise ValueError("third jump must be divisible by b")


def _weights(lam: Sequence[int], params: HirzebruchParams) -> Tuple[int, ...]:
    pq = params.p * params.q
    return (lam[0], pq * lam[1], lam[2], (params.r + pq) * lam[3])


def stability_check(datum: Rank2Datum, params: HirzebruchParams) -> bool:
    """Slope stability of the datum, by its type's strict inequalities.

    With weights (L1, pq L2, L3, (r+pq) L4): type1 requires each weight to
    be less than the sum of the other three; type2 drops the vanishing
    corner and requires the triangle inequalities on the remaining three;
    type3 fuses the coinciding pair into one weight and requires the
    triangle inequalities on the resulting three.
    """
    _require_divisibility(datum.lam, params)
    w = _weights(datum.lam, params)
    kind = datum.incidence[0]
    if kind == "type1":
        total = sum(w)
        return all(2 * wi < total for wi in w)
    if kind == "type2":
        keep = [w[k] for k in range(4) if k != datum.incidence[1] - 1]
    else:
        i, j = datum.incidence[1] - 1, datum.incidence[2] - 1
        keep = [w[i] + w[j]] + [w[k] for k in range(4) if k not in (i, j)]
    total = sum(keep)
    return all(2 * wi < total for wi in keep)


def euler_weight(incidence: Incidence) -> int:
    """Euler characteristic of the incidence stratum modulo SL(2)."""
    kind = _check_incidence(incidence)[0]
    return -1 if kind == "type1" else 1


def incidence_chi_correction(incidence: Incidence,
                             lam: Sequence[int]) -> int:
    """Corner product restored when an adjacent pair of flag points merges.

    Only adjacent pairs carry a correction; the two diagonal coincidences
    leave the Euler characteristic untouched.
    """
    incidence = _check_incidence(incidence)
    if incidence[0] != "type3":
        return 0
    i, j = incidence[1], incidence[2]
    if frozenset((i, j)) not in _ADJACENT:
        return 0
    return lam[i - 1] * lam[j - 1]


def f_exponent(params: HirzebruchParams, m: int, n: int) -> Fraction:
    """Base exponent f(m, n) of the rank-2 series for first Chern class (m, n)."""
    C, r = params.C, params.r
    return (Fraction(C - r, 2) * n + C + m + Fraction(m * n, 2)
            - Fraction(n * n * r, 4))


def rank2_chi_exponent(params: HirzebruchParams, cls: ClassLike,
                       lam: Sequence[int]) -> Fraction:
    """Modified Euler characteristic exponent before incidence corrections."""
    m, n = _mn(cls)
    l1, l2, l3, l4 = (int(x) for x in lam)
    r = params.r
    inner = l1 + Fraction(r, 2) * l2 + l3 - Fraction(r, 2) * l4
    return f_exponent(params, m, n) - Fraction(l2 + l4, 2) * inner


def rank2_c1_chi(datum: Rank2Datum,
                 params: HirzebruchParams) -> Tuple[PicClass, int]:
    """First Chern class and modified Euler characteristic of the datum."""
    _require_divisibility(datum.lam, params)
    l1, l2, l3, l4 = datum.lam
    r = params.r
    c1 = PicClass(-(2 * datum.b1 + l1 + l3 + l4 * r),
                  -(2 * datum.b2 + l2 + l4))
    chi = rank2_chi_exponent(params, c1, datum.lam)
    chi += incidence_chi_correction(datum.incidence, datum.lam)
    if chi.denominator != 1:
        raise ArithmeticError("rank-2 Euler characteristic came out "
                              "non-integral: %s" % chi)
    return c1, int(chi)


@dataclass(frozen=True)
class PartitionQuadruple:
    """Four integer partitions coding a torsion-free subsheaf of a hull."""

    p1: Tuple[int, ...] = ()
    p2: Tuple[int, ...] = ()
    p3: Tuple[int, ...] = ()
    p4: Tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("p1", "p2", "p3", "p4"):
            part = tuple(int(x) for x in getattr(self, name))
            if any(x <= 0 for x in part):
                raise ValueError("partition parts must be positive")
            if any(part[i] < part[i + 1] for i in range(len(part) - 1)):
                raise ValueError("partition parts must be weakly decreasing")
            object.__setattr__(self, name, part)

    def sizes(self) -> Tuple[int, int, int, int]:
        return (sum(self.p1), sum(self.p2), sum(self.p3), sum(self.p4))


def rank1_quotient_chi(hull: ClassLike, quad: PartitionQuadruple,
                       params: HirzebruchParams) -> int:
    """Modified Euler characteristic of the subsheaf cut out by the quadruple.

    Each cell in the first or fourth partition costs a, each cell in the
    second or third costs b.
    """
    s1, s2, s3, s4 = quad.sizes()
    base = modified_euler_characteristic(params, _mn(hull))
    return base - params.a * (s1 + s4) - params.b * (s2 + s3)


def tensor_shift(i: int, j: int, cls: ClassLike,
                 params: HirzebruchParams) -> int:
    """Exponent shift g(i, j) of the series when the class moves by (i, j)."""
    m, n = _mn(cls)
    a, b, r = params.a, params.b, params.r
    return (i * (2 + n + 2 * j)
            + j * (a * b + a + b - 1 - r + m - n * r - r * j))
