"""Exact mod-2 characteristic class arithmetic on torus cohomology.

The ring H^*(T^d; Z/2) is an exterior algebra on degree-1 generators
e_1 .. e_d. Classes are stored as bit vectors over the monomial basis in a
fixed lexicographic order, so every identity here is checked bit for bit
with no floating point anywhere.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from math import comb
from typing import List, Optional, Sequence, Tuple, Union

from .errors import MissingEuler

EulerData = Union[int, Tuple[int, ...], None]


def _monomials(d: int, degree: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations(range(d), degree))


@dataclass(frozen=True)
class Z2Class:
    """Homogeneous cohomology class with Z/2 coefficients on T^d.

    Attributes
    ----------
    d : int
        Torus dimension, 2 or 3.
    degree : int
        Cohomological degree, 0 through 3.
    bits : tuple of int
        Coefficients over the monomial basis of that degree, in
        lexicographic order of index sets. Length is comb(d, degree).
    """

    d: int
    degree: int
    bits: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.d not in (2, 3):
            raise ValueError("torus dimension must be 2 or 3")
        if not 0 <= self.degree <= 3:
            raise ValueError("degree must lie in 0..3")
        expected = comb(self.d, self.degree)
        if len(self.bits) != expected:
            raise ValueError(f"degree {self.degree} on T^{self.d} needs {expected} bits")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("coefficients must be 0 or 1")

    @staticmethod
    def zero(d: int, degree: int) -> "Z2Class":
        return Z2Class(d, degree, (0,) * comb(d, degree))

    @staticmethod
    def generator(d: int, i: int) -> "Z2Class":
        """The degree-1 generator e_i, with i counted from 1."""
        if not 1 <= i <= d:
            raise ValueError("generator index out of range")
        bits = [0] * d
        bits[i - 1] = 1
        return Z2Class(d, 1, tuple(bits))

    @staticmethod
    def from_bits(d: int, degree: int, bits: Sequence[int]) -> "Z2Class":
        return Z2Class(d, degree, tuple(int(b) % 2 for b in bits))

    @property
    def is_zero(self) -> bool:
        return not any(self.bits)

    def __add__(self, other: "Z2Class") -> "Z2Class":
        if (self.d, self.degree) != (other.d, other.degree):
            raise ValueError("can only add classes of equal dimension and degree")
        return Z2Class(self.d, self.degree, tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def cup(self, other: "Z2Class") -> "Z2Class":
        """Cup product. Monomials sharing a generator multiply to zero."""
        if self.d != other.d:
            raise ValueError("classes live on different tori")
        deg = self.degree + other.degree
        if deg > 3:
            deg = 3
        out_basis = _monomials(self.d, deg)
        out_bits = [0] * len(out_basis)
        mono_a = _monomials(self.d, self.degree)
        mono_b = _monomials(self.d, other.degree)
        for ia, ma in enumerate(mono_a):
            if not self.bits[ia]:
                continue
            for ib, mb in enumerate(mono_b):
                if not other.bits[ib]:
                    continue
                if set(ma) & set(mb):
                    continue
                merged = tuple(sorted(ma + mb))
                if len(merged) != deg:
                    continue
                out_bits[out_basis.index(merged)] ^= 1
        return Z2Class(self.d, deg, tuple(out_bits))

    def scale(self, n: int) -> "Z2Class":
        """Multiply by an integer, which mod 2 either keeps or kills the class."""
        if n % 2 == 0:
            return Z2Class.zero(self.d, self.degree)
        return self

    def __str__(self) -> str:
        return format_z2(self)


def format_z2(cls: Z2Class) -> str:
    """Render a class as text, e.g. ``e1*e2+e2*e3``, or ``0`` when zero."""
    if cls.is_zero:
        return "0"
    if cls.degree == 0:
        return "1"
    terms = []
    for bit, mono in zip(cls.bits, _monomials(cls.d, cls.degree)):
        if bit:
            terms.append("*".join(f"e{i + 1}" for i in mono))
    return "+".join(terms)


def parse_z2(text: str, d: int, degree: Optional[int] = None) -> Z2Class:
    """Parse class text like ``e1*e2+e2*e3``.

    The degree is inferred from the first monomial; pass it explicitly for
    the zero class, whose text carries no degree information.
    """
    text = text.replace(" ", "")
    if text in ("0", ""):
        if degree is None:
            raise ValueError("zero class text needs an explicit degree")
        return Z2Class.zero(d, degree)
    if text == "1":
        return Z2Class(d, 0, (1,))
    bits: Optional[List[int]] = None
    deg = degree
    for term in text.split("+"):
        factors = term.split("*")
        idx = []
        for f in factors:
            m = re.fullmatch(r"e([1-9])", f)
            if not m:
                raise ValueError(f"bad generator token {f!r}")
            idx.append(int(m.group(1)) - 1)
        mono = tuple(sorted(idx))
        if len(set(mono)) != len(mono):
            continue  # repeated generator squares to zero
        if deg is None:
            deg = len(mono)
        if len(mono) != deg:
            raise ValueError("mixed degrees in class text")
        if max(mono) >= d:
            raise ValueError(f"generator e{max(mono) + 1} does not exist on T^{d}")
        basis = _monomials(d, deg)
        if bits is None:
            bits = [0] * len(basis)
        bits[basis.index(mono)] ^= 1
    if deg is None or bits is None:
        if degree is None:
            raise ValueError("zero class text needs an explicit degree")
        return Z2Class.zero(d, degree)
    return Z2Class(d, deg, tuple(bits))


@dataclass(frozen=True)
class TotalSW:
    """Total Stiefel-Whitney data of a real bundle, truncated above degree 2.

    Attributes
    ----------
    rank : int
        Fiber dimension of the bundle.
    w1 : Z2Class
        First class, degree 1. Zero exactly when the bundle is orientable.
    w2 : Z2Class
        Second class, degree 2.
    """

    rank: int
    w1: Z2Class
    w2: Z2Class

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if self.w1.degree != 1 or self.w2.degree != 2:
            raise ValueError("w1 must have degree 1 and w2 degree 2")
        if self.w1.d != self.w2.d:
            raise ValueError("w1 and w2 live on different tori")

    @property
    def d(self) -> int:
        return self.w1.d

    @staticmethod
    def trivial(d: int, rank: int) -> "TotalSW":
        return TotalSW(rank, Z2Class.zero(d, 1), Z2Class.zero(d, 2))

    @staticmethod
    def line(c: Z2Class) -> "TotalSW":
        """The real line bundle with holonomy class c."""
        if c.degree != 1:
            raise ValueError("a line is classified by a degree-1 class")
        return TotalSW(1, c, Z2Class.zero(c.d, 2))


def sw_product(a: TotalSW, b: TotalSW) -> TotalSW:
    """Whitney sum formula for total classes, exact through degree 2."""
    return TotalSW(
        a.rank + b.rank,
        a.w1 + b.w1,
        a.w2 + b.w2 + a.w1.cup(b.w1),
    )


def sw_total(factors: Sequence[TotalSW]) -> TotalSW:
    """Product of several total classes, left to right."""
    if not factors:
        raise ValueError("empty product")
    out = factors[0]
    for f in factors[1:]:
        out = sw_product(out, f)
    return out


def sw_tensor_line(t: TotalSW, c: Z2Class) -> TotalSW:
    """Classes of E tensor L_c in terms of those of E.

    The first class shifts by rank copies of c and the second picks up
    (rank - 1) cross terms; the c cup c contribution dies on a torus.
    Applying the map twice with the same c is the identity.
    """
    if c.degree != 1:
        raise ValueError("tensor twist must be a degree-1 class")
    w1 = t.w1 + c.scale(t.rank)
    w2 = t.w2 + c.cup(t.w1).scale(t.rank - 1)
    return TotalSW(t.rank, w1, w2)


@dataclass(frozen=True)
class DecompositionPlan:
    """Verdict on splitting a bundle into real line bundles.

    Attributes
    ----------
    rank : int
        Rank of the bundle being decomposed.
    verdict : str
        Either ``"splits"`` or ``"obstructed"``.
    centers : list of Z2Class or None
        Holonomy classes of the planned line summands when the verdict is
        ``"splits"``. Their Whitney product reproduces the input classes.
    euler : int or tuple or None
        The obstruction value blocking an oriented rank-2 split. None when
        the verdict is ``"splits"`` or when no integer invariant certifies
        the obstruction.
    """

    rank: int
    verdict: str
    centers: Optional[List[Z2Class]] = field(default=None)
    euler: EulerData = field(default=None)

    @property
    def splits(self) -> bool:
        return self.verdict == "splits"


def _degree1_classes(d: int) -> List[Z2Class]:
    out = []
    for bits in itertools.product((0, 1), repeat=d):
        out.append(Z2Class(d, 1, bits))
    return out


def _factor_degree2(w2: Z2Class) -> Tuple[Z2Class, Z2Class]:
    """Write a degree-2 class as x cup y; always possible on T^2 and T^3."""
    ones = _degree1_classes(w2.d)
    for x in ones:
        for y in ones:
            if x.cup(y) == w2:
                return x, y
    raise ArithmeticError("degree-2 class admits no product factorization")


def _euler_nonzero(euler: EulerData) -> bool:
    if euler is None:
        return False
    if isinstance(euler, tuple):
        return any(int(v) != 0 for v in euler)
    return int(euler) != 0


def plan_decomposition(
    rank: int,
    w1: Z2Class,
    w2: Z2Class,
    euler: EulerData = None,
    d: Optional[int] = None,
) -> DecompositionPlan:
    """Decide whether classes (w1, w2) allow a sum of real line bundles.

    Rank at least 3 always splits on these tori and the centers are written
    down explicitly. Rank 2 splits when either a pair of degree-1 classes
    realizes the data or, in the orientable case, the Euler number vanishes;
    an oriented rank-2 call without an Euler number cannot be decided and
    raises MissingEuler.
    """
    if d is None:
        d = w1.d
    if w1.d != d or w2.d != d:
        raise ValueError("classes must live on the stated torus")
    if w1.degree != 1 or w2.degree != 2:
        raise ValueError("need degree-1 w1 and degree-2 w2")
    if rank < 1:
        raise ValueError("rank must be positive")

    if rank == 1:
        if not w2.is_zero:
            raise ValueError("a line bundle has no second class")
        return DecompositionPlan(1, "splits", [w1])

    if rank == 2:
        if w1.is_zero:
            if euler is None:
                raise MissingEuler("oriented rank-2 verdict needs the Euler number")
            _check_euler_consistency(w2, euler)
            if _euler_nonzero(euler):
                return DecompositionPlan(2, "obstructed", None, euler)
            zero1 = Z2Class.zero(d, 1)
            return DecompositionPlan(2, "splits", [zero1, zero1])
        for c1 in _degree1_classes(d):
            c2 = w1 + c1
            if c1.cup(c2) == w2:
                return DecompositionPlan(2, "splits", [c1, c2])
        # No pair of lines realizes the data; no integer invariant names it.
        return DecompositionPlan(2, "obstructed", None, None)

    x, y = _factor_degree2(w2)
    base = [x, y, x + y]
    zero1 = Z2Class.zero(d, 1)
    if w1.is_zero:
        centers = base + [zero1] * (rank - 3)
    elif rank % 2 == 1:
        centers = [t + w1 for t in base] + [w1] * (rank - 3)
    else:
        centers = base + [zero1] * (rank - 4) + [w1]
    return DecompositionPlan(rank, "splits", centers)


def _check_euler_consistency(w2: Z2Class, euler: EulerData) -> None:
    """The mod-2 reduction of the Euler data must reproduce w2."""
    d = w2.d
    if isinstance(euler, tuple):
        if len(euler) != comb(d, 2):
            raise ValueError("per-plane Euler tuple has the wrong length")
        reduced = Z2Class(d, 2, tuple(int(v) % 2 for v in euler))
    else:
        if d != 2:
            raise ValueError("scalar Euler number only makes sense on T^2")
        reduced = Z2Class(d, 2, (int(euler) % 2,))
    if reduced != w2:
        raise ValueError("Euler data contradicts w2 mod 2")


def plan_product(plan: DecompositionPlan) -> TotalSW:
    """Whitney product of a splitting plan's lines, for soundness checks."""
    if not plan.splits or plan.centers is None:
        raise ValueError("only a splitting plan has a product")
    return sw_total([TotalSW.line(c) for c in plan.centers])


def complex_normal_form(rank: int, c1: EulerData) -> List[EulerData]:
    """Line decomposition of a rank-r complex bundle with first Chern data c1.

    Complex bundles on these tori are classified by rank and c1, so the
    bundle splits as r - 1 trivial lines plus a single line carrying all of
    c1. Returns the per-line Chern data in that order.
    """
    if rank < 1:
        raise ValueError("rank must be positive")
    zero: EulerData
    if isinstance(c1, tuple):
        zero = tuple(0 for _ in c1)
    else:
        zero = 0
        c1 = int(c1)
    return [zero] * (rank - 1) + [c1]
