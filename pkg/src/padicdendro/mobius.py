"""Moebius transformations of the projective line over the coefficient field."""

from __future__ import annotations

from .errors import IndeterminateError, InputError
from .fields import FieldSpec
from .padic import PadicNumber, ProjPoint


class Mobius:
    """An invertible map z -> (a*z + b) / (c*z + d)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: PadicNumber, b: PadicNumber, c: PadicNumber, d: PadicNumber):
        field = a.field
        for entry in (b, c, d):
            if entry.field != field:
                raise InputError("matrix entries must share one field")
        det = a * d - b * c
        if det.is_zero():
            raise InputError("singular matrix: a*d - b*c = 0")
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def from_ints(cls, field: FieldSpec, a: int, b: int, c: int, d: int) -> "Mobius":
        f = PadicNumber.from_int
        return cls(f(field, a), f(field, b), f(field, c), f(field, d))

    @classmethod
    def identity(cls, field: FieldSpec) -> "Mobius":
        return cls.from_ints(field, 1, 0, 0, 1)

    @property
    def field(self) -> FieldSpec:
        return self.a.field

    def apply(self, point: ProjPoint) -> ProjPoint:
        if point.is_infinity:
            if self.c.is_zero():
                return ProjPoint.infinity()
            return ProjPoint.of(self.a / self.c)
        z = point.finite()
        try:
            den = self.c * z + self.d
        except IndeterminateError as exc:
            raise IndeterminateError(
                f"c*z + d indistinguishable from 0 under truncation: {exc}"
            ) from exc
        if den.is_zero():
            return ProjPoint.infinity()
        return ProjPoint.of((self.a * z + self.b) / den)

    def __call__(self, point: ProjPoint) -> ProjPoint:
        return self.apply(point)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "Mobius") -> "Mobius":
        """The map self(other(z))."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def proj_equals(self, other: "Mobius") -> bool:
        """Equality as projective maps (entries up to a common scalar)."""
        mine = (self.a, self.b, self.c, self.d)
        theirs = (other.a, other.b, other.c, other.d)
        for i in range(4):
            for j in range(i + 1, 4):
                lhs = mine[i] * theirs[j]
                rhs = mine[j] * theirs[i]
                if not lhs.equals(rhs):
                    return False
        return True

    def __repr__(self):
        return f"Mobius(a={self.a}, b={self.b}, c={self.c}, d={self.d})"


def normalizing_mobius(a: ProjPoint, b: ProjPoint, c: ProjPoint) -> Mobius:
    """The unique map sending the pairwise-distinct triple (a, b, c) to (0, 1, inf)."""
    pts = [a, b, c]
    for i in range(3):
        for j in range(i + 1, 3):
            if pts[i].equals(pts[j]):
                raise InputError("normalizing map needs pairwise distinct points")
    field = None
    for pt in pts:
        if not pt.is_infinity:
            field = pt.finite().field
            break
    if field is None:
        raise InputError("normalizing map needs at least one finite point")
    one = PadicNumber.one(field)
    zero = PadicNumber.zero(field)
    if a.is_infinity:
        # z -> (b - c) / (z - c)
        bv, cv = b.finite(), c.finite()
        return Mobius(zero, bv - cv, one, -cv)
    if b.is_infinity:
        # z -> (z - a) / (z - c)
        av, cv = a.finite(), c.finite()
        return Mobius(one, -av, one, -cv)
    if c.is_infinity:
        # z -> (z - a) / (b - a)
        av, bv = a.finite(), b.finite()
        return Mobius(one, -av, zero, bv - av)
    av, bv, cv = a.finite(), b.finite(), c.finite()
    # z -> ((z - a)(b - c)) / ((z - c)(b - a))
    bc = bv - cv
    ba = bv - av
    return Mobius(bc, -av * bc, ba, -cv * ba)


def cross_ratio(a: ProjPoint, b: ProjPoint, c: ProjPoint, d: ProjPoint) -> ProjPoint:
    """Image of d under the map normalizing (a, b, c) to (0, 1, inf)."""
    return normalizing_mobius(a, b, c).apply(d)
