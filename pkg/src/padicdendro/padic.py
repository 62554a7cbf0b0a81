"""Exact scalars: digit expansions over the p-adic coefficient field.

A PadicNumber is a digit expansion sum(a_v * p**v) with residue digits a_v
in F_q.  Values built from digits, integers or rationals additionally keep
an exact coordinate vector over the power basis 1, w, ..., w^(m-1) of the
extension (w a root of the reduction polynomial), so arithmetic on them is
carried out exactly and the digit expansion is merely a view.  Only values
constructed as truncations (``exact=False`` without coordinates) behave as
finite-precision data; combining them tracks absolute precision and raises
IndeterminateError rather than guessing a lost digit.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import FieldMismatchError, IndeterminateError, InputError
from .fields import FieldSpec, parse_field_tag

INF = math.inf


def _vp(x: Fraction, p: int):
    """p-adic valuation of a rational, INF for zero."""
    if x == 0:
        return INF
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _vec_val(coords, p):
    return min((_vp(c, p) for c in coords), default=INF)


def _terminating(coords, p) -> bool:
    """True when every coordinate is n/p^k with integer n >= 0."""
    for c in coords:
        if c < 0:
            return False
        d = c.denominator
        while d % p == 0:
            d //= p
        if d != 1:
            return False
    return True


def _fraction_digit(x: Fraction, p: int) -> int:
    """Residue digit of a rational with nonnegative valuation."""
    num, den = x.numerator, x.denominator
    return (num * pow(den, -1, p)) % p


class _Expander:
    """Streams the digit expansion of a coordinate vector from index v0."""

    def __init__(self, coords, p, v0):
        scale = Fraction(p) ** v0
        self.rem = [c / scale for c in coords]
        self.p = p

    def next_digit_coeffs(self):
        out = []
        for i, x in enumerate(self.rem):
            if x == 0:
                out.append(0)
                continue
            d = _fraction_digit(x, self.p)
            out.append(d)
            self.rem[i] = (x - d) / self.p
        return out

    def done(self):
        return all(x == 0 for x in self.rem)


# -- polynomial helpers over Fraction coefficients (fixed length m) --


def _coords_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _coords_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _coords_neg(a):
    return tuple(-x for x in a)


def _coords_mul(a, b, reduction_poly):
    m = len(a)
    if m == 1:
        return (a[0] * b[0],)
    prod = [Fraction(0)] * (2 * m - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    # reduce by the monic lift of the reduction polynomial
    for deg in range(2 * m - 2, m - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = Fraction(0)
            for i in range(m):
                prod[deg - m + i] -= c * reduction_poly[i]
    return tuple(prod[:m])


def _coords_inv(a, reduction_poly):
    m = len(a)
    if all(c == 0 for c in a):
        raise ZeroDivisionError("division by zero")
    if m == 1:
        return (Fraction(1) / a[0],)
    # extended Euclid in Q[x] modulo the lifted reduction polynomial,
    # which is monic of degree m and irreducible over Q
    f = [Fraction(c) for c in reduction_poly]
    r0 = f
    r1 = _frac_trim([Fraction(c) for c in a])
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _frac_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _frac_sub(s0, _frac_mul(q, s1))
    inv = [c / r0[0] for c in s0]
    inv = inv[:m] + [Fraction(0)] * max(0, m - len(inv))
    return tuple(inv[:m])


def _frac_trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _frac_sub(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] -= x
    return _frac_trim(out)


def _frac_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _frac_trim(out)


def _frac_divmod(a, b):
    a = list(a)
    db = len(b) - 1
    q = [Fraction(0)] * max(len(a) - db, 0)
    while a and len(a) - 1 >= db:
        lead = a[-1] / b[-1]
        shift = len(a) - 1 - db
        q[shift] = lead
        for i, bi in enumerate(b):
            a[shift + i] -= lead * bi
        a.pop()
        _frac_trim(a)
    return _frac_trim(q), _frac_trim(a)


class PadicNumber:
    """One scalar of the coefficient field.

    Attributes: ``field``; ``v0`` (index of the lowest digit); ``digits``
    (residue digits as integers in [0, q), leading digit nonzero); ``exact``
    (True when the stored digits are the complete expansion).
    """

    __slots__ = ("field", "v0", "digits", "exact", "_coords")

    def __init__(self, field: FieldSpec, digits=(), v0: int = 0, exact: bool = True):
        digits = tuple(field.check_digit(d) for d in digits)
        # canonical form: strip leading zeros, exact numbers strip trailing too
        while digits and digits[0] == 0:
            digits = digits[1:]
            v0 += 1
        if exact:
            while digits and digits[-1] == 0:
                digits = digits[:-1]
        if not digits:
            if not exact:
                raise IndeterminateError(
                    "all known digits are zero; value indistinguishable from 0"
                )
            self.field = field
            self.v0 = 0
            self.digits = ()
            self.exact = True
            self._coords = (Fraction(0),) * field.m
            return
        if not exact and len(digits) > field.precision:
            digits = digits[: field.precision]
        self.field = field
        self.v0 = v0
        self.digits = digits
        self.exact = exact
        if exact:
            coords = [Fraction(0)] * field.m
            for k, d in enumerate(digits):
                scale = Fraction(field.p) ** (v0 + k)
                for i, c in enumerate(field.digit_coeffs(d)):
                    if c:
                        coords[i] += c * scale
            self._coords = tuple(coords)
        else:
            self._coords = None

    # -- constructors --

    @classmethod
    def _from_coords(cls, field: FieldSpec, coords) -> "PadicNumber":
        coords = tuple(Fraction(c) for c in coords)
        obj = object.__new__(cls)
        obj.field = field
        obj._coords = coords
        v = _vec_val(coords, field.p)
        if v == INF:
            obj.v0, obj.digits, obj.exact = 0, (), True
            return obj
        obj.v0 = v
        terminating = _terminating(coords, field.p)
        expander = _Expander(coords, field.p, v)
        digits = []
        while not expander.done():
            digits.append(field.coeffs_digit(expander.next_digit_coeffs()))
            if not terminating and len(digits) >= field.precision:
                break
        obj.digits = tuple(digits)
        obj.exact = terminating
        return obj

    @classmethod
    def from_int(cls, field: FieldSpec, n: int) -> "PadicNumber":
        return cls._from_coords(field, (Fraction(n),) + (Fraction(0),) * (field.m - 1))

    @classmethod
    def from_fraction(cls, field: FieldSpec, x) -> "PadicNumber":
        return cls._from_coords(
            field, (Fraction(x),) + (Fraction(0),) * (field.m - 1)
        )

    @classmethod
    def zero(cls, field: FieldSpec) -> "PadicNumber":
        return cls.from_int(field, 0)

    @classmethod
    def one(cls, field: FieldSpec) -> "PadicNumber":
        return cls.from_int(field, 1)

    @classmethod
    def from_digit_positions(cls, field: FieldSpec, placed: dict) -> "PadicNumber":
        """Exact number with prescribed digits at arbitrary indices."""
        if not placed:
            return cls.zero(field)
        lo = min(placed)
        hi = max(placed)
        digits = [placed.get(i, 0) for i in range(lo, hi + 1)]
        return cls(field, digits, v0=lo, exact=True)

    @classmethod
    def _raw_truncated(cls, field, v0, digits) -> "PadicNumber":
        return cls(field, digits, v0=v0, exact=False)

    # -- basic queries --

    def is_zero(self) -> bool:
        return not self.digits and self.exact

    def valuation(self):
        """Exponent v with |x| = q^(-v); INF for zero."""
        if self.is_zero():
            return INF
        return self.v0

    @property
    def abs_precision(self):
        """Index of the first unknown digit (INF when the value is exact)."""
        if self._coords is not None:
            return INF
        return self.v0 + len(self.digits)

    def _rep_coords(self):
        """Exact coordinates of the known-digit representative."""
        if self._coords is not None:
            return self._coords
        coords = [Fraction(0)] * self.field.m
        for k, d in enumerate(self.digits):
            scale = Fraction(self.field.p) ** (self.v0 + k)
            for i, c in enumerate(self.field.digit_coeffs(d)):
                if c:
                    coords[i] += c * scale
        return tuple(coords)

    def as_fraction(self) -> Fraction:
        """Exact rational value; requires m = 1 and exact coordinates."""
        if self._coords is None:
            raise IndeterminateError("value is truncated; no exact rational")
        if any(c != 0 for c in self._coords[1:]):
            raise InputError("value has extension-field components")
        return self._coords[0]

    # -- comparisons --

    def _check_field(self, other: "PadicNumber"):
        if self.field != other.field:
            raise FieldMismatchError(
                f"fields differ: {self.field.tag()} vs {other.field.tag()}"
            )

    def equals(self, other: "PadicNumber") -> bool:
        """Exact equality; raises IndeterminateError when truncation hides it."""
        if not isinstance(other, PadicNumber):
            raise InputError(f"cannot compare PadicNumber with {type(other)!r}")
        if self.field != other.field:
            return False
        if self._coords is not None and other._coords is not None:
            return self._coords == other._coords
        # at least one side is truncated: compare known digit ranges
        bound = min(self.abs_precision, other.abs_precision)
        if self.is_zero() or other.is_zero():
            # a truncated value always has a nonzero known leading digit
            return False
        lo = min(self.v0, other.v0)
        a = _Expander(self._rep_coords(), self.field.p, lo)
        b = _Expander(other._rep_coords(), self.field.p, lo)
        i = lo
        while i < bound:
            if a.next_digit_coeffs() != b.next_digit_coeffs():
                return False
            i += 1
        raise IndeterminateError(
            "truncated values agree on all shared known digits"
        )

    def __eq__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    # -- arithmetic --

    def __neg__(self):
        if self._coords is not None:
            return PadicNumber._from_coords(self.field, _coords_neg(self._coords))
        return _truncated_result(
            self.field, _coords_neg(self._rep_coords()), self.abs_precision
        )

    def __add__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        self._check_field(other)
        if self._coords is not None and other._coords is not None:
            return PadicNumber._from_coords(
                self.field, _coords_add(self._coords, other._coords)
            )
        rep = _coords_add(self._rep_coords(), other._rep_coords())
        return _truncated_result(
            self.field, rep, min(self.abs_precision, other.abs_precision)
        )

    def __sub__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return self.__add__(-other)

    def __mul__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        self._check_field(other)
        poly = self.field.reduction_poly
        if self._coords is not None and other._coords is not None:
            return PadicNumber._from_coords(
                self.field, _coords_mul(self._coords, other._coords, poly)
            )
        if self.is_zero() or other.is_zero():
            return PadicNumber.zero(self.field)
        rep = _coords_mul(self._rep_coords(), other._rep_coords(), poly)
        bound = min(
            self.abs_precision + other.valuation(),
            other.abs_precision + self.valuation(),
        )
        return _truncated_result(self.field, rep, bound)

    def __truediv__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        self._check_field(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero")
        poly = self.field.reduction_poly
        if self._coords is not None and other._coords is not None:
            return PadicNumber._from_coords(
                self.field,
                _coords_mul(self._coords, _coords_inv(other._coords, poly), poly),
            )
        if self.is_zero():
            return PadicNumber.zero(self.field)
        rep = _coords_mul(
            self._rep_coords(), _coords_inv(other._rep_coords(), poly), poly
        )
        vx, vy = self.valuation(), other.valuation()
        bound = min(self.abs_precision - vy, other.abs_precision + vx - 2 * vy)
        return _truncated_result(self.field, rep, bound)

    # -- formatting --

    def __repr__(self):
        return f"PadicNumber({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _truncated_result(field, rep_coords, abs_prec):
    """Build a truncated number for a representative known below abs_prec."""
    v = _vec_val(rep_coords, field.p)
    if v == INF or v >= abs_prec:
        raise IndeterminateError(
            "result valuation reaches the precision floor; digits unknown"
        )
    stop = min(abs_prec, v + field.precision)
    expander = _Expander(rep_coords, field.p, v)
    digits = []
    for _ in range(int(stop - v)):
        digits.append(field.coeffs_digit(expander.next_digit_coeffs()))
    return PadicNumber._raw_truncated(field, v, digits)


def val(x: "PadicNumber"):
    """Valuation of a scalar: integer for nonzero values, INF for zero."""
    return x.valuation()


class ProjPoint:
    """A point of the projective line: a finite scalar or infinity."""

    __slots__ = ("value",)

    def __init__(self, value: PadicNumber | None):
        self.value = value

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(None)

    @classmethod
    def of(cls, value: PadicNumber) -> "ProjPoint":
        return cls(value)

    @classmethod
    def from_int(cls, field: FieldSpec, n: int) -> "ProjPoint":
        return cls(PadicNumber.from_int(field, n))

    @classmethod
    def from_fraction(cls, field: FieldSpec, x) -> "ProjPoint":
        return cls(PadicNumber.from_fraction(field, x))

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def finite(self) -> PadicNumber:
        if self.value is None:
            raise InputError("point at infinity has no finite value")
        return self.value

    def equals(self, other: "ProjPoint") -> bool:
        if not isinstance(other, ProjPoint):
            raise InputError(f"cannot compare ProjPoint with {type(other)!r}")
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.value.equals(other.value)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"ProjPoint({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def format_scalar(x) -> str:
    """Render a scalar in the interchange format ``p^m:v0:d0,d1,...``.

    Infinity prints as ``inf``; a trailing ``~`` marks a truncated value
    whose digits beyond the listed ones are unknown.
    """
    if isinstance(x, ProjPoint):
        if x.is_infinity:
            return "inf"
        x = x.value
    body = ",".join(str(d) for d in x.digits)
    suffix = "" if x.exact else "~"
    return f"{x.field.tag()}:{x.v0}:{body}{suffix}"


def parse_scalar(text: str, field: FieldSpec) -> ProjPoint:
    """Parse the interchange format, ``inf``, or integer/rational literals."""
    s = text.strip()
    if not s:
        raise InputError("empty scalar")
    if s == "inf":
        return ProjPoint.infinity()
    if ":" not in s:
        try:
            if "/" in s:
                return ProjPoint.from_fraction(field, Fraction(s))
            return ProjPoint.from_int(field, int(s))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"malformed scalar {text!r}") from None
    parts = s.split(":")
    if len(parts) != 3:
        raise InputError(f"malformed scalar {text!r}")
    tag, v0_text, digits_text = parts
    p, m = parse_field_tag(tag)
    if (p, m) != (field.p, field.m):
        raise InputError(
            f"scalar field tag {tag} does not match field {field.tag()}"
        )
    exact = True
    if digits_text.endswith("~"):
        exact = False
        digits_text = digits_text[:-1]
    try:
        v0 = int(v0_text)
        digits = [int(d) for d in digits_text.split(",") if d != ""]
    except ValueError:
        raise InputError(f"malformed scalar {text!r}") from None
    return ProjPoint.of(PadicNumber(field, digits, v0=v0, exact=exact))
