"""Field parameters and residue-field arithmetic.

The coefficient field is the unramified extension of Q_p with residue field
F_q, q = p^m, realised as F_p[t]/(f) for a fixed monic irreducible f.  A
residue digit is encoded as the integer sum(c_i * p**i) in [0, q) standing
for the polynomial sum(c_i * t**i).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InputError

MAX_RESIDUE_DEGREE = 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


# -- polynomial arithmetic over F_p (coefficient tuples, low degree first) --


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_add(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, ai in enumerate(a):
        out[i] = ai
    for i, bi in enumerate(b):
        out[i] = (out[i] + bi) % p
    return _trim(out)


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, ai in enumerate(a):
        out[i] = ai
    for i, bi in enumerate(b):
        out[i] = (out[i] - bi) % p
    return _trim(out)


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_mod(a, f, p):
    # f monic
    a = list(a)
    df = len(f) - 1
    while len(a) - 1 >= df and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - df
            for i, fi in enumerate(f):
                a[shift + i] = (a[shift + i] - lead * fi) % p
        a.pop()
    return _trim(a)


def _poly_mulmod(a, b, f, p):
    return _poly_mod(_poly_mul(a, b, p), f, p)


def _poly_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        lead = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - db
        q[shift] = lead
        if lead:
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - lead * bi) % p
        a.pop()
        _trim(a)
    return _trim(q), _trim(a)


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        _, r = _poly_divmod(a, b, p)
        a, b = b, r
    return a


def _frobenius_iter(poly, times, f, p):
    """Apply t -> t^p repeatedly: returns poly^(p^times) mod f."""
    out = list(poly)
    for _ in range(times):
        acc = [1]
        base = out
        e = p
        while e:
            if e & 1:
                acc = _poly_mulmod(acc, base, f, p)
            base = _poly_mulmod(base, base, f, p)
            e >>= 1
        out = acc
    return out


def is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p.

    Uses the standard criterion: x^(p^m) = x mod f, and for every prime
    divisor l of m, gcd(x^(p^(m/l)) - x, f) is constant.
    """
    f = [c % p for c in coeffs]
    m = len(f) - 1
    if m < 1 or f[-1] != 1:
        return False
    if m == 1:
        return True
    if f[0] == 0:  # divisible by x
        return False
    x = [0, 1]
    if _frobenius_iter(x, m, f, p) != x:
        return False
    for l in _prime_divisors(m):
        u = _frobenius_iter(x, m // l, f, p)
        g = _poly_gcd(_poly_sub(u, x, p), f, p)
        if len(g) > 1:
            return False
    return True


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """The lexicographically smallest monic irreducible of degree m over F_p.

    The search order is fixed, so the result is a portable constant; this is
    the default reduction polynomial of FieldSpec.
    """
    if m == 1:
        return (0, 1)
    # iterate constant-first lexicographic order over lower coefficients
    for code in range(p**m):
        coeffs = []
        c = code
        for _ in range(m):
            coeffs.append(c % p)
            c //= p
        cand = tuple(coeffs) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")  # unreachable


def parse_field_tag(tag: str) -> tuple[int, int]:
    """Parse a field tag 'p^m' (or bare 'p') into (p, m)."""
    text = tag.strip()
    if "^" in text:
        left, _, right = text.partition("^")
    else:
        left, right = text, "1"
    try:
        p, m = int(left), int(right)
    except ValueError:
        raise InputError(f"malformed field tag {tag!r}") from None
    return p, m


@dataclass(frozen=True)
class FieldSpec:
    """Parameters of the coefficient field.

    p: prime; m: residue degree (q = p^m); precision: digit cap for
    truncated results; reduction_poly: monic irreducible of degree m over
    F_p, coefficients low degree first, defaults to the smallest one.
    """

    p: int
    m: int = 1
    precision: int = 64
    reduction_poly: tuple[int, ...] = ()

    def __post_init__(self):
        if not is_prime(self.p):
            raise InputError(f"p = {self.p} is not prime")
        if not 1 <= self.m <= MAX_RESIDUE_DEGREE:
            raise InputError(f"residue degree m must be in 1..{MAX_RESIDUE_DEGREE}")
        if self.precision < 1:
            raise InputError("precision must be positive")
        if not self.reduction_poly:
            object.__setattr__(
                self, "reduction_poly", smallest_irreducible(self.p, self.m)
            )
        poly = tuple(int(c) % self.p for c in self.reduction_poly)
        if len(poly) != self.m + 1 or poly[-1] != 1:
            raise InputError("reduction polynomial must be monic of degree m")
        if not is_irreducible(poly, self.p):
            raise InputError("reduction polynomial is reducible")
        object.__setattr__(self, "reduction_poly", poly)

    @property
    def q(self) -> int:
        return self.p**self.m

    def tag(self) -> str:
        return f"{self.p}^{self.m}"

    # -- residue digits as integers in [0, q) --

    def check_digit(self, d: int) -> int:
        if not isinstance(d, int) or not 0 <= d < self.q:
            raise InputError(f"digit {d!r} outside [0, {self.q})")
        return d

    def digit_coeffs(self, d: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.m):
            out.append(d % self.p)
            d //= self.p
        return tuple(out)

    def coeffs_digit(self, coeffs) -> int:
        d = 0
        for c in reversed(list(coeffs)):
            d = d * self.p + (c % self.p)
        return d

    def digit_add(self, a: int, b: int) -> int:
        ca, cb = self.digit_coeffs(a), self.digit_coeffs(b)
        return self.coeffs_digit((x + y) % self.p for x, y in zip(ca, cb))

    def digit_neg(self, a: int) -> int:
        return self.coeffs_digit((-c) % self.p for c in self.digit_coeffs(a))

    def digit_sub(self, a: int, b: int) -> int:
        return self.digit_add(a, self.digit_neg(b))

    def digit_mul(self, a: int, b: int) -> int:
        prod = _poly_mulmod(
            list(self.digit_coeffs(a)),
            list(self.digit_coeffs(b)),
            list(self.reduction_poly),
            self.p,
        )
        return self.coeffs_digit(prod + [0] * (self.m - len(prod)))

    def digit_inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero residue")
        # extended Euclid in F_p[t], tracking s with s*a = r (mod f)
        f = list(self.reduction_poly)
        r0, r1 = f, _trim(list(self.digit_coeffs(a)))
        s0, s1 = [], [1]
        while r1:
            q, r = _poly_divmod(r0, r1, self.p)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, self.p), self.p)
        # r0 is a nonzero constant gcd
        c_inv = pow(r0[0], -1, self.p)
        inv = [(c * c_inv) % self.p for c in s0]
        inv = _poly_mod(inv, f, self.p)
        return self.coeffs_digit(inv + [0] * (self.m - len(inv)))
