"""Exact arithmetic over a prime field F_p.

Univariate polynomials, reduced rational functions and truncated Laurent
series, together with p-th power detection and formal differentiation.
Everything is an immutable value; field elements themselves are plain ints
in [0, p).
"""
from __future__ import annotations

import os
from enum import Enum
from math import inf

from .errors import InsufficientPrecision, ZeroDenominator, ZeroElement

PRECISION_CAP = 1 << 16


def starting_precision(p: int, pole_order: int, genus: int) -> int:
    """Default number of series coefficients to work with.

    Overridable through the DORMANT_PRECISION environment variable; callers
    double on InsufficientPrecision up to PRECISION_CAP.
    """
    env = os.environ.get("DORMANT_PRECISION")
    if env:
        n = int(env)
        if n > 0:
            return min(n, PRECISION_CAP)
    return min(4 * p * (max(pole_order, 0) + genus + 1), PRECISION_CAP)


def precision_ladder(start: int):
    """Yield start, 2*start, 4*start, ... up to PRECISION_CAP."""
    prec = max(1, start)
    while prec <= PRECISION_CAP:
        yield prec
        prec *= 2


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; bases {2,3,5,7} decide every n < 3.2e9."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7):
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field with p elements, p an odd prime below 2^31."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not (3 <= p < (1 << 31)):
            raise ValueError(f"p must be an odd prime in [3, 2^31), got {p!r}")
        if p % 2 == 0 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        self.p = p

    def reduce(self, a: int) -> int:
        return a % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


class Degree(Enum):
    """Degree sentinel for the zero polynomial.

    Compares below every integer; arithmetic on it is a TypeError on purpose.
    """

    NEG_INF = "neg_inf"

    def __lt__(self, other):
        if isinstance(other, int):
            return True
        if isinstance(other, Degree):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, (int, Degree)):
            return True
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, (int, Degree)):
            return False
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, int):
            return False
        if isinstance(other, Degree):
            return True
        return NotImplemented


NEG_INF = Degree.NEG_INF

_KARATSUBA_AT = 64


def _mul_school(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return [c % p for c in out]


def _mul_kara(a, b, p):
    n = max(len(a), len(b))
    if min(len(a), len(b)) < _KARATSUBA_AT:
        return _mul_school(a, b, p)
    h = n // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    z0 = _mul_kara(a0, b0, p) if a0 and b0 else []
    z2 = _mul_kara(a1, b1, p) if a1 and b1 else []
    sa = [x + y for x, y in zip(a0, a1)] + list(a1[len(a0):] or a0[len(a1):])
    sb = [x + y for x, y in zip(b0, b1)] + list(b1[len(b0):] or b0[len(b1):])
    z1 = _mul_kara(sa, sb, p) if sa and sb else []
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] += c
    for i, c in enumerate(z1):
        out[i + h] += c
    for i, c in enumerate(z0):
        out[i + h] -= c
    for i, c in enumerate(z2):
        out[i + h] -= c
    for i, c in enumerate(z2):
        out[i + 2 * h] += c
    return [c % p for c in out]


class UPoly:
    """Dense univariate polynomial over F_p, coefficients ascending."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs):
        p = field.p
        cs = [int(c) % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, (1,))

    @classmethod
    def const(cls, field, c):
        return cls(field, (c,))

    @classmethod
    def x(cls, field):
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field, n: int, c: int = 1):
        return cls(field, (0,) * n + (c,))

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> int:
        if not self.coeffs:
            raise ZeroElement("leading coefficient of the zero polynomial")
        return self.coeffs[-1]

    def coeff(self, n: int) -> int:
        if 0 <= n < len(self.coeffs):
            return self.coeffs[n]
        return 0

    def monic(self) -> "UPoly":
        if self.is_zero or self.coeffs[-1] == 1:
            return self
        c = self.field.inv(self.coeffs[-1])
        return UPoly(self.field, [a * c for a in self.coeffs])

    def _coerce(self, other):
        if isinstance(other, UPoly):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, int):
            return UPoly(self.field, (other,))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UPoly(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return UPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero or o.is_zero:
            return UPoly.zero(self.field)
        if min(len(self.coeffs), len(o.coeffs)) >= _KARATSUBA_AT:
            cs = _mul_kara(list(self.coeffs), list(o.coeffs), self.field.p)
        else:
            cs = _mul_school(self.coeffs, o.coeffs, self.field.p)
        return UPoly(self.field, cs)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = UPoly.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.field.p
        inv_lc = self.field.inv(o.coeffs[-1])
        rem = list(self.coeffs)
        db = len(o.coeffs) - 1
        if len(rem) - 1 < db:
            return UPoly.zero(self.field), self
        quo = [0] * (len(rem) - db)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i] % p
            if c:
                q = c * inv_lc % p
                quo[i - db] = q
                for j, bc in enumerate(o.coeffs):
                    rem[i - db + j] -= q * bc
                rem[i] = 0
        return UPoly(self.field, quo), UPoly(self.field, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def gcd(self, other: "UPoly") -> "UPoly":
        a, b = self, self._coerce(other)
        while not b.is_zero:
            a, b = b, a % b
        return a.monic()

    def derivative(self) -> "UPoly":
        return UPoly(self.field, [i * c for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, a: int) -> int:
        p = self.field.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * a + c) % p
        return acc

    def compose(self, other: "UPoly") -> "UPoly":
        acc = UPoly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def taylor_shift(self, a: int) -> "UPoly":
        """self(x + a)."""
        if a % self.field.p == 0:
            return self
        return self.compose(UPoly(self.field, (a, 1)))

    def pth_power(self) -> "UPoly":
        """self**p via the Frobenius coefficient spread (c^p = c in F_p)."""
        p = self.field.p
        out = [0] * (p * len(self.coeffs) - p + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[p * i] = c
        return UPoly(self.field, out)

    def pth_root(self):
        """Inverse of pth_power when it exists, else None."""
        p = self.field.p
        root = []
        for i, c in enumerate(self.coeffs):
            if i % p == 0:
                root.append(c)
            elif c:
                return None
        return UPoly(self.field, root)

    def frobenius_split(self):
        """Decompose self = sum_i split[i]^p * x^i with 0 <= i < p."""
        p = self.field.p
        parts = [[] for _ in range(p)]
        for n, c in enumerate(self.coeffs):
            q, r = divmod(n, p)
            part = parts[r]
            while len(part) < q:
                part.append(0)
            part.append(c)
        return tuple(UPoly(self.field, part) for part in parts)

    def valuation_at(self, a: int) -> int:
        """Multiplicity of x = a as a root; ZeroElement on the zero poly."""
        if self.is_zero:
            raise ZeroElement("valuation of 0")
        shifted = self.taylor_shift(a)
        v = 0
        while shifted.coeffs[v] == 0:
            v += 1
        return v

    def render(self) -> str:
        if self.is_zero:
            return "0"
        return " ".join(str(c) for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = UPoly(self.field, (other,))
        return (
            isinstance(other, UPoly)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.coeffs))

    def __repr__(self):
        return f"UPoly(p={self.field.p}, {list(self.coeffs)})"


def _series_inv(u, count, p):
    """Inverse of the unit power series u (u[0] != 0) mod t^count."""
    inv0 = pow(u[0], p - 2, p)
    out = [inv0] + [0] * (count - 1)
    for k in range(1, count):
        s = 0
        for j in range(1, min(k, len(u) - 1) + 1):
            s += u[j] * out[k - j]
        out[k] = -inv0 * s % p
    return out


def _series_mul(a, b, count, p):
    out = [0] * count
    for i, ai in enumerate(a[:count]):
        if ai:
            for j, bj in enumerate(b[: count - i]):
                out[i + j] += ai * bj
    return [c % p for c in out]


class RatFunc:
    """Reduced rational function num/den over F_p; den monic, gcd 1."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: PrimeField, num: UPoly, den: UPoly | None = None):
        if den is None:
            den = UPoly.one(field)
        if den.is_zero:
            raise ZeroDenominator("rational function with zero denominator")
        if num.is_zero:
            num, den = UPoly.zero(field), UPoly.one(field)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            if den.coeffs[-1] != 1:
                c = field.inv(den.coeffs[-1])
                num = num * c
                den = den * c
        self.field = field
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, poly: UPoly):
        return cls(poly.field, poly)

    @classmethod
    def const(cls, field, c: int):
        return cls(field, UPoly.const(field, c))

    @classmethod
    def zero(cls, field):
        return cls(field, UPoly.zero(field))

    @classmethod
    def one(cls, field):
        return cls(field, UPoly.one(field))

    @classmethod
    def x(cls, field):
        return cls(field, UPoly.x(field))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_poly(self) -> bool:
        return self.den.degree == 0

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, UPoly):
            return RatFunc(self.field, other)
        if isinstance(other, int):
            return RatFunc.const(self.field, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(
            self.field, self.num * o.den + o.num * self.den, self.den * o.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.field, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.field, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDenominator("division by zero rational function")
        return RatFunc(self.field, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if n < 0:
            if self.is_zero:
                raise ZeroDenominator("negative power of 0")
            return RatFunc(self.field, self.den ** (-n), self.num ** (-n))
        return RatFunc(self.field, self.num**n, self.den**n)

    def derivative(self) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(
            self.field, n.derivative() * d - n * d.derivative(), d * d
        )

    def dlog(self) -> "RatFunc":
        if self.is_zero:
            raise ZeroElement("dlog of 0")
        return self.derivative() / self

    def pth_power(self) -> "RatFunc":
        return RatFunc(self.field, self.num.pth_power(), self.den.pth_power())

    def pth_root(self):
        """g with g^p = self, or None.  Canonical form makes this exact."""
        rn = self.num.pth_root()
        rd = self.den.pth_root()
        if rn is None or rd is None:
            return None
        return RatFunc(self.field, rn, rd)

    def evaluate(self, a: int) -> int:
        d = self.den.evaluate(a)
        if d == 0:
            raise ZeroDenominator(f"pole at x = {a}")
        return self.num.evaluate(a) * self.field.inv(d) % self.field.p

    def valuation_at(self, a: int) -> int:
        if self.is_zero:
            raise ZeroElement("valuation of 0")
        return self.num.valuation_at(a) - self.den.valuation_at(a)

    def valuation_at_infinity(self) -> int:
        if self.is_zero:
            raise ZeroElement("valuation of 0")
        return self.den.degree - self.num.degree

    def series_at(self, a: int, prec, center=None) -> "TruncSeries":
        """Laurent expansion in t = x - a with coefficients on [ord, prec)."""
        if center is None:
            center = ("aff", a)
        if self.is_zero:
            return TruncSeries(self.field, center, prec, (), prec)
        p = self.field.p
        n = list(self.num.taylor_shift(a).coeffs)
        d = list(self.den.taylor_shift(a).coeffs)
        k = next(i for i, c in enumerate(n) if c)
        m = next(i for i, c in enumerate(d) if c)
        ord_low = k - m
        count = prec - ord_low
        if count <= 0:
            return TruncSeries(self.field, center, prec, (), prec)
        inv = _series_inv(d[m:], count, p)
        cs = _series_mul(n[k:], inv, count, p)
        return TruncSeries(self.field, center, ord_low, cs, prec)

    def series_at_infinity(self, prec, center=("inf",)) -> "TruncSeries":
        """Expansion in t = 1/x."""
        if self.is_zero:
            return TruncSeries(self.field, center, prec, (), prec)
        p = self.field.p
        nrev = list(reversed(self.num.coeffs))
        drev = list(reversed(self.den.coeffs))
        ord_low = self.den.degree - self.num.degree
        count = prec - ord_low
        if count <= 0:
            return TruncSeries(self.field, center, prec, (), prec)
        inv = _series_inv(drev, count, p)
        cs = _series_mul(nrev, inv, count, p)
        return TruncSeries(self.field, center, ord_low, cs, prec)

    def residue_at(self, a: int) -> int:
        """Residue of self * dx at x = a."""
        if self.is_zero:
            return 0
        return self.series_at(a, 0).coeff(-1)

    def residue_at_infinity(self) -> int:
        """Residue of self * dx at x = infinity (dx = -dt/t^2)."""
        if self.is_zero:
            return 0
        return self.field.neg(self.series_at_infinity(2).coeff(1))

    def render(self) -> str:
        return f"{self.num.render()} / {self.den.render()}"

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RatFunc) else other
        if not isinstance(o, RatFunc):
            return NotImplemented
        return o.field == self.field and o.num == self.num and o.den == self.den

    def __hash__(self):
        return hash((self.field.p, self.num.coeffs, self.den.coeffs))

    def __repr__(self):
        return f"RatFunc({self.num.render()} / {self.den.render()}, p={self.field.p})"


def rat_normalize(num: UPoly, den: UPoly) -> RatFunc:
    """Canonical num/den form; idempotent."""
    return RatFunc(num.field, num, den)


class TruncSeries:
    """Truncated Laurent series in a local parameter t at a tagged center.

    Coefficients are known for exponents in [ord_low, prec); the stored tuple
    covers [ord_low, ord_low + len(coeffs)) and the remaining known window is
    zero.  prec may be math.inf for exact elements (constants, polynomials in
    t).  The zero-to-known-precision series stores ord_low == prec and an
    empty tuple.
    """

    __slots__ = ("field", "center", "ord_low", "coeffs", "prec")

    def __init__(self, field, center, ord_low, coeffs, prec):
        p = field.p
        cs = [int(c) % p for c in coeffs]
        if prec != inf:
            prec = int(prec)
            cs = cs[: max(0, prec - ord_low)]
        lead = 0
        while lead < len(cs) and cs[lead] == 0:
            lead += 1
        cs = cs[lead:]
        ord_low += lead
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            ord_low = prec
        self.field = field
        self.center = center
        self.ord_low = ord_low
        self.coeffs = tuple(cs)
        self.prec = prec

    @classmethod
    def zero(cls, field, center, prec=inf):
        return cls(field, center, prec, (), prec)

    @classmethod
    def const(cls, field, center, c: int):
        return cls(field, center, 0, (c,), inf)

    @classmethod
    def t_power(cls, field, center, n: int, c: int = 1):
        return cls(field, center, n, (c,), inf)

    @property
    def is_zero_to_prec(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        if not self.coeffs:
            raise InsufficientPrecision(
                f"series is 0 to O(t^{self.prec}); valuation undecidable"
            )
        return self.ord_low

    def coeff(self, n: int) -> int:
        if n >= self.prec:
            raise InsufficientPrecision(
                f"coefficient at t^{n} beyond precision O(t^{self.prec})"
            )
        if not self.coeffs or n < self.ord_low:
            return 0
        i = n - self.ord_low
        if i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def _check(self, other):
        if other.field != self.field or other.center != self.center:
            raise ValueError("series at different centers")

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        if isinstance(other, int):
            return TruncSeries.const(self.field, self.center, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prec = min(self.prec, o.prec)
        if not self.coeffs and not o.coeffs:
            return TruncSeries(self.field, self.center, prec, (), prec)
        parts = [s for s in (self, o) if s.coeffs]
        lo = min(s.ord_low for s in parts)
        hi = max(s.ord_low + len(s.coeffs) for s in parts)
        out = [0] * (hi - lo)
        for s in parts:
            for i, c in enumerate(s.coeffs):
                out[s.ord_low - lo + i] += c
        return TruncSeries(self.field, self.center, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(
            self.field, self.center, self.ord_low,
            [-c for c in self.coeffs], self.prec,
        )

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prec = min(self.prec + o.ord_low, o.prec + self.ord_low)
        if not self.coeffs or not o.coeffs:
            return TruncSeries(self.field, self.center, prec, (), prec)
        p = self.field.p
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        out = [c % p for c in out]
        return TruncSeries(
            self.field, self.center, self.ord_low + o.ord_low, out, prec
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncSeries.const(self.field, self.center, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self, prec_hint=None) -> "TruncSeries":
        """1/self.  Exact inputs need prec_hint unless they are monomials."""
        if not self.coeffs:
            raise InsufficientPrecision("inverse of a series with no visible term")
        v = self.ord_low
        if self.prec == inf:
            if len(self.coeffs) == 1:
                c = self.field.inv(self.coeffs[0])
                return TruncSeries(self.field, self.center, -v, (c,), inf)
            if prec_hint is None:
                raise ValueError("inverse of an exact non-monomial needs prec_hint")
            count = prec_hint + v
        else:
            count = self.prec - v
        count = max(count, 1)
        inv = _series_inv(list(self.coeffs) + [0] * count, count, self.field.p)
        return TruncSeries(self.field, self.center, -v, inv, count - v)

    def derivative(self) -> "TruncSeries":
        """d/dt, one coefficient of precision lost."""
        prec = self.prec if self.prec == inf else self.prec - 1
        out = [(self.ord_low + i) * c for i, c in enumerate(self.coeffs)]
        return TruncSeries(self.field, self.center, self.ord_low - 1, out, prec)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by t^k."""
        return TruncSeries(
            self.field, self.center, self.ord_low + k, self.coeffs, self.prec + k
        )

    def truncate(self, prec) -> "TruncSeries":
        if prec > self.prec:
            raise InsufficientPrecision("cannot extend a series by truncation")
        return TruncSeries(self.field, self.center, self.ord_low, self.coeffs, prec)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            other.field == self.field
            and other.center == self.center
            and other.ord_low == self.ord_low
            and other.coeffs == self.coeffs
            and other.prec == self.prec
        )

    def __hash__(self):
        return hash((self.field.p, self.center, self.ord_low, self.coeffs, self.prec))

    def __repr__(self):
        return (
            f"Series(center={self.center}, ord={self.ord_low}, "
            f"coeffs={list(self.coeffs)}, prec={self.prec})"
        )


def poly_at_series(poly: UPoly, s: TruncSeries) -> TruncSeries:
    """Evaluate a polynomial at a series by Horner; precision via min-rules."""
    acc = TruncSeries.zero(poly.field, s.center)
    for c in reversed(poly.coeffs):
        acc = acc * s + c
    return acc


def ratfunc_at_series(f: RatFunc, s: TruncSeries, prec_hint=None) -> TruncSeries:
    """Evaluate num/den at a series; prec_hint bounds exact-denominator inverses."""
    n = poly_at_series(f.num, s)
    d = poly_at_series(f.den, s)
    return n * d.inverse(prec_hint=prec_hint)
