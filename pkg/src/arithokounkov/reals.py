"""Exact log-linear reals with certified interval evaluation.

Every real quantity in the library (arithmetic degrees, twists, the field
constants, log-counts) is a finite expression

    r + sum_k c_k * log(a_k)

with ``r`` and ``c_k`` rational and ``a_k`` either a rational prime or a
positive irrational quadratic number.  Sums and rational multiples stay in
this class, equality is structural, and signs are settled by outward-rounded
interval evaluation (mpmath.iv) at increasing precision.  Over prime atoms a
nonzero expression never evaluates to zero (the logarithms of primes are
linearly independent over Q and e^r is transcendental for rational r != 0),
so refinement always terminates for those.
"""
from __future__ import annotations

import math
import re
from contextlib import contextmanager
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from mpmath import iv, mpf

DEFAULT_MAX_PREC = 4096
_START_PREC = 64

Rational = Union[int, Fraction]


class UndecidedComparison(ArithmeticError):
    """A certified comparison could not be settled at the precision cap."""


@contextmanager
def precision(bits: int) -> Iterator[None]:
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _ivq(q: Rational):
    q = Fraction(q)
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _squarefree_part(d: int) -> tuple[int, int]:
    """Return (c, e) with d = c**2 * e and e squarefree."""
    sign = -1 if d < 0 else 1
    n = abs(d)
    c = 1
    f = 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            c *= f
        f += 1
    return c, sign * n


class QuadraticNumber:
    """An element ``a + b*sqrt(d)`` of Q(sqrt(d)) with exact rational parts.

    ``d`` is a squarefree integer; ``d = 1`` is allowed for plain rationals.
    Only real fields (``d > 0``) admit :meth:`sign`.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Rational, b: Rational = 0, d: int = 1):
        a, b = Fraction(a), Fraction(b)
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        self.a, self.b, self.d = a, b, d

    def _coerce(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if self.d != other.d and self.d != 1 and other.d != 1:
                raise ValueError("mixing different quadratic fields")
            return other
        return QuadraticNumber(other)

    def _field(self, other: "QuadraticNumber") -> int:
        return self.d if self.d != 1 else other.d

    def __add__(self, other):
        o = self._coerce(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QuadraticNumber):
            if other.is_rational:
                other = other.a
            else:
                n = other.norm()
                return self * other.conjugate() * (1 / Fraction(n))
        q = Fraction(other)
        return QuadraticNumber(self.a / q, self.b / q, self.d)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = QuadraticNumber(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.d < 0:
            raise ValueError("sign of a non-real number")
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else sb

    def interval(self):
        if self.d < 0:
            raise ValueError("interval of a non-real number")
        if self.b == 0:
            return _ivq(self.a)
        return _ivq(self.a) + _ivq(self.b) * iv.sqrt(iv.mpf(self.d))

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def key(self) -> tuple:
        return (self.a.numerator, self.a.denominator, self.b.numerator,
                self.b.denominator, self.d)

    def __eq__(self, other):
        if not isinstance(other, QuadraticNumber):
            if isinstance(other, (int, Fraction)):
                return self.b == 0 and self.a == other
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.b == 0:
            return f"QuadraticNumber({self.a})"
        return f"QuadraticNumber({self.a} + {self.b}*sqrt({self.d}))"


@lru_cache(maxsize=4096)
def _factor_int(n: int) -> tuple[tuple[int, int], ...]:
    if n < 1:
        raise ValueError("factorisation of a nonpositive integer")
    out = []
    f = 2
    while f * f <= n and f < 100_000:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if n > 1:
        if f * f > n:
            out.append((n, 1))
        else:
            from sympy import factorint

            out.extend(sorted((int(p), int(e)) for p, e in factorint(n).items()))
    return tuple(out)


def factor_rational(q: Rational) -> dict[int, int]:
    q = Fraction(q)
    if q <= 0:
        raise ValueError("log of a nonpositive number")
    exps: dict[int, int] = {}
    for p, e in _factor_int(q.numerator) if q.numerator > 1 else ():
        exps[p] = exps.get(p, 0) + e
    for p, e in _factor_int(q.denominator) if q.denominator > 1 else ():
        exps[p] = exps.get(p, 0) - e
    return exps


def _atom_sort_key(atom) -> tuple:
    if isinstance(atom, int):
        return (0, atom)
    return (1,) + atom.key()


def _atom_interval(atom):
    if isinstance(atom, int):
        return iv.log(iv.mpf(atom))
    return iv.log(atom.interval())


def _atom_str(atom) -> str:
    if isinstance(atom, int):
        return f"log({atom})"
    return f"log({atom.a}+{atom.b}*sqrt({atom.d}))"


class LogReal:
    """Exact real ``rational + sum(coeff * log(atom))``.

    Instances are immutable and hashable; ``==`` is exact.
    """

    __slots__ = ("rational", "terms", "_hash")

    def __init__(self, rational: Rational = 0, terms=()):
        self.rational = Fraction(rational)
        merged: dict = {}
        for atom, c in terms:
            c = Fraction(c)
            if c:
                merged[atom] = merged.get(atom, Fraction(0)) + c
        self.terms = tuple(
            sorted(((a, c) for a, c in merged.items() if c),
                   key=lambda t: _atom_sort_key(t[0]))
        )
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def log_of(cls, q) -> "LogReal":
        """Exact natural logarithm of a positive rational or quadratic number."""
        if isinstance(q, QuadraticNumber):
            if q.is_rational:
                return cls.log_of(q.a)
            if q.d < 0 or q.sign() <= 0:
                raise ValueError("log of a non-positive number")
            return cls(0, [(q, 1)])
        return cls(0, factor_rational(q).items())

    @classmethod
    def coerce(cls, x) -> "LogReal":
        if isinstance(x, LogReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_real(x)
        if isinstance(x, float):
            return cls(Fraction(x))
        raise TypeError(f"cannot interpret {x!r} as an exact real")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "LogReal":
        if isinstance(other, (int, Fraction)):
            return LogReal(self.rational + other, self.terms)
        if not isinstance(other, LogReal):
            return NotImplemented
        return LogReal(self.rational + other.rational, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "LogReal":
        return LogReal(-self.rational, [(a, -c) for a, c in self.terms])

    def __sub__(self, other) -> "LogReal":
        if isinstance(other, (int, Fraction)):
            return LogReal(self.rational - other, self.terms)
        if not isinstance(other, LogReal):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LogReal":
        return (-self) + other

    def __mul__(self, k) -> "LogReal":
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return LogReal(self.rational * k, [(a, c * k) for a, c in self.terms])

    __rmul__ = __mul__

    def __truediv__(self, k) -> "LogReal":
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        return self * (Fraction(1) / Fraction(k))

    # comparison ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.rational == 0 and not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LogReal(other)
        if not isinstance(other, LogReal):
            return NotImplemented
        return self.rational == other.rational and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rational, self.terms))
        return self._hash

    def interval(self, prec: int = 64):
        with precision(prec):
            acc = _ivq(self.rational)
            for atom, c in self.terms:
                acc = acc + _ivq(c) * _atom_interval(atom)
            return acc

    def sign(self, max_prec: int = DEFAULT_MAX_PREC) -> int:
        if not self.terms:
            return (self.rational > 0) - (self.rational < 0)
        prec = _START_PREC
        while prec <= max_prec:
            x = self.interval(prec)
            if x > 0:
                return 1
            if x < 0:
                return -1
            prec *= 2
        raise UndecidedComparison(f"sign of {self} undecided at {max_prec} bits")

    def _cmp(self, other) -> int:
        return (self - LogReal.coerce(other)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # conversions --------------------------------------------------------
    def __float__(self) -> float:
        return float(mpf(self.interval(64).mid))

    def bounds(self, prec: int = 64) -> tuple[float, float]:
        """Float bounds ``lo <= value <= hi`` (outward rounded)."""
        x = self.interval(prec)
        lo = float(mpf(x.a))
        hi = float(mpf(x.b))
        return math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf)

    def exp_rational(self) -> Fraction | None:
        """``exp(self)`` when it is rational, else None."""
        if self.rational != 0:
            return None
        out = Fraction(1)
        for atom, c in self.terms:
            if not isinstance(atom, int) or c.denominator != 1:
                return None
            out *= Fraction(atom) ** int(c)
        return out

    def to_decimal(self, digits: int = 15) -> tuple[str, str]:
        """Decimal string and an error bound, both as strings."""
        prec = max(64, int(digits * 3.33) + 20)
        x = self.interval(prec)
        mid = mpf(x.mid)
        err = mpf(x.delta) / 2
        from mpmath import nstr

        if not self.terms:
            err = mpf(0)
        return nstr(mid, digits, strip_zeros=False), nstr(err, 3)

    def __str__(self) -> str:
        parts = []
        if self.rational or not self.terms:
            parts.append(str(self.rational))
        for atom, c in self.terms:
            parts.append(f"{c}*{_atom_str(atom)}" if c != 1 else _atom_str(atom))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"LogReal({self})"


ZERO = LogReal(0)
LOG2 = LogReal.log_of(2)
LOG3 = LogReal.log_of(3)

_TERM = re.compile(
    r"\s*([+-]?)\s*(?:(\d+(?:\.\d*)?(?:/\d+)?|\.\d+)\s*\*?\s*)?(log\(\s*([^)]*)\))?\s*"
)


def parse_real(text: str) -> LogReal:
    """Parse ``"1/3"``, ``"-1.0"``, ``"log(5/2)"``, ``"2*log(3) - 1/2"``.

    Decimal strings are read as exact rationals.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty real")
    pos = 0
    total = ZERO
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse real {text!r}")
        sign, coeff, logpart, arg = m.groups()
        if coeff is None and logpart is None:
            raise ValueError(f"cannot parse real {text!r}")
        c = Fraction(coeff) if coeff is not None else Fraction(1)
        if sign == "-":
            c = -c
        if logpart is not None:
            total = total + LogReal.log_of(Fraction(arg.strip())) * c
        else:
            total = total + c
        pos = m.end()
    return total


def compare_exp(y2, level: LogReal, max_prec: int = DEFAULT_MAX_PREC) -> bool | None:
    """Decide ``y2 <= exp(level)`` for an exact nonnegative real ``y2``.

    ``y2`` is a rational or a real :class:`QuadraticNumber`.  Returns None when
    the comparison stays undecided at ``max_prec`` bits (only possible for a
    genuine tie that the exact path cannot see).
    """
    if not isinstance(y2, QuadraticNumber):
        y2 = QuadraticNumber(y2)
    r = level.exp_rational()
    if r is not None:
        return (QuadraticNumber(r) - y2).sign() >= 0
    if level.rational == 0 and all(isinstance(a, int) for a, _ in level.terms):
        den = 1
        for _, c in level.terms:
            den = den * c.denominator // math.gcd(den, c.denominator)
        if den <= 4096:
            rhs = Fraction(1)
            for a, c in level.terms:
                rhs *= Fraction(a) ** int(c * den)
            return (QuadraticNumber(rhs) - y2 ** den).sign() >= 0
    prec = _START_PREC
    while prec <= max_prec:
        with precision(prec):
            lhs = y2.interval()
        rhs = level.interval(prec)
        with precision(prec):
            rhs = iv.exp(rhs)
            if lhs < rhs:
                return True
            if lhs > rhs:
                return False
        prec *= 2
    return None


def floor_exp(level: LogReal, max_prec: int = DEFAULT_MAX_PREC) -> int:
    """Exact ``floor(exp(level))``."""
    r = level.exp_rational()
    if r is not None:
        return math.floor(r)
    prec = _START_PREC
    while prec <= max_prec:
        x = level.interval(prec)
        with precision(prec):
            x = iv.exp(x)
        lo = math.floor(mpf(x.a))
        hi = math.floor(mpf(x.b))
        if lo == hi:
            return int(lo)
        # candidate boundary integer; settle it exactly
        n = int(hi)
        ok = compare_exp(Fraction(n), level, max_prec)
        if ok is not None:
            return n if ok else n - 1
        prec *= 2
    raise UndecidedComparison(f"floor(exp({level})) undecided")


def rel_diff(a: float, b: float) -> float:
    """Symmetric relative difference ``|a - b| / max(|a|, |b|)`` (0 when both vanish)."""
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return abs(a - b) / scale
