"""Q and quadratic fields Q(sqrt(d)): integral bases, embeddings, ideals, primes.

Elements of a field are coordinate tuples in the integral basis ``(1, omega)``
with ``omega = sqrt(d)`` for ``d = 2, 3 mod 4`` and ``omega = (1 + sqrt(d))/2``
for ``d = 1 mod 4``.  Elements of ``O_K`` have integer coordinates.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .intlinalg import det, hnf
from .reals import LogReal, QuadraticNumber


class FieldError(ValueError):
    """Invalid field descriptor."""


class NoSuchPrime(ValueError):
    """Selector does not name a prime above p."""


@dataclass(frozen=True)
class Embedding:
    index: int
    real: bool
    conjugate: int
    # sqrt(d) is sent to sign * sqrt(d) (sqrt(d) = i*sqrt(|d|) when d < 0)
    sign: int


class NumberField:
    """The field Q or Q(sqrt(d)) with a fixed integral basis and embeddings."""

    def __init__(self, d: int | None = None):
        self.d = d
        if d is None:
            self.name = "Q"
            self.degree = 1
            self.discriminant = 1
            self.embeddings = (Embedding(0, True, 0, 1),)
            self._case = None
            return
        self.name = f"Q(sqrt({d}))"
        self.degree = 2
        self._case = "B" if d % 4 == 1 else "A"
        self.discriminant = d if self._case == "B" else 4 * d
        if d > 0:
            self.embeddings = (Embedding(0, True, 0, 1), Embedding(1, True, 1, -1))
        else:
            self.embeddings = (Embedding(0, False, 1, 1), Embedding(1, False, 0, -1))

    # identity ----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, NumberField) and self.d == other.d

    def __hash__(self):
        return hash(("NumberField", self.d))

    def __repr__(self):
        return f"NumberField({self.name})"

    @property
    def is_rational(self) -> bool:
        return self.d is None

    # basis data ----------------------------------------------------------
    @property
    def omega(self) -> QuadraticNumber:
        if self.d is None:
            return QuadraticNumber(1)
        if self._case == "A":
            return QuadraticNumber(0, 1, self.d)
        return QuadraticNumber(Fraction(1, 2), Fraction(1, 2), self.d)

    def integral_basis(self) -> list[QuadraticNumber]:
        if self.d is None:
            return [QuadraticNumber(1)]
        return [QuadraticNumber(1, 0, self.d), self.omega]

    def unit_vector(self, i: int) -> tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(self.degree))

    def one(self) -> tuple[int, ...]:
        return self.unit_vector(0)

    # element arithmetic --------------------------------------------------
    def to_quadratic(self, x) -> QuadraticNumber:
        if self.d is None:
            return QuadraticNumber(x[0])
        return QuadraticNumber(x[0]) + self.omega * Fraction(x[1])

    def from_quadratic(self, q: QuadraticNumber) -> tuple:
        if self.d is None:
            if not q.is_rational:
                raise ValueError("not an element of Q")
            return (_intify(q.a),)
        if self._case == "A":
            return (_intify(q.a), _intify(q.b))
        v = 2 * q.b
        return (_intify(q.a - q.b), _intify(v))

    def mul(self, x, y) -> tuple:
        return self.from_quadratic(self.to_quadratic(x) * self.to_quadratic(y))

    def conj(self, x) -> tuple:
        if self.d is None:
            return tuple(x)
        return self.from_quadratic(self.to_quadratic(x).conjugate())

    def norm(self, x) -> Fraction:
        return self.to_quadratic(x).norm() if self.d is not None else Fraction(x[0])

    def embed_sq(self, x, sigma: int) -> QuadraticNumber:
        """Exact ``|sigma(x)|**2``; rational for complex embeddings."""
        q = self.to_quadratic(x)
        if self.d is None:
            return QuadraticNumber(q.a * q.a)
        e = self.embeddings[sigma]
        if e.real:
            s = QuadraticNumber(q.a, e.sign * q.b, self.d)
            return s * s
        return QuadraticNumber(q.norm())

    def omega_complex(self, sigma: int) -> complex:
        if self.d is None:
            return complex(1.0)
        e = self.embeddings[sigma]
        root = math.sqrt(self.d) if self.d > 0 else 1j * math.sqrt(-self.d)
        root *= e.sign
        return root if self._case == "A" else (1 + root) / 2

    def embed_complex(self, x, sigma: int) -> complex:
        if self.d is None:
            return complex(x[0])
        return x[0] + x[1] * self.omega_complex(sigma)

    def mul_omega_matrix(self) -> np.ndarray:
        """Integer matrix of multiplication by omega on coordinates."""
        if self.d is None:
            return np.array([[1]], dtype=np.int64)
        w1 = self.mul((1, 0), (0, 1))
        w2 = self.mul((0, 1), (0, 1))
        # coordinates (u, v) -> u*omega + v*omega^2
        return np.array([[w1[0], w2[0]], [w1[1], w2[1]]], dtype=np.int64)

    def embedding_det_sq(self) -> Fraction:
        """Square of det(sigma_i(a_j)) computed formally; equals D_K."""
        if self.d is None:
            return Fraction(1)
        w = self.omega
        # sigma_1(omega) - sigma_2(omega) = 2 * b * sqrt(d)
        diff = QuadraticNumber(0, 2 * w.b, self.d)
        sq = diff * diff
        assert sq.is_rational
        return sq.a

    def check_invariants(self) -> None:
        assert len(self.embeddings) == self.degree
        assert len(self.integral_basis()) == self.degree
        for e in self.embeddings:
            assert self.embeddings[e.conjugate].conjugate == e.index
        assert self.embedding_det_sq() == self.discriminant


def _intify(q: Fraction):
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else q


_FIELD_RE = re.compile(r"^\s*Q\s*\(\s*sqrt\s*\(\s*([+-]?\d+)\s*\)\s*\)\s*$")


def _is_squarefree(n: int) -> bool:
    n = abs(n)
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


@lru_cache(maxsize=None)
def make_field(descriptor: str) -> NumberField:
    """Build a field from ``"Q"``, ``"Q(i)"`` or ``"Q(sqrt(d))"``."""
    s = descriptor.strip()
    if s in ("Q", "QQ"):
        return NumberField()
    if s == "Q(i)":
        return NumberField(-1)
    m = _FIELD_RE.match(s)
    if not m:
        raise FieldError(f"unrecognised field descriptor {descriptor!r}")
    d = int(m.group(1))
    if d in (0, 1) or not _is_squarefree(d):
        raise FieldError(f"d = {d} is not a squarefree integer other than 0, 1")
    return NumberField(d)


def minkowski_constant(F: NumberField) -> LogReal:
    """``log 2 + log|D_K| / (2 kappa)``."""
    return LogReal.log_of(2) + LogReal.log_of(abs(F.discriminant)) / (2 * F.degree)


def delta_constant(F: NumberField) -> LogReal:
    """Largest ``log|sigma(a_i)|`` over the integral basis and all embeddings."""
    best = LogReal(0)
    for i in range(F.degree):
        a = F.unit_vector(i)
        for e in F.embeddings:
            v = LogReal.log_of(F.embed_sq(a, e.index)) / 2
            if v > best:
                best = v
    return best


# --------------------------------------------------------------------------
# ideals


class Ideal:
    """A nonzero integral ideal of O_K, stored as an HNF Z-basis."""

    __slots__ = ("field", "basis")

    def __init__(self, field: NumberField, basis):
        self.field = field
        self.basis = tuple(tuple(int(a) for a in r) for r in basis)
        if len(self.basis) != field.degree:
            raise ValueError("ideal basis must have full rank")

    @classmethod
    def generated(cls, field: NumberField, gens) -> "Ideal":
        rows = []
        for g in gens:
            g = tuple(g)
            for i in range(field.degree):
                rows.append(field.mul(g, field.unit_vector(i)))
        return cls(field, hnf(rows, field.degree))

    @classmethod
    def unit(cls, field: NumberField) -> "Ideal":
        return cls.generated(field, [field.one()])

    @classmethod
    def of_integer(cls, field: NumberField, n: int) -> "Ideal":
        return cls.generated(field, [tuple(n if i == 0 else 0 for i in range(field.degree))])

    def norm(self) -> int:
        return abs(det(self.basis))

    def __mul__(self, other: "Ideal") -> "Ideal":
        rows = [self.field.mul(a, b) for a in self.basis for b in other.basis]
        return Ideal(self.field, hnf(rows, self.field.degree))

    def __pow__(self, n: int) -> "Ideal":
        out = Ideal.unit(self.field)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "Ideal":
        return Ideal.generated(self.field, [self.field.conj(b) for b in self.basis])

    def content(self) -> int:
        g = 0
        for r in self.basis:
            for a in r:
                g = math.gcd(g, a)
        return g

    def divide_integer(self, g: int) -> "Ideal":
        return Ideal(self.field, hnf([[a // g for a in r] for r in self.basis], self.field.degree))

    def is_unit(self) -> bool:
        return self.norm() == 1

    def contains(self, x) -> bool:
        return bool(self.contains_array(np.asarray([x], dtype=object))[0])

    def contains_array(self, pts) -> np.ndarray:
        """Vectorised membership for an (N, kappa) array of coordinates."""
        pts = np.asarray(pts)
        if self.field.degree == 1:
            return pts[:, 0] % self.basis[0][0] == 0
        (a, b), (_, c) = self.basis
        u, v = pts[:, 0], pts[:, 1]
        ok = u % a == 0
        x = u // a
        return ok & ((v - x * b) % c == 0)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.field == other.field and self.basis == other.basis

    def __hash__(self):
        return hash((self.field, self.basis))

    def __repr__(self):
        return f"Ideal({self.field.name}, {self.basis})"


class FractionalIdeal:
    """``integral / den`` with ``integral`` an integral ideal and ``den >= 1``."""

    __slots__ = ("integral", "den")

    def __init__(self, integral: Ideal, den: int = 1):
        g = math.gcd(integral.content(), den)
        if g > 1:
            integral = integral.divide_integer(g)
            den //= g
        self.integral = integral
        self.den = den

    @property
    def field(self) -> NumberField:
        return self.integral.field

    def norm(self) -> Fraction:
        return Fraction(self.integral.norm(), self.den ** self.field.degree)

    def inverse(self) -> "FractionalIdeal":
        # I * conj(I) = N(I) O_K in quadratic fields; over Q, I = N(I) Z
        J = self.integral
        num = Ideal.of_integer(self.field, self.den)
        if self.field.degree == 2:
            num = J.conjugate() * num
        return FractionalIdeal(num, J.norm())

    def __mul__(self, other: "FractionalIdeal") -> "FractionalIdeal":
        return FractionalIdeal(self.integral * other.integral, self.den * other.den)

    def __pow__(self, n: int) -> "FractionalIdeal":
        if n < 0:
            return self.inverse() ** (-n)
        out = FractionalIdeal(Ideal.unit(self.field))
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return (isinstance(other, FractionalIdeal) and self.integral == other.integral
                and self.den == other.den)

    def __hash__(self):
        return hash((self.integral, self.den))

    def __repr__(self):
        return f"FractionalIdeal({self.integral.basis} / {self.den})"


# --------------------------------------------------------------------------
# primes


@dataclass(frozen=True)
class PrimeData:
    field: NumberField
    p: int
    ideal: Ideal
    norm: int
    residue_degree: int
    kind: str  # "rational", "split", "inert", "ramified"

    @property
    def residue_field(self) -> tuple[int, int]:
        """``(p, f)``: the residue field is F_{p^f}."""
        return (self.p, self.residue_degree)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def primes_above(F: NumberField, p: int) -> list[PrimeData]:
    if not _is_prime(p):
        raise NoSuchPrime(f"{p} is not a rational prime")
    if F.d is None:
        return [PrimeData(F, p, Ideal.of_integer(F, p), p, 1, "rational")]
    # minimal polynomial of omega: x^2 - t x + n
    w = F.omega
    t = 2 * w.a
    n = w.norm()
    t, n = int(t), int(n)
    roots = [r for r in range(p) if (r * r - t * r + n) % p == 0]
    if not roots:
        return [PrimeData(F, p, Ideal.of_integer(F, p), p * p, 2, "inert")]
    kind = "split" if len(roots) == 2 else "ramified"
    out = []
    for r in roots:
        I = Ideal.generated(F, [(p, 0), (-r, 1)])
        out.append(PrimeData(F, p, I, p, 1, kind))
    return out


def residue_data(F: NumberField, p: int, which=0) -> PrimeData:
    """The prime above ``p`` picked by ``which`` (index, "first" or "second")."""
    primes = primes_above(F, p)
    idx = {"first": 0, "second": 1}.get(which, which)
    if not isinstance(idx, int) or not 0 <= idx < len(primes):
        raise NoSuchPrime(f"no prime #{which!r} above {p} in {F.name}")
    return primes[idx]
