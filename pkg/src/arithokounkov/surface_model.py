"""Sections of O(m) on the projective line over Z with two norm families.

``BoxWeights(b_0..b_m)``: ``||s|| = max_j |a_j| / b_j``.  Powers use the
coefficients of ``(sum_j b_j x^j)^k``, which keeps products of short
sections short (``|sum a_i c_(j-i)| <= sum b_i b'_(j-i)``).

``FSScaled(lam)``: ``||s|| = exp(lam) * sup_z |s(z)| / (1 + |z|^2)^(m/2)``;
the k-th power is the same family at level ``k*m`` with ``k*lam``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .normed_module import (DEFAULT_BUDGET, BudgetExceeded, FubiniStudySup, NormedModule,
                            ShortVectorSet, short_vectors)
from .number_ring import make_field
from .reals import LogReal, parse_real


@dataclass(frozen=True)
class BoxWeights:
    weights: tuple

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if not w or any(x <= 0 for x in w):
            raise ValueError("box weights must be positive")
        object.__setattr__(self, "weights", w)

    def to_json(self):
        return {"box": [str(w) for w in self.weights]}


@dataclass(frozen=True)
class FSScaled:
    lam: LogReal

    def __post_init__(self):
        object.__setattr__(self, "lam", LogReal.coerce(self.lam))

    def to_json(self):
        return {"fs": {"lambda": str(self.lam)}}


@dataclass(frozen=True)
class SurfaceBundle:
    """``O(level)`` on P^1 over Z with a norm family."""

    level: int
    family: object

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if isinstance(self.family, BoxWeights) and len(self.family.weights) != self.level + 1:
            raise ValueError("need level + 1 box weights")

    @property
    def rank(self) -> int:
        return self.level + 1

    def to_json(self):
        return {"level": self.level, "family": self.family.to_json()}

    @classmethod
    def from_json(cls, data) -> "SurfaceBundle":
        fam = data["family"]
        if "box" in fam:
            w = tuple(Fraction(x) for x in fam["box"])
            return cls(len(w) - 1 if "level" not in data else int(data["level"]), BoxWeights(w))
        return cls(int(data["level"]), FSScaled(parse_real(str(fam["fs"]["lambda"]))))

    @classmethod
    def parse(cls, text: str, level: int | None = None) -> "SurfaceBundle":
        """``"box:1,1"`` or ``"fs:-1"`` (FS needs ``level``, default 1)."""
        kind, _, rest = text.partition(":")
        if kind == "box":
            w = tuple(Fraction(x.strip()) for x in rest.split(","))
            return cls(len(w) - 1, BoxWeights(w))
        if kind == "fs":
            return cls(1 if level is None else level, FSScaled(parse_real(rest)))
        raise ValueError(f"unrecognised bundle {text!r}")


def unit_box(level: int = 1) -> SurfaceBundle:
    return SurfaceBundle(level, BoxWeights((1,) * (level + 1)))


def _convolve(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def power(B: SurfaceBundle, k: int) -> SurfaceBundle:
    """The bundle ``k * B`` at level ``k * m``."""
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(B.family, BoxWeights):
        w = [Fraction(1)]
        for _ in range(k):
            w = _convolve(w, B.family.weights)
        return SurfaceBundle(B.level * k, BoxWeights(tuple(w)))
    return SurfaceBundle(B.level * k, FSScaled(B.family.lam * k))


def sections_lattice(B: SurfaceBundle) -> NormedModule:
    """``H^0(O(m))`` over Z with the family's norm."""
    Q = make_field("Q")
    if isinstance(B.family, BoxWeights):
        return NormedModule.box(Q, B.family.weights)
    return NormedModule(Q, B.rank, FubiniStudySup(B.level), scales=-B.family.lam)


def box_bounds(B: SurfaceBundle, divisor: int = 1) -> np.ndarray:
    """``floor(b_j / divisor)``: the coefficient box of a box bundle."""
    return np.array([int(w / divisor) for w in B.family.weights], dtype=np.int64)


def h0_closed_form(B: SurfaceBundle) -> LogReal:
    """``sum_j log(2 floor(b_j) + 1)`` for a box bundle."""
    return sum((LogReal.log_of(2 * int(b) + 1) for b in box_bounds(B)), LogReal(0))


def short_sections(B: SurfaceBundle, k: int = 1, budget: int = DEFAULT_BUDGET,
                   workers: int | None = None) -> ShortVectorSet:
    return short_vectors(sections_lattice(power(B, k)), budget, workers)


def h0_hat_power(B: SurfaceBundle, k: int, budget: int = DEFAULT_BUDGET,
                 workers: int | None = None) -> LogReal:
    """``h0(k B)`` as an exact real."""
    return short_sections(B, k, budget, workers).h0()


@dataclass
class VolumeEstimate:
    entries: list = field(default_factory=list)  # (k, h0, 2 h0 / k^2)
    richardson: list = field(default_factory=list)  # (k, k f(k) - (k-1) f(k-1))
    partial: bool = False
    failed_at: int | None = None
    message: str = ""

    @property
    def big(self) -> bool:
        return any(h.sign() > 0 for _, h, _ in self.entries)

    @property
    def last(self) -> float:
        return self.entries[-1][2] if self.entries else 0.0

    @property
    def extrapolated(self) -> float:
        return self.richardson[-1][1] if self.richardson else self.last

    def diagnostics(self) -> dict:
        vals = [v for _, _, v in self.entries]
        d1 = [b - a for a, b in zip(vals, vals[1:])]
        d2 = [b - a for a, b in zip(d1, d1[1:])]
        return {
            "monotone_increasing": all(x >= 0 for x in d1),
            "monotone_decreasing": all(x <= 0 for x in d1),
            "sign_changes": sum(1 for a, b in zip(d1, d1[1:]) if a * b < 0),
            "max_second_difference": max((abs(x) for x in d2), default=0.0),
        }

    def to_json(self) -> dict:
        return {
            "entries": [{"k": k, "h0": float(h), "h0_exact": str(h), "ratio": v}
                        for k, h, v in self.entries],
            "richardson": [{"k": k, "value": v} for k, v in self.richardson],
            "big": self.big, "partial": self.partial, "failed_at": self.failed_at,
            "message": self.message, "diagnostics": self.diagnostics(),
        }


def volume_estimate(B: SurfaceBundle, k_max: int, budget: int = DEFAULT_BUDGET,
                    workers: int | None = None, k_min: int = 1) -> VolumeEstimate:
    """``2 h0(k B) / k^2`` for ``k = k_min..k_max`` plus a Richardson column.

    With ``f(k) = vol + c/k + o(1/k)`` the combination ``k f(k) - (k-1) f(k-1)``
    removes the ``1/k`` term.
    """
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    est = VolumeEstimate()
    for k in range(k_min, k_max + 1):
        try:
            h = h0_closed_form(power(B, k)) if isinstance(B.family, BoxWeights) \
                else h0_hat_power(B, k, budget, workers)
        except BudgetExceeded as exc:
            est.partial, est.failed_at, est.message = True, k, str(exc)
            break
        est.entries.append((k, h, 2 * float(h) / k ** 2))
    for (k0, _, f0), (k1, _, f1) in zip(est.entries, est.entries[1:]):
        est.richardson.append((k1, k1 * f1 - k0 * f0))
    return est


def multiply_sections(s, t) -> np.ndarray:
    return np.convolve(np.asarray(s, dtype=object), np.asarray(t, dtype=object)).astype(np.int64)


def superadditivity_check(B: SurfaceBundle, k1: int, k2: int, sample: int = 200,
                          seed: int = 0) -> dict:
    """Products of short sections at levels ``k1``, ``k2`` stay short at ``k1 + k2``.

    Returns the number of distinct sampled products, all of which must lie
    in ``H0((k1+k2) B)``, and compares ``log`` of that count with ``h0``.
    """
    if not isinstance(B.family, BoxWeights):
        raise ValueError("products are exactly evaluable only for box bundles")
    rng = np.random.default_rng(seed)
    b1, b2 = box_bounds(power(B, k1)), box_bounds(power(B, k2))
    big = sections_lattice(power(B, k1 + k2))
    prods = set()
    bad = 0
    for _ in range(sample):
        s = rng.integers(-b1, b1 + 1)
        t = rng.integers(-b2, b2 + 1)
        st = multiply_sections(s, t)
        if big.is_short(st) is not True:
            bad += 1
        prods.add(tuple(int(x) for x in st))
    h = h0_closed_form(power(B, k1 + k2))
    return {"products": len(prods), "violations": bad,
            "log_products": math.log(len(prods)), "h0": float(h),
            "holds": bad == 0 and math.log(len(prods)) <= float(h) + 1e-12}
