"""Flag valuations on sections of O(m) over P^1_Z.

The flag is the fiber ``Y_1`` over ``p`` and a rational point ``a`` of that
fiber.  For a nonzero integer polynomial ``s`` of degree ``<= m``:

* ``nu1`` is the p-adic valuation of the coefficient gcd (order along the
  fiber),
* ``nu2`` is the order at ``a`` of ``s / p^nu1 mod p``; at infinity it is
  ``m - deg``.

The generic flag is a rational point ``z0`` of P^1_Q and ``nu_generic`` is the
order of ``s`` there.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .intlinalg import rank_mod_p
from .normed_module import DEFAULT_BUDGET, BudgetExceeded, short_vectors
from .number_ring import _is_prime
from .surface_model import BoxWeights, SurfaceBundle, box_bounds, power, sections_lattice


class ValuationError(ValueError):
    """Valuation of the zero section."""


@dataclass(frozen=True)
class FlagData:
    p: int
    point: object = 0  # residue in [0, p) or "inf"

    def __post_init__(self):
        if not _is_prime(int(self.p)):
            raise ValueError(f"{self.p} is not prime")
        pt = self.point
        if isinstance(pt, str):
            pt = "inf" if pt.strip().lower() in ("inf", "infinity", "oo") else int(pt)
        if pt != "inf":
            pt = int(pt)
            if not 0 <= pt < self.p:
                raise ValueError(f"point {pt} is not a residue mod {self.p}")
        object.__setattr__(self, "point", pt)

    @property
    def code(self) -> int:
        return _kernels.INF if self.point == "inf" else int(self.point)

    @property
    def log_norm(self) -> float:
        return math.log(self.p)

    def to_json(self):
        return {"p": self.p, "point": str(self.point)}


@dataclass(frozen=True)
class GenericFlag:
    z0: object = Fraction(0)  # a rational or "inf"

    def __post_init__(self):
        z = self.z0
        if isinstance(z, str):
            z = "inf" if z.strip().lower() in ("inf", "infinity", "oo") else Fraction(z)
        elif z != "inf":
            z = Fraction(z)
        object.__setattr__(self, "z0", z)

    def to_json(self):
        return {"z0": str(self.z0)}


# --------------------------------------------------------------------------
# single sections: straight-line definitions


def _strip(s):
    s = [int(x) for x in s]
    if not any(s):
        raise ValuationError("the zero section has no valuation")
    return s


def nu(s, F: FlagData, level: int | None = None) -> tuple[int, int]:
    """``(nu1, nu2)`` of the section with coefficients ``s`` (constant first)."""
    s = _strip(s)
    m = len(s) - 1 if level is None else level
    g = 0
    for x in s:
        g = math.gcd(g, x)
    p = F.p
    nu1 = 0
    while g % p == 0:
        g //= p
        nu1 += 1
    red = [(x // p ** nu1) % p for x in s]
    while red and red[-1] == 0:
        red.pop()
    if F.point == "inf":
        return nu1, m - (len(red) - 1)
    a = F.point
    order = 0
    while True:
        # divide by (x - a) over F_p
        q = [0] * (len(red) - 1)
        r = 0
        for j in range(len(red) - 1, -1, -1):
            r = (red[j] + a * r) % p
            if j:
                q[j - 1] = r
        if r:
            return nu1, order
        red = q
        order += 1


def nu_generic(s, G: GenericFlag, level: int | None = None) -> int:
    """Order of vanishing of ``s`` at ``z0`` over Q."""
    s = _strip(s)
    m = len(s) - 1 if level is None else level
    if G.z0 == "inf":
        deg = max(j for j, x in enumerate(s) if x)
        return m - deg
    z = G.z0
    poly = [Fraction(x) for x in s]
    while poly and poly[-1] == 0:
        poly.pop()
    order = 0
    while True:
        q = [Fraction(0)] * (len(poly) - 1)
        r = Fraction(0)
        for j in range(len(poly) - 1, -1, -1):
            r = poly[j] + z * r
            if j:
                q[j - 1] = r
        if r != 0:
            return order
        poly = q
        order += 1


def nu_many(coeffs, F: FlagData) -> np.ndarray:
    """Vectorised :func:`nu` over the rows of ``coeffs`` (kernel backed)."""
    return _kernels.nu_batch(coeffs, F.p, F.code)


# --------------------------------------------------------------------------
# orders achievable by box-constrained polynomials over F_p


def _taylor_rows(n: int, p: int, a) -> list[list[int]]:
    """Row ``j``: Taylor coefficients of ``x^j`` at ``a`` mod p (reversed at inf)."""
    if a == "inf":
        # order at infinity of x^j is n - j; use the basis e_(n-j)
        return [[1 if l == n - j else 0 for l in range(n + 1)] for j in range(n + 1)]
    rows = []
    for j in range(n + 1):
        rows.append([math.comb(j, l) * pow(a, j - l, p) % p if l <= j else 0 for l in range(n + 1)])
    return rows


def _subspace_orders(rows: list[list[int]], p: int) -> set[int]:
    """Orders (lowest nonzero Taylor index) attained by nonzero vectors of the span."""
    basis: dict[int, list[int]] = {}
    for r in rows:
        v = [x % p for x in r]
        while True:
            piv = next((i for i, x in enumerate(v) if x), None)
            if piv is None or piv not in basis:
                break
            b = basis[piv]
            c = v[piv]
            v = [(x - c * y) % p for x, y in zip(v, b)]
        if piv is not None:
            inv = pow(v[piv], -1, p)
            basis[piv] = [(x * inv) % p for x in v]
    return set(basis)


def _residues(bound: int, p: int) -> set[int]:
    if 2 * bound + 1 >= p:
        return set(range(p))
    return {x % p for x in range(-bound, bound + 1)}


def achievable_orders(bounds, p: int, a, budget: int = 10 ** 7) -> set[int]:
    """``{ord_a(t mod p) : |t_j| <= B_j, t not divisible by p}``.

    Exact.  When every residue set is all of F_p or ``{0}`` the attainable
    reductions form a subspace and elimination suffices; otherwise a
    reachability search over Taylor prefixes is used.
    """
    n = len(bounds) - 1
    res = [_residues(int(b), p) for b in bounds]
    rows = _taylor_rows(n, p, a)
    if all(len(r) in (1, p) for r in res):
        return _subspace_orders([rows[j] for j in range(n + 1) if len(res[j]) == p], p)
    out = set()
    active = [j for j in range(n + 1) if len(res[j]) > 1]
    for o in range(n + 1):
        # reachable prefixes (t_0..t_o) encoded base p
        states = {0}
        for j in active:
            pre = rows[j][: o + 1]
            new = set()
            for st in states:
                digits = [(st // p ** l) % p for l in range(o + 1)]
                for r in res[j]:
                    code = 0
                    for l in range(o, -1, -1):
                        code = code * p + (digits[l] + r * pre[l]) % p
                    new.add(code)
            states = new
            if len(states) > budget:
                raise BudgetExceeded(f"order search state space exceeds {budget}")
        low = p ** o
        if any(st % low == 0 and (st // low) % p for st in states):
            out.add(o)
    return out


# --------------------------------------------------------------------------
# valuation images


_cache: dict = {}
_cache_lock = threading.Lock()


def _scan_image(Bk: SurfaceBundle, F: FlagData, budget: int, workers) -> frozenset:
    if isinstance(Bk.family, BoxWeights):
        b = box_bounds(Bk)
        vol = math.prod(2 * int(x) + 1 for x in b)
        if vol > budget:
            raise BudgetExceeded(f"valuation scan over {vol} sections exceeds {budget}",
                                 box=[(-int(x), int(x)) for x in b])
        _kernels.set_threads(workers)
        seen = _kernels.box_valuation_scan(b, F.p, [F.code])[0]
        return frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(seen)))
    S = short_vectors(sections_lattice(Bk), budget, workers)
    pts = S.materialize()
    pts = pts[(pts != 0).any(axis=1)]
    if pts.shape[0] == 0:
        return frozenset()
    v = nu_many(pts, F)
    return frozenset(map(tuple, np.unique(v, axis=0).tolist()))


def layer_bounds(Bk: SurfaceBundle, p: int, i: int) -> np.ndarray:
    """Coefficient box of ``H0(Bk (x) p^i)`` divided by ``p^i``."""
    return box_bounds(Bk, p ** i)


def _structural_image(Bk: SurfaceBundle, F: FlagData, budget: int) -> frozenset:
    out = set()
    i = 0
    while True:
        b = layer_bounds(Bk, F.p, i)
        if not b.any():
            break
        for o in achievable_orders(b, F.p, F.point, budget):
            out.add((i, o))
        i += 1
    return frozenset(out)


def valuation_image(B: SurfaceBundle, F: FlagData, k: int = 1, method: str = "auto",
                    budget: int = DEFAULT_BUDGET, workers: int | None = None) -> frozenset:
    """The set ``v(kB)`` of flag valuations of nonzero short sections.

    ``method`` is ``"scan"`` (enumerate and valuate every short section),
    ``"structural"`` (box bundles: layer-by-layer order sets) or ``"auto"``
    (structural for box bundles).  Results are cached per
    ``(bundle, flag, k, method)``.
    """
    if method == "auto":
        method = "structural" if isinstance(B.family, BoxWeights) else "scan"
    key = (B, F, k, method)
    with _cache_lock:
        if key in _cache:
            return _cache[key]
    Bk = power(B, k)
    if method == "scan":
        img = _scan_image(Bk, F, budget, workers)
    elif method == "structural":
        if not isinstance(B.family, BoxWeights):
            raise ValueError("structural images need a box bundle")
        img = _structural_image(Bk, F, budget)
    else:
        raise ValueError(f"unknown method {method!r}")
    with _cache_lock:
        _cache[key] = img
    return img


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def generic_orders(Bk: SurfaceBundle, G: GenericFlag, scale_log=None,
                   budget: int = DEFAULT_BUDGET) -> set[int]:
    """Orders at ``z0`` of nonzero short sections of ``Bk``, optionally twisted.

    ``scale_log`` twists the norm by ``exp(-scale_log)`` (so a negative value
    shrinks the ball).  Box bundles with ``z0`` in ``{0, inf}`` are handled in
    closed form (order ``j`` is attained iff ``x^j`` is short); anything else
    enumerates.
    """
    from .reals import LogReal, floor_exp

    M = sections_lattice(Bk)
    if scale_log is not None:
        M = M.twist(scale_log)
    n = Bk.level
    if isinstance(Bk.family, BoxWeights) and (G.z0 == "inf" or G.z0 == 0):
        out = set()
        for j, w in enumerate(Bk.family.weights):
            r = LogReal.log_of(w) + (scale_log if scale_log is not None else 0)
            if floor_exp(r) >= 1:
                out.add(n - j if G.z0 == "inf" else j)
        return out
    S = short_vectors(M, budget)
    pts = S.materialize()
    return {nu_generic(p_, G, n) for p_ in pts if p_.any()}


# --------------------------------------------------------------------------
# the two fiber identities


def _fiber_reductions(Bk: SurfaceBundle, p: int, i: int, budget: int, workers=None):
    """Generators of the reductions of ``H0(Bk (x) p^i)`` after dividing by ``p^i``.

    Returns ``(generators, scan_points)``; for box bundles the generators are
    ``r e_j`` with ``r`` in the residue set of coordinate ``j`` (their span
    equals the span of the whole product set).
    """
    n = Bk.level
    if isinstance(Bk.family, BoxWeights):
        b = layer_bounds(Bk, p, i)
        gens = []
        for j, bj in enumerate(b):
            for r in _residues(int(bj), p):
                if r:
                    v = [0] * (n + 1)
                    v[j] = r
                    gens.append(v)
        return gens, b
    from .number_ring import FractionalIdeal, Ideal

    M = sections_lattice(Bk)
    Q = M.field
    M = M.with_lattice(FractionalIdeal(Ideal.of_integer(Q, p ** i)))
    pts = short_vectors(M, budget, workers).materialize()
    return [list(map(int, r)) for r in pts], pts


def lm_identity_check(B: SurfaceBundle, F: FlagData, k: int = 1, i: int = 0,
                      budget: int = DEFAULT_BUDGET, workers: int | None = None) -> dict:
    """Distinct orders at the flag point of the nonzero reductions of
    ``H0(kB (x) p^i)`` against the F_p-dimension of their span."""
    Bk = power(B, k)
    gens, src = _fiber_reductions(Bk, F.p, i, budget, workers)
    dim = rank_mod_p(gens, F.p) if gens else 0
    if isinstance(Bk.family, BoxWeights):
        b = src
        vol = math.prod(2 * int(x) + 1 for x in b)
        if vol <= budget:
            seen = _kernels.box_valuation_scan(b, F.p, [F.code])[0]
            orders = {int(o) for o in np.nonzero(seen[0])[0]}
            method = "scan"
        else:
            orders = achievable_orders(b, F.p, F.point)
            method = "structural"
    else:
        pts = np.asarray(src).reshape(-1, Bk.rank)
        red = pts % F.p
        red = red[red.any(axis=1)]
        orders = {nu(r, FlagData(F.p, F.point), Bk.level)[1] for r in red} if red.size else set()
        method = "scan"
    return {"count": len(orders), "dim": dim, "orders": sorted(orders),
            "equal": len(orders) == dim, "method": method}


def reduction_injection_check(B: SurfaceBundle, F: FlagData, k: int = 1, i: int = 0,
                              budget: int = DEFAULT_BUDGET, workers: int | None = None) -> dict:
    """Z-rank of the span of ``H0(kB (x) p^i)`` against the F_p-dimension of
    its reduction."""
    from .number_ring import FractionalIdeal, Ideal

    Bk = power(B, k)
    M = sections_lattice(Bk)
    M = M.with_lattice(FractionalIdeal(Ideal.of_integer(M.field, F.p ** i)))
    z = short_vectors(M, budget, workers).z_rank()
    gens, _ = _fiber_reductions(Bk, F.p, i, budget, workers)
    dim = rank_mod_p(gens, F.p) if gens else 0
    return {"rank_z": z, "dim_fp": dim, "equal": z == dim}
