"""Normed O_K-modules, their short-vector sets and rank-one operations.

A module is ``M = J^r`` inside ``K^r`` for a fractional ideal ``J`` (``J = O_K``
by default), with one norm per complex embedding::

    ||m||_sigma = exp(-gamma_sigma) * desc_sigma(m)

where ``desc_sigma`` is a weighted max ``max_j |sigma(m_j)| / w_j`` or, for
``K = Q`` only, the Fubini-Study sup norm of the polynomial with coefficient
vector ``m``.  Twisting by ``alpha`` adds ``alpha`` to every ``gamma_sigma``.

Elements are integer vectors of length ``kappa * r`` holding coordinates in
the Z-basis of ``J`` (block ``j`` describes ``m_j``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .intlinalg import int_rank_array
from .number_ring import FractionalIdeal, Ideal, NumberField, PrimeData, make_field
from .reals import (LogReal, QuadraticNumber, compare_exp, floor_exp, parse_real)

DEFAULT_BUDGET = 10 ** 8


class BudgetExceeded(RuntimeError):
    """Enumeration would exceed the candidate budget."""

    def __init__(self, message: str, box=None, visits: int | None = None):
        super().__init__(message)
        self.box = box
        self.visits = visits


@dataclass(frozen=True)
class WeightedMax:
    """``max_j |x_j| / w_j`` with positive rational weights."""

    weights: tuple

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if any(x <= 0 for x in w):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "weights", w)

    def to_json(self):
        return {"max": [str(w) for w in self.weights]}


@dataclass(frozen=True)
class FubiniStudySup:
    """``sup_z |s(z)| / (1 + |z|^2)^(level/2)`` on the projective line."""

    level: int

    def to_json(self):
        return {"fs": self.level}


def fs_coefficient_bounds(level: int) -> list[Fraction]:
    """Squares of the Cauchy bounds ``|a_j| <= N(s) * sqrt(n^n / (j^j (n-j)^(n-j)))``.

    On ``|z| = r`` we have ``|a_j| r^j <= sup |s| <= N(s) (1 + r^2)^(n/2)``;
    the choice ``r^2 = j/(n-j)`` gives the bound (``0^0 = 1``).
    """
    n = level
    return [Fraction(n ** n, (j ** j) * ((n - j) ** (n - j))) for j in range(n + 1)]


def fs_l2_weights(level: int) -> list[Fraction]:
    """``1 / ((n+1) binom(n, j))``: FS-L2 norms of the monomials, squared."""
    n = level
    return [Fraction(1, (n + 1) * math.comb(n, j)) for j in range(n + 1)]


def fs_monomial_sq(level: int, j: int) -> Fraction:
    """Squared FS sup norm of ``x^j``: ``j^j (n-j)^(n-j) / n^n``."""
    n = level
    if n == 0:
        return Fraction(1)
    return Fraction((j ** j) * ((n - j) ** (n - j)), n ** n)


# --------------------------------------------------------------------------


class NormedModule:
    """A normed O_K-module ``J^r`` with per-embedding norm descriptors."""

    def __init__(self, field: NumberField, rank: int, norms, scales=None,
                 lattice: FractionalIdeal | None = None):
        self.field = field
        self.rank = int(rank)
        if isinstance(norms, (WeightedMax, FubiniStudySup)):
            norms = [norms] * field.degree
        self.norms = tuple(norms)
        if scales is None:
            scales = [LogReal(0)] * field.degree
        elif not isinstance(scales, (list, tuple)):
            scales = [scales] * field.degree
        self.scales = tuple(LogReal.coerce(s) for s in scales)
        self.lattice = lattice if lattice is not None else FractionalIdeal(Ideal.unit(field))
        self._validate()

    def _validate(self):
        F = self.field
        if len(self.norms) != F.degree or len(self.scales) != F.degree:
            raise ValueError("one norm descriptor per embedding is required")
        for e in F.embeddings:
            c = e.conjugate
            if self.norms[c] != self.norms[e.index] or self.scales[c] != self.scales[e.index]:
                raise ValueError("norm descriptors must be invariant under complex conjugation")
        for d in self.norms:
            if isinstance(d, WeightedMax) and len(d.weights) != self.rank:
                raise ValueError("weight count must equal the rank")
            if isinstance(d, FubiniStudySup):
                if not F.is_rational:
                    raise ValueError("Fubini-Study norms are only supported over Q")
                if d.level + 1 != self.rank:
                    raise ValueError("Fubini-Study level must be rank - 1")
        if self.lattice.field != F:
            raise ValueError("lattice ideal lives in another field")

    # constructors ------------------------------------------------------
    @classmethod
    def box(cls, field, weights, scale=0, lattice=None) -> "NormedModule":
        return cls(field, len(weights), WeightedMax(tuple(weights)), scale, lattice)

    # basic data ----------------------------------------------------------
    @property
    def kappa(self) -> int:
        return self.field.degree

    @property
    def width(self) -> int:
        return self.kappa * self.rank

    def __eq__(self, other):
        return (isinstance(other, NormedModule) and self.field == other.field
                and self.rank == other.rank and self.norms == other.norms
                and self.scales == other.scales and self.lattice == other.lattice)

    def __hash__(self):
        return hash((self.field, self.rank, self.norms, self.scales, self.lattice))

    def __repr__(self):
        return (f"NormedModule({self.field.name}, rank={self.rank}, norms={self.norms}, "
                f"scales={[str(s) for s in self.scales]}, lattice={self.lattice})")

    def lattice_basis(self) -> list[tuple[Fraction, ...]]:
        """Z-basis of ``J`` in O_K coordinates."""
        J = self.lattice
        return [tuple(Fraction(x, J.den) for x in row) for row in J.integral.basis]

    def coordinate(self, u, j: int) -> tuple[Fraction, ...]:
        """O_K coordinates of ``m_j`` for lattice coordinates ``u``."""
        B = self.lattice_basis()
        k = self.kappa
        blk = u[j * k:(j + 1) * k]
        return tuple(sum((int(blk[i]) * B[i][t] for i in range(k)), Fraction(0)) for t in range(k))

    def omega_matrix(self) -> np.ndarray:
        """Integer matrix ``W`` with ``omega * beta_i = sum_k W[i, k] beta_k``."""
        F = self.field
        B = self.lattice_basis()
        k = self.kappa
        if k == 1:
            return np.array([[1]], dtype=np.int64)
        # solve coords(omega * beta_i) = W[i] @ B
        rows = []
        for b in B:
            wb = F.to_quadratic(b) * F.omega
            c = F.from_quadratic(wb)
            c = [Fraction(x) for x in c]
            # B is upper triangular: b0 = (p, q), b1 = (0, s)
            w0 = c[0] / B[0][0]
            w1 = (c[1] - w0 * B[0][1]) / B[1][1]
            assert w0.denominator == 1 and w1.denominator == 1
            rows.append([int(w0), int(w1)])
        return np.array(rows, dtype=np.int64)

    # norm operations ---------------------------------------------------
    def twist(self, alpha) -> "NormedModule":
        a = LogReal.coerce(alpha)
        return NormedModule(self.field, self.rank, self.norms,
                            [s + a for s in self.scales], self.lattice)

    def with_lattice(self, lattice: FractionalIdeal) -> "NormedModule":
        return NormedModule(self.field, self.rank, self.norms, self.scales, lattice)

    def is_box(self) -> bool:
        return all(isinstance(d, WeightedMax) for d in self.norms)

    def radius_log(self, sigma: int, j: int) -> LogReal:
        """``log`` of the largest admissible ``|sigma(m_j)|`` for a box norm."""
        w = self.norms[sigma].weights[j]
        return self.scales[sigma] + LogReal.log_of(w)

    def is_short(self, u) -> bool | None:
        """Exact membership of lattice vector ``u`` in the unit ball.

        Returns None when the comparison is undecided.
        """
        u = [int(x) for x in u]
        if self.is_box():
            undecided = False
            for j in range(self.rank):
                y = self.coordinate(u, j)
                for e in self.field.embeddings:
                    w = self.norms[e.index].weights[j]
                    r = compare_exp(self.field.embed_sq(y, e.index) / (w * w),
                                    self.scales[e.index] * 2)
                    if r is False:
                        return False
                    if r is None:
                        undecided = True
            return None if undecided else True
        return _fs_is_short(self, u)

    def to_json(self) -> dict:
        J = self.lattice
        return {
            "field": self.field.name,
            "rank": self.rank,
            "lattice": {"basis": [list(r) for r in J.integral.basis], "den": J.den},
            "norms": [d.to_json() for d in self.norms],
            "scales": [str(s) for s in self.scales],
        }

    @classmethod
    def from_json(cls, data: dict) -> "NormedModule":
        F = make_field(data["field"])
        norms = []
        for d in data["norms"]:
            if "max" in d:
                norms.append(WeightedMax(tuple(Fraction(x) for x in d["max"])))
            else:
                norms.append(FubiniStudySup(int(d["fs"])))
        lat = None
        if "lattice" in data:
            lat = FractionalIdeal(Ideal(F, data["lattice"]["basis"]), int(data["lattice"]["den"]))
        return cls(F, int(data["rank"]), norms, [parse_real(s) for s in data["scales"]], lat)


# rank-one helpers ----------------------------------------------------------


def trivial_module(F: NumberField) -> NormedModule:
    """``O_K`` with the usual absolute values."""
    return NormedModule.box(F, [1])


def rank_one(F: NumberField, ideal: FractionalIdeal | None = None, weight=1, scale=0) -> NormedModule:
    """``(J, exp(-scale) |.| / weight)`` as a rank-one normed module."""
    return NormedModule(F, 1, WeightedMax((Fraction(weight),)), scale, ideal)


def integer_twist(alpha) -> NormedModule:
    """``Z(alpha) = (Z, exp(-alpha) |.|)``."""
    return rank_one(make_field("Q"), scale=alpha)


def prime_power_module(P: PrimeData, e: int) -> NormedModule:
    """``P^e`` inside ``K`` with the induced absolute values."""
    return rank_one(P.field, FractionalIdeal(P.ideal) ** e)


def _require_rank_one(L: NormedModule):
    if L.rank != 1 or not L.is_box():
        raise ValueError("expected a rank-one module with box norms")


def deg_hat(L: NormedModule, witness=None) -> LogReal:
    """Arithmetic degree ``log #(L / s O_K) - sum_sigma log ||s||_sigma``.

    ``witness`` is a nonzero lattice vector of ``L``; the first basis vector
    is used by default.  The index is computed from the HNF of ``s O_K``
    inside ``J`` and the norm product from exact embedding values, so the
    result genuinely depends on ``s`` unless the theory says otherwise.
    """
    _require_rank_one(L)
    F = L.field
    u = list(witness) if witness is not None else [1] + [0] * (L.kappa - 1)
    s = L.coordinate(u, 0)
    if all(x == 0 for x in s):
        raise ValueError("witness must be nonzero")
    J = L.lattice
    # index [J : s O_K] = N(s O_K) / N(J); clear denominators first
    den = 1
    for x in s:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    sI = Ideal.generated(F, [tuple(int(x * den) for x in s)])
    index = Fraction(sI.norm(), den ** F.degree) / J.norm()
    # product of |sigma(s)|^2 over embeddings; rational by Galois symmetry
    prod = QuadraticNumber(1)
    for e in F.embeddings:
        prod = prod * F.embed_sq(s, e.index)
    assert prod.is_rational
    out = LogReal.log_of(index) - LogReal.log_of(prod.a) / 2
    for e in F.embeddings:
        out = out + L.scales[e.index] + LogReal.log_of(L.norms[e.index].weights[0])
    return out


def deg_hat_numeric(L: NormedModule, witness) -> float:
    """Floating evaluation of the degree formula embedding by embedding."""
    _require_rank_one(L)
    F = L.field
    s = L.coordinate(list(witness), 0)
    den = 1
    for x in s:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    sI = Ideal.generated(F, [tuple(int(x * den) for x in s)])
    index = Fraction(sI.norm(), den ** F.degree) / L.lattice.norm()
    total = math.log(index)
    for e in F.embeddings:
        z = F.embed_complex([float(x) for x in s], e.index)
        w = float(L.norms[e.index].weights[0])
        total -= math.log(abs(z) / w) - float(L.scales[e.index])
    return total


def dual_rank_one(L: NormedModule) -> NormedModule:
    """``L^vee``: lattice ``J^-1``, weights inverted, scales negated."""
    _require_rank_one(L)
    return NormedModule(L.field, 1,
                        [WeightedMax((1 / d.weights[0],)) for d in L.norms],
                        [-s for s in L.scales], L.lattice.inverse())


def tensor_rank_one(M: NormedModule, L: NormedModule) -> NormedModule:
    """``M (x) L``: lattice ``J_M J_L``, norms multiplied per embedding."""
    _require_rank_one(L)
    if M.field != L.field:
        raise ValueError("field mismatch")
    norms, scales = [], []
    for e in M.field.embeddings:
        d, wl = M.norms[e.index], L.norms[e.index].weights[0]
        g = M.scales[e.index] + L.scales[e.index]
        if isinstance(d, WeightedMax):
            norms.append(WeightedMax(tuple(w * wl for w in d.weights)))
        else:
            norms.append(d)
            g = g + LogReal.log_of(wl)
        scales.append(g)
    return NormedModule(M.field, M.rank, norms, scales, M.lattice * L.lattice)


# --------------------------------------------------------------------------
# short vectors


class ShortVectorSet:
    """The finite set ``H0(M)`` of lattice vectors with every norm ``<= 1``.

    Box modules keep one factor array per O_K-coordinate (the unit ball is a
    product); other modules keep an explicit point array.  Undecided
    boundary points are excluded and counted separately.
    """

    def __init__(self, module: NormedModule, factors=None, points=None,
                 undecided: int = 0, undecided_points=None, visits: int = 0):
        self.module = module
        self.factors = factors
        self.points = points
        self.undecided = int(undecided)
        self.undecided_points = undecided_points
        self.visits = visits

    @property
    def count(self) -> int:
        if self.factors is not None:
            return math.prod(f.shape[0] for f in self.factors)
        return int(self.points.shape[0])

    def h0(self) -> LogReal:
        return LogReal.log_of(self.count)

    def materialize(self, limit: int = 10 ** 7) -> np.ndarray:
        """All points, lexicographically sorted, as an ``(N, kappa*r)`` array."""
        if self.points is not None:
            return self.points
        if self.count > limit:
            raise BudgetExceeded(f"{self.count} points exceed the materialisation limit {limit}")
        w = self.module.width
        if self.count == 0:
            return np.zeros((0, w), dtype=np.int64)
        if not self.factors:  # rank 0: only the zero vector
            return np.zeros((1, 0), dtype=np.int64)
        grids = [np.arange(f.shape[0]) for f in self.factors]
        idx = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(grids))
        out = np.concatenate([f[idx[:, j]] for j, f in enumerate(self.factors)], axis=1)
        return out.astype(np.int64)

    def as_set(self) -> set:
        return {tuple(int(x) for x in r) for r in self.materialize()}

    def contains(self, u) -> bool:
        u = np.asarray(u, dtype=np.int64)
        k = self.module.kappa
        if self.factors is not None:
            return all(bool((f == u[j * k:(j + 1) * k]).all(axis=1).any())
                       for j, f in enumerate(self.factors))
        return bool((self.points == u).all(axis=1).any())

    def z_rank(self) -> int:
        if self.factors is not None:
            return sum(int_rank_array(f) for f in self.factors)
        return int_rank_array(self.points)

    def ok_rank(self) -> int:
        """O_K-rank of the span: Z-rank of the omega-saturation over kappa."""
        M = self.module
        k = M.kappa
        if k == 1:
            return self.z_rank()
        W = M.omega_matrix()
        if self.factors is not None:
            tot = 0
            for f in self.factors:
                sat = np.concatenate([f, f @ W], axis=0)
                tot += int_rank_array(sat)
            assert tot % k == 0
            return tot // k
        P = self.points
        blocks = [P[:, j * k:(j + 1) * k] @ W for j in range(M.rank)]
        sat = np.concatenate([P, np.concatenate(blocks, axis=1)], axis=0)
        z = int_rank_array(sat)
        assert z % k == 0
        return z // k


def _float_bounds(x: LogReal) -> tuple[float, float]:
    return x.bounds()


def _factor_short(M: NormedModule, j: int, budget: int) -> tuple[np.ndarray, int]:
    """Short values of the ``j``-th coordinate as lattice coordinate rows."""
    F = M.field
    B = M.lattice_basis()
    if M.kappa == 1:
        # m_j = u * B[0][0]; |u| <= R / |B|
        R = M.radius_log(0, j) - LogReal.log_of(abs(B[0][0]))
        n = floor_exp(R)
        if 2 * n + 1 > budget:
            raise BudgetExceeded(f"coordinate {j}: {2 * n + 1} candidates", box=[(-n, n)])
        return np.arange(-n, n + 1, dtype=np.int64).reshape(-1, 1), 0
    # kappa = 2: one constraint per embedding up to conjugation
    sigmas = [e.index for e in F.embeddings if e.real or e.index < e.conjugate]
    emb = np.array([[F.embed_complex([float(x) for x in b], s) for b in B] for s in sigmas])
    r2 = [(M.radius_log(s, j) * 2).bounds() for s in sigmas]
    r2lo = np.exp([lo for lo, _ in r2]) * (1 - 1e-12)
    r2hi = np.exp([hi for _, hi in r2]) * (1 + 1e-12)
    # bounding box: u = A^-1 v with |v_k| <= R
    if F.embeddings[0].real:
        A = emb.real
        rad = np.sqrt(r2hi)
    else:
        A = np.array([[emb[0, 0].real, emb[0, 1].real], [emb[0, 0].imag, emb[0, 1].imag]])
        rad = np.sqrt(np.array([r2hi[0], r2hi[0]]))
    Ainv = np.linalg.inv(A)
    ub = np.floor(np.abs(Ainv) @ rad * (1 + 1e-9) + 1e-9).astype(np.int64)
    vol = int((2 * ub[0] + 1) * (2 * ub[1] + 1))
    if vol > budget:
        raise BudgetExceeded(f"coordinate {j}: candidate box of volume {vol}",
                             box=[(-int(b), int(b)) for b in ub])
    st = _kernels.classify_plane((-ub[0], ub[0]), (-ub[1], ub[1]), emb, r2lo, r2hi)
    ii, kk = np.nonzero(st != _kernels.OUT)
    keep, undecided = [], 0
    for i, k in zip(ii, kk):
        u = (int(i - ub[0]), int(k - ub[1]))
        if st[i, k] == _kernels.IN:
            keep.append(u)
            continue
        y = tuple(u[0] * B[0][t] + u[1] * B[1][t] for t in range(2))
        ok = True
        for s in sigmas:
            w = M.norms[s].weights[j]
            r = compare_exp(F.embed_sq(y, s) / (w * w), M.scales[s] * 2)
            if r is not True:
                ok = r
                if r is False:
                    break
        if ok is True:
            keep.append(u)
        elif ok is None:
            undecided += 1
    arr = np.array(sorted(keep), dtype=np.int64).reshape(-1, 2)
    return arr, undecided


def _fs_threshold(M: NormedModule) -> tuple[LogReal, Fraction]:
    """``(log T, g)`` with ``m`` short iff ``FS(u) <= T`` for lattice coordinates ``u``."""
    g = Fraction(M.lattice.integral.basis[0][0], M.lattice.den)
    return M.scales[0] - LogReal.log_of(g), g


def _fs_is_short(M: NormedModule, u, max_cells: int = 200_000) -> bool | None:
    logT, _ = _fs_threshold(M)
    n = M.norms[0].level
    u = [int(x) for x in u]
    nz = [j for j, x in enumerate(u) if x]
    if not nz:
        return True
    if len(nz) == 1:
        j = nz[0]
        return compare_exp(Fraction(u[j] ** 2) * fs_monomial_sq(n, j), logT * 2)
    lo, hi = (logT * 2).bounds()
    st = _kernels.fs_decide(u, math.exp(lo) * (1 - 1e-12), math.exp(hi) * (1 + 1e-12), max_cells)
    return {_kernels.IN: True, _kernels.OUT: False}.get(st)


def _fs_enumerate(M: NormedModule, budget: int) -> ShortVectorSet:
    logT, _ = _fs_threshold(M)
    n = M.norms[0].level
    lo, hi = (logT * 2).bounds()
    t2lo, t2hi = math.exp(lo) * (1 - 1e-12), math.exp(hi) * (1 + 1e-12)
    cb = [int(math.floor(math.sqrt(float(b) * t2hi) * (1 + 1e-12))) for b in fs_coefficient_bounds(n)]
    vol = math.prod(2 * b + 1 for b in cb)
    w = [float(x) for x in fs_l2_weights(n)]
    # the DFS walks every lattice point of the L2 ellipsoid containing the ball
    d = n + 1
    ell = math.exp(d / 2 * math.log(math.pi) - math.lgamma(d / 2 + 1)
                   + sum(0.5 * math.log(t2hi / x) for x in w))
    if min(ell, vol) > budget:
        raise BudgetExceeded(f"FS enumeration at level {n}: about {ell:.3g} candidates in the "
                             f"L2 ellipsoid exceed the budget {budget}",
                             box=[(-b, b) for b in cb], visits=0)
    pts, st, visits, exceeded = _kernels.fs_enumerate(cb, w, t2lo, t2hi, budget)
    if exceeded:
        raise BudgetExceeded(f"FS enumeration at level {n} exceeded {budget} visits "
                             f"(coefficient box volume {vol})",
                             box=[(-b, b) for b in cb], visits=visits)
    keep, und = [], []
    for p_, s in zip(pts, st):
        if s == _kernels.IN:
            keep.append(p_)
            continue
        r = _fs_is_short(M, p_, 4_000_000)  # exact monomial path or a deeper retry
        if r is True:
            keep.append(p_)
        elif r is None:
            und.append(p_)
    keep = np.array(keep, dtype=np.int64).reshape(-1, n + 1)
    keep = keep[np.lexsort(keep.T[::-1])] if keep.shape[0] else keep
    return ShortVectorSet(M, points=keep, undecided=len(und),
                          undecided_points=np.array(und, dtype=np.int64).reshape(-1, n + 1),
                          visits=visits)


def short_vectors(M: NormedModule, budget: int = DEFAULT_BUDGET, workers: int | None = None) -> ShortVectorSet:
    """Exact ``H0(M)``; raises :class:`BudgetExceeded` past ``budget`` candidates."""
    _kernels.set_threads(workers)
    if not M.is_box():
        return _fs_enumerate(M, budget)
    factors, und = [], []
    for j in range(M.rank):
        f, u = _factor_short(M, j, budget)
        factors.append(f)
        und.append(u)
    sizes = [f.shape[0] for f in factors]
    undecided = math.prod(s + u for s, u in zip(sizes, und)) - math.prod(sizes)
    return ShortVectorSet(M, factors=factors, undecided=undecided)


def h0_hat(M: NormedModule, budget: int = DEFAULT_BUDGET, workers: int | None = None):
    """``(H0(M), log #H0(M))``."""
    S = short_vectors(M, budget, workers)
    return S, S.h0()


def naive_short_vectors(M: NormedModule, max_box: int = 10 ** 6) -> set:
    """Brute-force oracle: test every lattice point of a full bounding box.

    The box comes from coarse float bounds on each coordinate, and each point
    is tested coordinate by coordinate from its embedding values, with exact
    comparison only near the boundary.
    """
    F = M.field
    k = M.kappa
    if M.is_box():
        B = M.lattice_basis()
        # |u_i| <= sum over embeddings of the inverse embedding matrix times R
        E = np.array([[F.embed_complex([float(x) for x in b], e.index) for b in B]
                      for e in F.embeddings])
        Einv = np.linalg.pinv(E)
        box = []
        for j in range(M.rank):
            R = np.array([math.exp(M.radius_log(e.index, j).bounds()[1]) for e in F.embeddings])
            ub = np.floor(np.abs(Einv) @ R * (1 + 1e-9) + 1e-9).astype(int)
            box.extend((-int(b), int(b)) for b in ub)
    else:
        logT, _ = _fs_threshold(M)
        T2 = math.exp((logT * 2).bounds()[1]) * (1 + 1e-12)
        box = [(-int(math.floor(math.sqrt(float(b) * T2))), int(math.floor(math.sqrt(float(b) * T2))))
               for b in fs_coefficient_bounds(M.norms[0].level)]
    vol = math.prod(hi - lo + 1 for lo, hi in box)
    if vol > max_box:
        raise BudgetExceeded(f"oracle box volume {vol} exceeds {max_box}", box=box)
    grids = [np.arange(lo, hi + 1) for lo, hi in box]
    pts = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(box))
    if not M.is_box():
        return {tuple(int(x) for x in p) for p in pts if _fs_is_short(M, p, 4_000_000) is True}
    Bf = np.array([[float(x) for x in b] for b in M.lattice_basis()])
    status = np.ones(pts.shape[0], dtype=np.int8)  # 1 in, 0 out, 2 boundary
    for j in range(M.rank):
        y = pts[:, j * k:(j + 1) * k] @ Bf
        for e in F.embeddings:
            om = F.omega_complex(e.index)
            z = y[:, 0] + (y[:, 1] * om if k == 2 else 0)
            v = np.abs(z) ** 2
            w = float(M.norms[e.index].weights[j])
            lo, hi = (M.scales[e.index] * 2).bounds()
            R2lo, R2hi = w * w * math.exp(lo), w * w * math.exp(hi)
            status[v > R2hi * (1 + 1e-9)] = 0
            near = (status == 1) & (v >= R2lo * (1 - 1e-9))
            status[near] = 2
    out = {tuple(int(x) for x in p) for p in pts[status == 1]}
    for p in pts[status == 2]:
        if M.is_short(p) is True:
            out.add(tuple(int(x) for x in p))
    return out


# --------------------------------------------------------------------------
# checks


def span_rank(M: NormedModule, S, ring: str = "OK") -> int:
    """Rank of the span of ``S`` over ``O_K`` (``"OK"``) or ``Z`` (``"Z"``)."""
    if isinstance(S, ShortVectorSet):
        return S.ok_rank() if ring == "OK" else S.z_rank()
    P = np.array([list(s) for s in S], dtype=np.int64).reshape(-1, M.width)
    return ShortVectorSet(M, points=P).ok_rank() if ring == "OK" else int_rank_array(P)


def minkowski_check(L: NormedModule, budget: int = DEFAULT_BUDGET) -> dict:
    """``h0(L) > deg(L) - kappa log 2 - (1/2) log|D_K|`` for a rank-one module."""
    F = L.field
    _, h = h0_hat(L, budget)
    rhs = deg_hat(L) - LogReal.log_of(2) * F.degree - LogReal.log_of(abs(F.discriminant)) / 2
    margin = h - rhs
    return {"h0": h, "bound": rhs, "margin": margin, "holds": margin.sign() > 0}


def gs_shift_check(M: NormedModule, t, budget: int = DEFAULT_BUDGET) -> dict:
    """``h0(M) >= h0(M(t)) - kappa r0 (t + log 3)`` with ``r0`` the O_K-rank of ``H0(M(t))``."""
    t = LogReal.coerce(t)
    if t.sign() < 0:
        raise ValueError("t must be nonnegative")
    _, h = h0_hat(M, budget)
    St, ht = h0_hat(M.twist(t), budget)
    r0 = St.ok_rank()
    rhs = ht - (t + LogReal.log_of(3)) * (M.kappa * r0)
    margin = h - rhs
    return {"h0": h, "h0_twisted": ht, "r0": r0, "bound": rhs, "margin": margin,
            "holds": margin.sign() >= 0}


def rank_inequalities_check(M: NormedModule, budget: int = DEFAULT_BUDGET) -> dict:
    """``rank_OK <H0(M(-delta))> <= rank_Z <H0(M)> / kappa <= rank_OK <H0(M)>``."""
    from .number_ring import delta_constant

    delta = delta_constant(M.field)
    S = short_vectors(M, budget)
    Sd = short_vectors(M.twist(-delta), budget)
    a, z, b = Sd.ok_rank(), S.z_rank(), S.ok_rank()
    k = M.kappa
    return {"rank_ok_shifted": a, "rank_z": z, "rank_ok": b,
            "holds": k * a <= z <= k * b, "delta": delta}
