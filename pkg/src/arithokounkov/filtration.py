"""Lattice-point filtrations: ranks of twisted short-vector spans, the two
key bounds with per-instance minimal constants, and the fiber decomposition
of a surface section module along a prime."""
from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .normed_module import (DEFAULT_BUDGET, BudgetExceeded, NormedModule, WeightedMax,
                            deg_hat, dual_rank_one, prime_power_module, rank_one,
                            short_vectors, tensor_rank_one, trivial_module)
from .number_ring import NumberField, PrimeData, make_field, residue_data
from .reals import LogReal

CSV_COLUMNS = ["instance", "field", "kappa", "n", "r0", "h0", "lower", "upper", "minimal_C",
               "lower_margin", "upper_margin", "normalizer"]


class InvalidInstance(ValueError):
    """Chain degrees are not monotone or the chain does not start trivially."""


class IMaxTooSmall(ValueError):
    """The fiber ranks have not vanished by ``i_max``."""


def normalizer(r0: int) -> LogReal:
    """``r0 log r0 + r0`` with ``r0 log r0 := 0`` for ``r0 <= 1``."""
    if r0 <= 1:
        return LogReal(r0)
    return LogReal.log_of(r0) * r0 + r0


@dataclass
class FiltrationInstance:
    module: NormedModule
    chain: list  # rank-one modules, chain[0] trivial
    degrees: list = field(default_factory=list)

    def __post_init__(self):
        if not self.chain:
            self.chain = [trivial_module(self.module.field)]
        self.degrees = [deg_hat(L) for L in self.chain]
        if self.degrees[0].sign() != 0:
            raise InvalidInstance("the first chain element must have degree 0")
        for a, b in zip(self.degrees, self.degrees[1:]):
            if (b - a).sign() < 0:
                raise InvalidInstance("chain degrees must be nondecreasing")

    @property
    def n(self) -> int:
        return len(self.chain) - 1

    def to_json(self):
        return {"module": self.module.to_json(),
                "chain": [L.to_json() for L in self.chain],
                "degrees": [str(d) for d in self.degrees]}


@dataclass
class FiltrationProfile:
    ranks: list
    h0: LogReal
    h0_last: LogReal
    lower: LogReal
    upper: LogReal
    normalizer: LogReal
    counts: list

    @property
    def r0(self) -> int:
        return self.ranks[0]

    @property
    def monotone(self) -> bool:
        return all(a >= b for a, b in zip(self.ranks, self.ranks[1:]))

    def lower_deficit(self) -> LogReal:
        """``lower - h0``; positive means the bare lower bound fails."""
        return self.lower - self.h0

    def upper_deficit(self) -> LogReal:
        """``h0 - upper``; positive means the bare upper bound fails."""
        return self.h0 - self.upper

    def minimal_C(self) -> float:
        """Smallest ``C >= 0`` for which both bounds hold on this instance."""
        worst = 0.0
        for d in (self.lower_deficit(), self.upper_deficit()):
            if d.sign() <= 0:
                continue
            if self.normalizer.sign() == 0:
                return math.inf
            with mpmath.workdps(30):
                q = mpmath.mpf(d.interval(128).b) / mpmath.mpf(self.normalizer.interval(128).a)
            worst = max(worst, math.nextafter(float(q), math.inf))  # round up
        return worst

    def to_json(self):
        return {"ranks": self.ranks, "counts": [str(c) for c in self.counts],
                "h0": float(self.h0), "h0_last": float(self.h0_last),
                "lower": float(self.lower), "upper": float(self.upper),
                "normalizer": float(self.normalizer), "minimal_C": self.minimal_C(),
                "monotone_ranks": self.monotone}


def twisted(M: NormedModule, L: NormedModule) -> NormedModule:
    """``M (x) L^vee``."""
    return tensor_rank_one(M, dual_rank_one(L))


def profile(inst: FiltrationInstance, budget: int = DEFAULT_BUDGET) -> FiltrationProfile:
    ranks, counts = [], []
    h0 = h0_last = None
    for i, L in enumerate(inst.chain):
        S = short_vectors(twisted(inst.module, L), budget)
        ranks.append(S.ok_rank())
        counts.append(S.count)
        if i == 0:
            h0 = S.h0()
        h0_last = S.h0()
    a = inst.degrees
    lower = LogReal(0)
    upper = h0_last
    for i in range(1, len(a)):
        step = a[i] - a[i - 1]
        lower = lower + step * ranks[i]
        upper = upper + step * ranks[i - 1]
    return FiltrationProfile(ranks, h0, h0_last, lower, upper, normalizer(ranks[0]), counts)


def verify_key_bounds(inst: FiltrationInstance, C, budget: int = DEFAULT_BUDGET,
                      prof: FiltrationProfile | None = None) -> dict:
    """Check ``h0 >= lower - C D`` and ``h0 <= upper + C D`` with ``D = r0 log r0 + r0``."""
    prof = prof or profile(inst, budget)
    C = LogReal.coerce(Fraction(C) if isinstance(C, (int, float)) else C)
    slack = prof.normalizer * C.rational if C.terms == () else None
    if slack is None:
        raise ValueError("C must be rational")
    lm = prof.h0 - prof.lower + slack
    um = prof.upper + slack - prof.h0
    return {"lower_margin": lm, "upper_margin": um,
            "lower_holds": lm.sign() >= 0, "upper_holds": um.sign() >= 0,
            "minimal_C": prof.minimal_C(), "profile": prof}


# --------------------------------------------------------------------------
# fiber decomposition


def _fiber_count(M: NormedModule, P: PrimeData, i: int, budget: int):
    S = short_vectors(tensor_rank_one(M, prime_power_module(P, i)), budget)
    return S


def vanishing_index(M: NormedModule, P: PrimeData, cap: int = 64,
                    budget: int = DEFAULT_BUDGET) -> int:
    """Smallest ``i`` with ``H0(M (x) P^i) = {0}`` by doubling then bisection."""
    if _fiber_count(M, P, 0, budget).count == 1:
        return 0
    hi = 1
    while _fiber_count(M, P, hi, budget).count > 1:
        if hi >= cap:
            raise IMaxTooSmall(f"short vectors survive up to i = {cap}")
        hi = min(2 * hi, cap)
    lo = hi // 2  # nonzero short vectors at lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _fiber_count(M, P, mid, budget).count > 1:
            lo = mid
        else:
            hi = mid
    return hi


def fiber_decomposition(M: NormedModule, P: PrimeData, i_max: int | None = None,
                        budget: int = DEFAULT_BUDGET) -> list[int]:
    """``rank_OK <H0(M (x) P^i)>`` for ``i = 0..i_max``; the last entry is 0."""
    if i_max is None:
        i_max = vanishing_index(M, P, budget=budget)
    ranks = [_fiber_count(M, P, i, budget).ok_rank() for i in range(i_max + 1)]
    if ranks[-1] != 0:
        raise IMaxTooSmall(f"rank {ranks[-1]} at i_max = {i_max}")
    return ranks


def eq_two_gap(M: NormedModule, P: PrimeData, i_max: int | None = None,
               budget: int = DEFAULT_BUDGET) -> dict:
    """``|h0(M) - sum_i rank_i log N(P)|`` and its ``h log h`` normalisation."""
    ranks = fiber_decomposition(M, P, i_max, budget)
    h0 = short_vectors(M, budget).h0()
    total = sum(ranks)
    diff = h0 - LogReal.log_of(P.norm) * total
    g = abs(float(diff))
    h = M.rank
    scale = h * (math.log(h) if h > 2 else 1.0)
    return {"ranks": ranks, "sum_ranks": total, "h0": float(h0),
            "weighted_sum": total * math.log(P.norm), "gap": g,
            "normalized_gap": g / scale if h else 0.0}


# --------------------------------------------------------------------------
# randomized suite


def _rand_weight(rng, lo=-3.0, hi=3.0, scale=1) -> Fraction:
    return Fraction(math.exp(rng.uniform(lo, hi))).limit_denominator(1000) * scale


def _embedding_classes(F: NumberField) -> list[list[int]]:
    seen, out = set(), []
    for e in F.embeddings:
        if e.index in seen:
            continue
        cls = sorted({e.index, e.conjugate})
        seen.update(cls)
        out.append(cls)
    return out


def random_module(F: NumberField, rng, radius_scale=1, rank: int | None = None) -> NormedModule:
    """Box module with weights log-uniform in ``[e^-3, e^3]`` times ``radius_scale``."""
    r = int(rng.integers(1, 5)) if rank is None else rank
    norms = [None] * F.degree
    for cls in _embedding_classes(F):
        w = WeightedMax(tuple(_rand_weight(rng, scale=Fraction(radius_scale)) for _ in range(r)))
        for s in cls:
            norms[s] = w
    return NormedModule(F, r, norms)


_SMALL_PRIMES = (2, 3, 5, 7)


def random_chain(F: NumberField, rng, length: int | None = None) -> list[NormedModule]:
    """Trivial module followed by rank-one modules of nonnegative degree, sorted."""
    n = int(rng.integers(0, 7)) if length is None else length
    kinds = ["scalar", "prime"] + (["split"] if F.degree == 2 and F.embeddings[0].real else [])
    items = []
    for _ in range(n):
        kind = kinds[int(rng.integers(0, len(kinds)))]
        if kind == "scalar":
            s = Fraction(int(rng.integers(0, 31)), 20)
            items.append(rank_one(F, scale=s))
        elif kind == "prime":
            p = _SMALL_PRIMES[int(rng.integers(0, len(_SMALL_PRIMES)))]
            P = residue_data(F, p, 0)
            items.append(prime_power_module(P, -int(rng.integers(1, 3))))
        else:
            w = _rand_weight(rng, -1.0, 1.0)
            s = Fraction(int(rng.integers(0, 31)), 20)
            items.append(NormedModule(F, 1, [WeightedMax((w,)), WeightedMax((1 / w,))], s))
    keyed = [(deg_hat(L), i, L) for i, L in enumerate(items)]
    # exact sort by degree; index breaks ties deterministically
    import functools

    def cmp(x, y):
        c = (x[0] - y[0]).sign()
        return c if c else (x[1] > y[1]) - (x[1] < y[1])

    keyed.sort(key=functools.cmp_to_key(cmp))
    return [trivial_module(F)] + [L for _, _, L in keyed]


def random_instance(F: NumberField, seed: int, idx: int, radius_scale=1) -> FiltrationInstance:
    rng = np.random.default_rng([seed, idx])
    M = random_module(F, rng, radius_scale)
    chain = random_chain(F, rng)
    return FiltrationInstance(M, chain)


def _run_one(args):
    field_name, seed, idx, radius_scale, budget = args
    F = make_field(field_name)
    inst = random_instance(F, seed, idx, radius_scale)
    try:
        prof = profile(inst, budget)
    except BudgetExceeded as exc:
        return {"instance": idx, "field": F.name, "n": inst.n, "error": str(exc)}
    return {
        "instance": idx, "field": F.name, "kappa": F.degree, "n": inst.n, "r0": prof.r0,
        "h0": float(prof.h0), "lower": float(prof.lower), "upper": float(prof.upper),
        "minimal_C": prof.minimal_C(),
        "lower_margin": float(prof.h0 - prof.lower),
        "upper_margin": float(prof.upper - prof.h0),
        "normalizer": float(prof.normalizer),
        "monotone_ranks": prof.monotone,
        "_exact": (prof.h0, prof.lower, prof.upper, prof.normalizer),
    }


def run_suite(field_name: str, instances: int, seed: int = 0, radius_scale=1,
              workers: int = 1, budget: int = DEFAULT_BUDGET, C=None) -> dict:
    """Profile ``instances`` random instances; the fitted C is the maximal
    minimal C unless ``C`` is given.  Results do not depend on ``workers``."""
    args = [(field_name, seed, i, radius_scale, budget) for i in range(instances)]
    if workers and workers > 1 and instances > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run_one, args, chunksize=max(1, instances // (4 * workers))))
    else:
        rows = [_run_one(a) for a in args]
    ok = [r for r in rows if "error" not in r]
    errors = [r for r in rows if "error" in r]
    mins = [r["minimal_C"] for r in ok if math.isfinite(r["minimal_C"])]
    # r0 = 0 with a positive lower bound admits no finite C at all
    unbounded = [r["instance"] for r in ok if not math.isfinite(r["minimal_C"])]
    fitted = max(mins, default=0.0) if C is None else float(C)
    fitted_q = Fraction(fitted)  # exact value of the float
    violations = []
    for r in ok:
        h0, lo, up, D = r.pop("_exact")
        slack = D * fitted_q
        if (h0 - lo + slack).sign() < 0 or (up + slack - h0).sign() < 0:
            violations.append(r["instance"])
    summary = {
        "field": make_field(field_name).name, "instances": instances, "seed": seed,
        "radius_scale": str(radius_scale), "completed": len(ok), "budget_failures": len(errors),
        "max_minimal_C": max(mins, default=0.0),
        "median_minimal_C": statistics.median(mins) if mins else 0.0,
        "fitted_C": fitted, "violations_at_fitted_C": violations,
        "unbounded_instances": unbounded,
        "nonmonotone_rank_instances": [r["instance"] for r in ok if not r["monotone_ranks"]],
        "convention": "r0*log(r0) := 0 for r0 <= 1",
    }
    return {"rows": rows, "summary": summary}


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        if "error" in r:
            continue
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
