"""Okounkov bodies of box and FS bundles and the Boucksom-Chen comparison.

All geometry is exact over Q.  Logarithms only enter when areas are turned
into volumes (a final multiplication by ``log p`` or by the twist scale).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .normed_module import DEFAULT_BUDGET, BudgetExceeded
from .reals import LogReal, rel_diff
from .surface_model import BoxWeights, SurfaceBundle, h0_closed_form, h0_hat_power, power
from .valuation import (FlagData, GenericFlag, achievable_orders, generic_orders, layer_bounds,
                        valuation_image)

Point = tuple  # (Fraction, Fraction)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class RationalPolygon:
    """Counterclockwise strictly convex polygon with exact rational vertices."""

    vertices: tuple
    degenerate: bool = False

    @property
    def area(self) -> Fraction:
        v = self.vertices
        if len(v) < 3:
            return Fraction(0)
        s = Fraction(0)
        for i in range(len(v)):
            x0, y0 = v[i]
            x1, y1 = v[(i + 1) % len(v)]
            s += x0 * y1 - x1 * y0
        return s / 2

    def check_invariants(self) -> None:
        v = self.vertices
        assert len(set(v)) == len(v)
        if not self.degenerate:
            for i in range(len(v)):
                assert _cross(v[i], v[(i + 1) % len(v)], v[(i + 2) % len(v)]) > 0

    def contains(self, q) -> bool:
        q = (Fraction(q[0]), Fraction(q[1]))
        v = self.vertices
        if not v:
            return False
        if len(v) == 1:
            return q == v[0]
        if len(v) == 2:
            a, b = v
            return (_cross(a, b, q) == 0 and min(a[0], b[0]) <= q[0] <= max(a[0], b[0])
                    and min(a[1], b[1]) <= q[1] <= max(a[1], b[1]))
        return all(_cross(v[i], v[(i + 1) % len(v)], q) >= 0 for i in range(len(v)))

    def contains_polygon(self, other: "RationalPolygon") -> bool:
        return all(self.contains(q) for q in other.vertices)

    def to_json(self) -> dict:
        return {"vertices": [[_qstr(x), _qstr(y)] for x, y in self.vertices],
                "area": _qstr(self.area), "degenerate": self.degenerate}

    def to_svg(self, labels=("x", "y"), size: int = 320, points=()) -> str:
        return polygon_svg(self, labels, size, points)


def _qstr(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _as_points(points) -> list:
    return sorted({(Fraction(x), Fraction(y)) for x, y in points})


def convex_hull(points) -> RationalPolygon:
    """Monotone-chain hull; collinear boundary points are dropped."""
    pts = _as_points(points)
    if len(pts) <= 2:
        return RationalPolygon(tuple(pts), True)
    lower, upper = [], []
    for q in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    for q in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return RationalPolygon((pts[0], pts[-1]), True)
    return RationalPolygon(tuple(hull))


def hull_oracle(points) -> RationalPolygon:
    """Gift wrapping with pairwise orientation tests; O(n h)."""
    pts = _as_points(points)
    if len(pts) <= 2:
        return RationalPolygon(tuple(pts), True)
    start = pts[0]  # lowest x, then lowest y
    hull = [start]
    cur = start
    while True:
        cand = None
        for q in pts:
            if q == cur:
                continue
            if cand is None:
                cand = q
                continue
            c = _cross(cur, cand, q)
            # take the most clockwise point; on ties the farthest
            if c < 0 or (c == 0 and _d2(cur, q) > _d2(cur, cand)):
                cand = q
        cur = cand
        if cur == start:
            break
        hull.append(cur)
        if len(hull) > len(pts):
            raise RuntimeError("gift wrapping did not close")
    if len(hull) < 3 or all(_cross(hull[0], hull[1], q) == 0 for q in hull):
        ends = (min(pts), max(pts))
        return RationalPolygon(ends, True)
    return RationalPolygon(tuple(hull))


def _d2(a, b) -> Fraction:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def canonical(poly: RationalPolygon) -> tuple:
    """Vertex tuple rotated to start at the lexicographic minimum."""
    v = list(poly.vertices)
    if not v:
        return ()
    i = v.index(min(v))
    return tuple(v[i:] + v[:i])


# --------------------------------------------------------------------------
# Lambda and the counting reports


def scaled_image(B: SurfaceBundle, F: FlagData, k: int, **kw) -> set:
    return {(Fraction(a, k), Fraction(b, k)) for a, b in valuation_image(B, F, k, **kw)}


def lambda_points(B: SurfaceBundle, F: FlagData, k_max: int, **kw) -> set:
    """``union_{k <= k_max} v(kB) / k`` (coordinate-wise scaling)."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    out = set()
    for k in range(1, k_max + 1):
        out |= scaled_image(B, F, k, **kw)
    return out


def _h0(B: SurfaceBundle, k: int, budget: int) -> LogReal:
    Bk = power(B, k)
    if isinstance(Bk.family, BoxWeights):
        return h0_closed_form(Bk)
    return h0_hat_power(B, k, budget)


def counting_limit_report(B: SurfaceBundle, F: FlagData, k_max: int,
                          budget: int = DEFAULT_BUDGET, method: str = "auto") -> dict:
    """Per level ``k``: ``#v(kB)/k^2 log p``, ``h0(kB)/k^2`` and their gap."""
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    rows = []
    partial, message = False, ""
    logp = math.log(F.p)
    for k in range(1, k_max + 1):
        try:
            nv = len(valuation_image(B, F, k, method=method, budget=budget))
            h = _h0(B, k, budget)
        except BudgetExceeded as exc:
            partial, message = True, f"k = {k}: {exc}"
            break
        a = nv / k ** 2 * logp
        b = float(h) / k ** 2
        rows.append({"k": k, "count": nv, "count_ratio": a, "h0_ratio": b, "gap": abs(a - b)})
    slope = None
    if len(rows) >= 2:
        ks = np.array([r["k"] for r in rows], dtype=float)
        gs = np.array([r["gap"] for r in rows])
        slope = float(np.polyfit(ks, gs, 1)[0])
    return {"rows": rows, "slope": slope, "partial": partial, "message": message}


def main_identity_report(B: SurfaceBundle, F: FlagData, k_max: int,
                         budget: int = DEFAULT_BUDGET, method: str = "auto") -> dict:
    """``area(hull Lambda) log p``, ``#v(k_max B)/k_max^2 log p`` and ``h0/k_max^2``."""
    logp = math.log(F.p)
    pts = lambda_points(B, F, k_max, method=method, budget=budget)
    hull = convex_hull(pts)
    nv = len(valuation_image(B, F, k_max, method=method, budget=budget))
    h = _h0(B, k_max, budget)
    area = float(hull.area) * logp
    count = nv / k_max ** 2 * logp
    half_vol = float(h) / k_max ** 2
    big = nv > 0
    out = {
        "k_max": k_max, "p": F.p, "point": str(F.point),
        "hull": hull.to_json(), "lambda_points": len(pts),
        "area_log_p": area, "count_ratio_log_p": count, "half_volume": half_vol,
        "big": big, "degenerate_hull": hull.degenerate,
        "rel_area_count": rel_diff(area, count) if big else 0.0,
        "rel_count_volume": rel_diff(count, half_vol) if big else 0.0,
        "rel_area_volume": rel_diff(area, half_vol) if big else 0.0,
    }
    if isinstance(B.family, BoxWeights) and k_max >= 2:
        h1 = _h0(B, k_max - 1, budget)
        f1, f0 = 2 * float(h) / k_max ** 2, 2 * float(h1) / (k_max - 1) ** 2
        out["half_volume_richardson"] = (k_max * f1 - (k_max - 1) * f0) / 2
    return out, hull, pts


# --------------------------------------------------------------------------
# Boucksom-Chen incidence


@dataclass
class IncidenceProfile:
    side: str
    k: int
    grid: int
    t_scale: float  # t = tau * t_scale
    t_scale_exact: str
    taus: list  # grid parameters tau_g = g / grid
    segments: list  # (lo, hi) or None: the body at tau_g, scaled by 1/k
    decreasing: bool
    capped: bool
    staircase_area: Fraction = Fraction(0)  # in (x, tau) units
    convex_area: Fraction = Fraction(0)
    body: RationalPolygon | None = None
    log_factor: float = 1.0  # log p on the finite side

    @property
    def volume(self) -> float:
        """Convexified area in volume units (times ``log p`` on the finite side)."""
        return self.area * self.log_factor

    @property
    def volume_staircase(self) -> float:
        return self.area_staircase * self.log_factor

    @property
    def empty(self) -> bool:
        return all(s is None for s in self.segments)

    @property
    def area(self) -> float:
        return float(self.convex_area) * self.t_scale

    @property
    def area_staircase(self) -> float:
        return float(self.staircase_area) * self.t_scale

    @property
    def refinement_bound(self) -> float:
        """Upper bound on the staircase error from the tau step."""
        xs = [s for s in self.segments if s is not None]
        if not xs:
            return 0.0
        width = max(h for _, h in xs) - min(lo for lo, _ in xs)
        return float(width) * self.t_scale / self.grid

    def G(self, x) -> Fraction | None:
        """Largest grid ``tau`` whose body contains ``x`` (tau units)."""
        best = None
        for tau, s in zip(self.taus, self.segments):
            if s is not None and s[0] <= x <= s[1]:
                best = tau if best is None or tau > best else best
        return best

    def to_json(self) -> dict:
        return {
            "side": self.side, "k": self.k, "grid": self.grid,
            "t_scale": self.t_scale, "t_scale_exact": self.t_scale_exact,
            "segments": [None if s is None else [_qstr(s[0]), _qstr(s[1])] for s in self.segments],
            "taus": [_qstr(t) for t in self.taus],
            "decreasing": self.decreasing, "capped": self.capped,
            "staircase_area": self.area_staircase, "convex_area": self.area,
            "volume": self.volume, "volume_staircase": self.volume_staircase,
            "refinement_bound": self.refinement_bound, "empty": self.empty,
        }


def _staircase_area(taus, segs) -> Fraction:
    """``integral G dx`` for the step function ``G(x) = max{tau : x in seg(tau)}``."""
    items = [(t, s) for t, s in zip(taus, segs) if s is not None]
    if not items:
        return Fraction(0)
    xs = sorted({x for _, s in items for x in s})
    total = Fraction(0)
    for a, b in zip(xs, xs[1:]):
        g = max((t for t, s in items if s[0] <= a and b <= s[1]), default=Fraction(0))
        total += (b - a) * g
    return total


def _finish(prof: IncidenceProfile) -> IncidenceProfile:
    segs = prof.segments
    dec = True
    for s0, s1 in zip(segs, segs[1:]):
        if s1 is None:
            continue
        if s0 is None or not (s0[0] <= s1[0] and s1[1] <= s0[1]):
            dec = False
    prof.decreasing = dec
    prof.staircase_area = _staircase_area(prof.taus, segs)
    corners = []
    for t, s in zip(prof.taus, segs):
        if s is not None:
            corners += [(s[0], Fraction(0)), (s[1], Fraction(0)), (s[0], t), (s[1], t)]
    prof.body = convex_hull(corners)
    prof.convex_area = prof.body.area
    return prof


def _segment(orders, k):
    if not orders:
        return None
    return (Fraction(min(orders), k), Fraction(max(orders), k))


def bc_incidence(B: SurfaceBundle, G: GenericFlag | None, F: FlagData | None, k: int,
                 grid: int = 16, side: str = "archimedean",
                 budget: int = DEFAULT_BUDGET) -> IncidenceProfile:
    """Incidence profile on a ``grid + 1`` point twist grid.

    ``archimedean``: the generic-fiber body of ``kB`` with norms scaled by
    ``exp(k t)``, ``t = tau * t_max`` where ``t_max`` is the largest twist
    with a nonzero short section for box bundles at ``z0`` in ``{0, inf}``
    (``log max b_j / k``).  ``finite``: the fiber body of ``kB (x) p^ceil(k t)``
    with ``t = tau * i_top / k`` for the last nonempty layer ``i_top``.
    """
    if grid < 4:
        raise ValueError("grid must be at least 4")
    Bk = power(B, k)
    taus = [Fraction(g, grid) for g in range(grid + 1)]
    if side == "archimedean":
        if G is None:
            raise ValueError("archimedean side needs a generic flag")
        if isinstance(Bk.family, BoxWeights):
            w = Bk.family.weights
            bmax = max(w)
            if bmax < 1:  # nothing is short even before twisting
                segs = [None] * len(taus)
                return _finish(IncidenceProfile("archimedean", k, grid, 0.0, "0", taus, segs,
                                                True, False))
            t_exact = LogReal.log_of(bmax) / k
            segs = []
            for tau in taus:
                # x^j short after the twist iff b_j >= bmax^tau, i.e. b_j^grid >= bmax^g
                g = tau.numerator * (grid // tau.denominator)
                if G.z0 == 0 or G.z0 == "inf":
                    ok = [j for j, b in enumerate(w) if b ** grid >= bmax ** g]
                    orders = {Bk.level - j if G.z0 == "inf" else j for j in ok}
                else:
                    orders = generic_orders(Bk, G, -(t_exact * k) * tau, budget)
                segs.append(_segment(orders, k))
            capped = segs[-1] is not None and not (G.z0 == 0 or G.z0 == "inf")
        else:
            lam = Bk.family.lam
            n = Bk.level
            # smallest monomial norm: exp(lam) * sqrt(j^j (n-j)^(n-j) / n^n), j = n // 2
            from .normed_module import fs_monomial_sq

            t_exact = (-lam - LogReal.log_of(fs_monomial_sq(n, n // 2)) / 2) / k
            segs = [_segment(generic_orders(Bk, G, -(t_exact * k) * tau, budget), k) for tau in taus]
            capped = segs[-1] is not None
        return _finish(IncidenceProfile("archimedean", k, grid, float(t_exact), str(t_exact),
                                        taus, segs, True, capped))
    if side == "finite":
        if F is None or not isinstance(Bk.family, BoxWeights):
            raise ValueError("finite side needs a flag and a box bundle")
        layers = []
        i = 0
        while True:
            b = layer_bounds(Bk, F.p, i)
            if not b.any():
                break
            layers.append(achievable_orders(b, F.p, F.point))
            i += 1
        i_top = max((i for i, o in enumerate(layers) if o), default=0)
        segs = []
        for tau in taus:
            i = math.ceil(tau * i_top)
            segs.append(_segment(layers[i] if i < len(layers) else set(), k))
        t_scale = Fraction(i_top, k)
        prof = IncidenceProfile("finite", k, grid, float(t_scale), _qstr(t_scale),
                                taus, segs, True, False, log_factor=math.log(F.p))
        return _finish(prof)
    raise ValueError(f"unknown side {side!r}")


def bc_volume_report(prof: IncidenceProfile, B: SurfaceBundle, budget: int = DEFAULT_BUDGET) -> dict:
    """Graph-body area against ``h0(kB)/k^2`` (half the volume estimate)."""
    h = _h0(B, prof.k, budget)
    half_vol = float(h) / prof.k ** 2
    vol = prof.volume
    return {
        "side": prof.side, "k": prof.k, "grid": prof.grid, "empty": prof.empty,
        "area": prof.area, "volume": vol, "volume_staircase": prof.volume_staircase,
        "half_volume": half_vol,
        "rel_diff": rel_diff(vol, half_vol) if (vol or half_vol) else 0.0,
        "rel_diff_staircase": rel_diff(prof.volume_staircase, half_vol) if (vol or half_vol) else 0.0,
        "refinement_bound": prof.refinement_bound * prof.log_factor,
        "decreasing": prof.decreasing,
    }


# --------------------------------------------------------------------------
# SVG


def polygon_svg(poly: RationalPolygon, labels=("x", "y"), size: int = 320, points=()) -> str:
    """Plain SVG: the polygon, optional points and two labelled axes."""
    pad = 30
    pts = list(poly.vertices) + [(Fraction(a), Fraction(b)) for a, b in points]
    xmax = max([float(x) for x, _ in pts] + [1.0])
    ymax = max([float(y) for _, y in pts] + [1.0])
    sx = (size - 2 * pad) / xmax
    sy = (size - 2 * pad) / ymax

    def tr(x, y):
        return pad + float(x) * sx, size - pad - float(y) * sy

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    x0, y0 = tr(0, 0)
    x1, _ = tr(xmax, 0)
    _, y1 = tr(0, ymax)
    out.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}" stroke="black"/>')
    out.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}" stroke="black"/>')
    out.append(f'<text x="{x1:.2f}" y="{y0 + 18:.2f}" font-size="12">{labels[0]} ({xmax:g})</text>')
    out.append(f'<text x="{x0 - 25:.2f}" y="{y1 - 6:.2f}" font-size="12">{labels[1]} ({ymax:g})</text>')
    if poly.vertices:
        coords = " ".join("%.2f,%.2f" % tr(x, y) for x, y in poly.vertices)
        out.append(f'<polygon points="{coords}" fill="#9ecae1" fill-opacity="0.6" stroke="#08519c"/>')
    for a, b in points:
        cx, cy = tr(a, b)
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="1.5" fill="#08306b"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
