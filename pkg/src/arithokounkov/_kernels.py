"""Hot loops, compiled with numba when available.

Every kernel has a pure-numpy twin with identical results.  The backend is
chosen once at import from ``ARITHOKOUNKOV_BACKEND`` (``numba`` or ``numpy``);
``use_backend`` switches it at runtime, which the benchmarks and the backend
equivalence tests rely on.
"""
from __future__ import annotations

import math
import os
from contextlib import contextmanager

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe, which warns on older TBB builds
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

ENV_FLAG = "ARITHOKOUNKOV_BACKEND"

# status codes shared by the classification kernels
OUT, IN, UNDECIDED = 0, 1, 2
# sentinel point code for the projective point at infinity
INF = -1


def _initial_backend() -> str:
    want = os.environ.get(ENV_FLAG, "numba").strip().lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"{ENV_FLAG} must be 'numba' or 'numpy', got {want!r}")
    return want if HAVE_NUMBA else "numpy"


_backend = _initial_backend()


def backend() -> str:
    return _backend


@contextmanager
def use_backend(name: str):
    global _backend
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    old, _backend = _backend, name
    try:
        yield
    finally:
        _backend = old


def set_threads(workers: int | None) -> None:
    if HAVE_NUMBA and workers:
        numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))


# --------------------------------------------------------------------------
# valuation of integer polynomials


def _jit(*args, **kw):
    if HAVE_NUMBA:
        return njit(*args, cache=True, **kw)
    return lambda f: f


@_jit(inline="always")
def _padic(x, p):
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@_jit
def _nu_one(c, p, a, buf):
    """(nu1, nu2) of a nonzero coefficient vector ``c``; ``buf`` is scratch."""
    n = c.shape[0] - 1
    nu1 = 1 << 30
    for j in range(n + 1):
        if c[j] != 0:
            v = _padic(c[j], p)
            if v < nu1:
                nu1 = v
    scale = 1
    for _ in range(nu1):
        scale *= p
    for j in range(n + 1):
        buf[j] = (c[j] // scale) % p
    if a == INF:
        top = n
        while buf[top] == 0:
            top -= 1
        return nu1, n - top
    # synthetic division by (x - a) until the remainder is nonzero
    deg = n
    while buf[deg] == 0:
        deg -= 1
    order = 0
    while True:
        r = 0
        for j in range(deg, -1, -1):
            q = r
            r = (buf[j] + a * r) % p
            buf[j] = q
        if r != 0:
            return nu1, order
        order += 1
        # the quotient now sits in buf[0..deg-1]
        deg -= 1


if HAVE_NUMBA:

    @njit(cache=True)
    def _nu_batch_nb(coeffs, p, a):
        n = coeffs.shape[0]
        out = np.empty((n, 2), dtype=np.int64)
        buf = np.empty(coeffs.shape[1], dtype=np.int64)
        for i in range(n):
            v1, v2 = _nu_one(coeffs[i], p, a, buf)
            out[i, 0] = v1
            out[i, 1] = v2
        return out

    @njit(cache=True)
    def _order_at(buf, n, p, a, taylor):
        # multiplicity of (x - a) in the nonzero reduction buf[0..n]
        if a == INF:
            top = n
            while buf[top] == 0:
                top -= 1
            return n - top
        if a == 0:
            low = 0
            while buf[low] == 0:
                low += 1
            return low
        for l in range(n + 1):
            t = 0
            for j in range(l, n + 1):
                t += buf[j] * taylor[j, l]
            if t % p != 0:
                return l
        return n + 1  # unreachable for a nonzero reduction

    @njit(cache=True, parallel=True)
    def _box_scan_nb(bounds, p, points, v1cap):
        n = bounds.shape[0]
        npt = points.shape[0]
        bmax = 0
        for j in range(n):
            if bounds[j] > bmax:
                bmax = bounds[j]
        # lookup tables indexed by c + bmax: p-adic valuation and residues
        vt = np.empty(2 * bmax + 1, dtype=np.int64)
        rt = np.zeros((v1cap + 1, 2 * bmax + 1), dtype=np.int64)
        for idx in range(2 * bmax + 1):
            c = idx - bmax
            vt[idx] = 1 << 30 if c == 0 else _padic(c, p)
            sc = 1
            for k in range(v1cap + 1):
                if k <= vt[idx]:
                    rt[k, idx] = (c // sc) % p
                sc *= p
        # taylor[q, j, l] = binom(j, l) * a_q^(j - l) mod p
        taylor = np.zeros((npt, n, n), dtype=np.int64)
        for q in range(npt):
            a = points[q]
            if a == INF:
                continue
            for j in range(n):
                taylor[q, j, 0] = 1 if j == 0 else (taylor[q, j - 1, 0] * a) % p
                for l in range(1, j + 1):
                    taylor[q, j, l] = (taylor[q, j - 1, l - 1] + a * taylor[q, j - 1, l]) % p
        lead = 2 * bounds[n - 1] + 1
        seen = np.zeros((lead, npt, v1cap + 1, n), dtype=np.bool_)
        for li in prange(lead):
            c = np.empty(n, dtype=np.int64)
            buf = np.empty(n, dtype=np.int64)
            for j in range(n - 1):
                c[j] = -bounds[j]
            c[n - 1] = li - bounds[n - 1]
            while True:
                nu1 = 1 << 30
                for j in range(n):
                    v = vt[c[j] + bmax]
                    if v < nu1:
                        nu1 = v
                if nu1 < (1 << 30):
                    for j in range(n):
                        buf[j] = rt[nu1, c[j] + bmax]
                    for q in range(npt):
                        seen[li, q, nu1, _order_at(buf, n - 1, p, points[q], taylor[q])] = True
                # odometer over the first n - 1 coordinates
                j = 0
                while j < n - 1:
                    if c[j] < bounds[j]:
                        c[j] += 1
                        break
                    c[j] = -bounds[j]
                    j += 1
                if j == n - 1:
                    break
        out = np.zeros((npt, v1cap + 1, n), dtype=np.bool_)
        for li in range(lead):
            for q in range(npt):
                for i in range(v1cap + 1):
                    for k in range(n):
                        if seen[li, q, i, k]:
                            out[q, i, k] = True
        return out


def _nu_batch_np(coeffs: np.ndarray, p: int, a: int) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.int64)
    N, w = c.shape
    nz = c != 0
    if not nz.any(axis=1).all():
        raise ValueError("zero section")
    v = np.zeros(c.shape, dtype=np.int64)
    rem = np.abs(c)
    active = nz.copy()
    while active.any():
        div = active & (rem % p == 0)
        v[div] += 1
        rem = np.where(div, rem // p, rem)
        active = div
    v = np.where(nz, v, np.iinfo(np.int64).max)
    nu1 = v.min(axis=1)
    scale = np.power(np.int64(p), nu1)
    red = (c // scale[:, None]) % p
    out = np.empty((N, 2), dtype=np.int64)
    out[:, 0] = nu1
    n = w - 1
    if a == INF:
        top = n - np.argmax(red[:, ::-1] != 0, axis=1)
        out[:, 1] = n - top
        return out
    # Taylor coefficients at a: repeated synthetic division, vectorised
    order = np.zeros(N, dtype=np.int64)
    done = np.zeros(N, dtype=bool)
    cur = red.copy()
    for k in range(w):
        r = np.zeros(N, dtype=np.int64)
        q = np.zeros_like(cur)
        for j in range(w - 1 - k, -1, -1):
            q[:, j] = r
            r = (cur[:, j] + a * r) % p
        newly = (~done) & (r != 0)
        order[newly] = k
        done |= newly
        if done.all():
            break
        cur = q
    out[:, 1] = order
    return out


def nu_batch(coeffs, p: int, a: int) -> np.ndarray:
    """Row-wise flag valuation ``(nu1, nu2)`` of nonzero coefficient vectors.

    ``a`` is a residue in ``[0, p)`` or ``INF``.
    """
    c = np.ascontiguousarray(coeffs, dtype=np.int64)
    if c.ndim != 2:
        raise ValueError("expected a 2-d coefficient array")
    if (~(c != 0).any(axis=1)).any():
        raise ValueError("zero section")
    if _backend == "numba":
        return _nu_batch_nb(c, int(p), int(a))
    return _nu_batch_np(c, int(p), int(a))


def _box_scan_np(bounds: np.ndarray, p: int, points, v1cap: int, chunk: int = 1 << 18):
    n = bounds.shape[0]
    seen = np.zeros((len(points), v1cap + 1, n), dtype=bool)
    sizes = 2 * bounds + 1
    total = int(np.prod(sizes.astype(object)))
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        pts = np.empty((idx.shape[0], n), dtype=np.int64)
        rest = idx
        for j in range(n):
            pts[:, j] = rest % sizes[j] - bounds[j]
            rest = rest // sizes[j]
        pts = pts[(pts != 0).any(axis=1)]
        if pts.shape[0]:
            for q, a in enumerate(points):
                nu = _nu_batch_np(pts, p, int(a))
                seen[q, nu[:, 0], nu[:, 1]] = True
    return seen


def box_valuation_scan(bounds, p: int, points) -> np.ndarray:
    """Boolean table ``seen[q, nu1, nu2]`` over every nonzero point of the box
    ``prod [-B_j, B_j]``, one layer per flag point ``points[q]``."""
    b = np.ascontiguousarray(bounds, dtype=np.int64)
    pts = np.ascontiguousarray(np.atleast_1d(points), dtype=np.int64)
    m = int(b.max()) if b.size else 0
    v1cap = 0
    while m >= p:
        m //= p
        v1cap += 1
    if _backend == "numba":
        return _box_scan_nb(b, int(p), pts, v1cap)
    return _box_scan_np(b, int(p), pts, v1cap)


# --------------------------------------------------------------------------
# classification of points of a rank-2 lattice against disc constraints


if HAVE_NUMBA:

    @njit(cache=True)
    def _classify_nb(u1lo, u1hi, u2lo, u2hi, re1, im1, re2, im2, r2lo, r2hi, tol):
        n1 = u1hi - u1lo + 1
        n2 = u2hi - u2lo + 1
        out = np.empty((n1, n2), dtype=np.int8)
        ns = re1.shape[0]
        for i in range(n1):
            u1 = u1lo + i
            for k in range(n2):
                u2 = u2lo + k
                st = IN
                for s in range(ns):
                    x = u1 * re1[s] + u2 * re2[s]
                    y = u1 * im1[s] + u2 * im2[s]
                    v = x * x + y * y
                    if v > r2hi[s] * (1 + tol):
                        st = OUT
                        break
                    if v >= r2lo[s] * (1 - tol):
                        st = UNDECIDED
                out[i, k] = st
        return out


def _classify_np(u1lo, u1hi, u2lo, u2hi, re1, im1, re2, im2, r2lo, r2hi, tol):
    u1 = np.arange(u1lo, u1hi + 1, dtype=np.float64)[:, None]
    u2 = np.arange(u2lo, u2hi + 1, dtype=np.float64)[None, :]
    out = np.full((u1.shape[0], u2.shape[1]), IN, dtype=np.int8)
    out_mask = np.zeros(out.shape, dtype=bool)
    und = np.zeros(out.shape, dtype=bool)
    for s in range(re1.shape[0]):
        x = u1 * re1[s] + u2 * re2[s]
        y = u1 * im1[s] + u2 * im2[s]
        v = x * x + y * y
        out_mask |= v > r2hi[s] * (1 + tol)
        und |= v >= r2lo[s] * (1 - tol)
    out[und] = UNDECIDED
    out[out_mask] = OUT
    return out


def classify_plane(u1range, u2range, emb, r2lo, r2hi, tol=1e-9) -> np.ndarray:
    """Status of every ``u`` in a 2-d integer box against ``|sigma(u)|^2 <= R_sigma^2``.

    ``emb`` has shape ``(S, 2)`` complex: ``sigma(u) = u1*emb[s,0] + u2*emb[s,1]``.
    ``r2lo``/``r2hi`` bracket ``R_sigma^2``.  Points within the relative
    tolerance of a boundary come back ``UNDECIDED`` for exact resolution.
    """
    emb = np.asarray(emb, dtype=np.complex128)
    args = (int(u1range[0]), int(u1range[1]), int(u2range[0]), int(u2range[1]),
            np.ascontiguousarray(emb[:, 0].real), np.ascontiguousarray(emb[:, 0].imag),
            np.ascontiguousarray(emb[:, 1].real), np.ascontiguousarray(emb[:, 1].imag),
            np.asarray(r2lo, dtype=np.float64), np.asarray(r2hi, dtype=np.float64), float(tol))
    if _backend == "numba":
        return _classify_nb(*args)
    return _classify_np(*args)


# --------------------------------------------------------------------------
# Fubini-Study sup norm on P^1: branch and bound


@_jit
def _poly_abs(c, zr, zi):
    # Horner in complex arithmetic
    n = c.shape[0] - 1
    xr = 0.0
    xi = 0.0
    for j in range(n, -1, -1):
        t = xr * zr - xi * zi + c[j]
        xi = xr * zi + xi * zr
        xr = t
    return math.sqrt(xr * xr + xi * xi)


@_jit
def _fs_disc_decide(c, t2lo, t2hi, max_cells):
    """Decide sup over |z| <= 1 of |s(z)|^2/(1+|z|^2)^n against [t2lo, t2hi].

    Returns OUT when a sample certainly exceeds ``t2hi``, IN when every cell
    bound stays below ``t2lo``, UNDECIDED otherwise.
    """
    n = c.shape[0] - 1
    slack = 1e-12
    absc = np.abs(c.astype(np.float64))
    # cheap witness search on a polar grid before branching
    for i in range(33):
        r = i / 32.0
        den = (1.0 + r * r) ** n
        for k in range(65):
            th = math.pi * k / 64.0
            sv = _poly_abs(c, r * math.cos(th), r * math.sin(th))
            if sv * sv / den * (1 - slack) > t2hi:
                return OUT
    cap = 4 * max_cells + 64
    r0s = np.empty(cap)
    r1s = np.empty(cap)
    a0s = np.empty(cap)
    a1s = np.empty(cap)
    top = 0
    # real coefficients: |s(conj z)| = |s(z)|, so theta in [0, pi] suffices
    for i in range(4):
        for k in range(8):
            r0s[top] = i / 4.0
            r1s[top] = (i + 1) / 4.0
            a0s[top] = math.pi * k / 8.0
            a1s[top] = math.pi * (k + 1) / 8.0
            top += 1
    visited = 0
    while top > 0:
        top -= 1
        r0 = r0s[top]
        r1 = r1s[top]
        a0 = a0s[top]
        a1 = a1s[top]
        visited += 1
        if visited > max_cells:
            return UNDECIDED
        rc = 0.5 * (r0 + r1)
        ac = 0.5 * (a0 + a1)
        zr = rc * math.cos(ac)
        zi = rc * math.sin(ac)
        sv = _poly_abs(c, zr, zi)
        val = sv * sv / (1.0 + rc * rc) ** n
        if val * (1 - slack) > t2hi:
            return OUT
        h = 0.5 * (r1 - r0) + r1 * 0.5 * (a1 - a0)
        d = 0.0
        pw = 1.0
        for j in range(1, n + 1):
            d += j * absc[j] * pw
            pw *= r1
        ub = (sv + h * d) ** 2 / (1.0 + r0 * r0) ** n
        if ub * (1 + slack) + 1e-300 <= t2lo:
            continue
        if top + 4 > cap:
            return UNDECIDED
        rm = rc
        am = ac
        r0s[top] = r0; r1s[top] = rm; a0s[top] = a0; a1s[top] = am; top += 1
        r0s[top] = r0; r1s[top] = rm; a0s[top] = am; a1s[top] = a1; top += 1
        r0s[top] = rm; r1s[top] = r1; a0s[top] = a0; a1s[top] = am; top += 1
        r0s[top] = rm; r1s[top] = r1; a0s[top] = am; a1s[top] = a1; top += 1
    return IN


@_jit
def _fs_decide(c, t2lo, t2hi, max_cells):
    s1 = _fs_disc_decide(c, t2lo, t2hi, max_cells)
    if s1 == OUT:
        return OUT
    s2 = _fs_disc_decide(c[::-1].copy(), t2lo, t2hi, max_cells)
    if s2 == OUT:
        return OUT
    if s1 == IN and s2 == IN:
        return IN
    return UNDECIDED


@_jit
def _fs_grid_sq(c, nr, na):
    """Max of ``|s(z)|^2 / (1+|z|^2)^n`` over an ``(nr+1) x (na+1)`` polar
    grid of both unit discs.

    A lower bound for the squared sup norm, convex in each coefficient.
    """
    n = c.shape[0] - 1
    best = 0.0
    for rev in range(2):
        for i in range(nr + 1):
            r = i / nr
            den = (1.0 + r * r) ** n
            for k in range(na + 1):
                th = math.pi * k / na
                if rev == 0:
                    sv = _poly_abs(c, r * math.cos(th), r * math.sin(th))
                else:
                    sv = _poly_abs(c[::-1], r * math.cos(th), r * math.sin(th))
                v = sv * sv / den
                if v > best:
                    best = v
    return best


@_jit
def _fs_line_min(x, h, nr, na):
    """Integer minimiser over ``[-h, h]`` of the grid bound in ``x[0]`` (ternary search)."""
    lo = -h
    hi = h
    while hi - lo > 2:
        m1 = lo + (hi - lo) // 3
        m2 = hi - (hi - lo) // 3
        x[0] = m1
        g1 = _fs_grid_sq(x, nr, na)
        x[0] = m2
        g2 = _fs_grid_sq(x, nr, na)
        if g1 <= g2:
            hi = m2 - 1 if g1 < g2 else m2
        else:
            lo = m1 + 1
    anchor = lo
    gbest = np.inf
    for v in range(lo, hi + 1):
        x[0] = v
        g = _fs_grid_sq(x, nr, na)
        if g < gbest:
            gbest = g
            anchor = v
    return anchor, gbest


@_jit
def _fs_line(c, h, t2lo, t2hi, max_cells):
    """Statuses of ``c[0] = -h..h`` with the other coordinates fixed.

    The ball is convex, so its trace on the line is an interval.  An integer
    ternary search on the (convex) grid lower bound either certifies the whole
    line outside or finds an anchor; from a certified-inside anchor each side
    is bisected (values between two inside points are inside, values past an
    outside point are outside) and only an undecided band is scanned.
    """
    m = 2 * h + 1
    st = np.full(m, OUT, dtype=np.int8)
    x = c.copy()
    # a coarse probe first: most lines of the enclosing ellipsoid miss the ball
    anchor, gbest = _fs_line_min(x, h, 2, 4)
    if gbest * (1 - 1e-12) > t2hi:
        return st
    anchor, gbest = _fs_line_min(x, h, 8, 16)
    if gbest * (1 - 1e-12) > t2hi:
        return st  # the grid witnesses exclude every value
    x[0] = anchor
    if _fs_decide(x, t2lo, t2hi, max_cells) != IN:
        for v in range(-h, h + 1):
            x[0] = v
            st[v + h] = _fs_decide(x, t2lo, t2hi, max_cells)
        return st
    for sgn in (1, -1):
        # the grid bound is below the true norm, so its last value under
        # t2hi lies at or beyond the true boundary; search it, then step in
        a = 0  # offsets from the anchor; a is known to pass the grid test
        b = h + 1 - sgn * anchor  # first offset past the range
        while b - a > 1:
            mid = (a + b) // 2
            x[0] = anchor + sgn * mid
            if _fs_grid_sq(x, 8, 16) * (1 - 1e-12) > t2hi:
                b = mid
            else:
                a = mid
        last_in = 0
        v = a
        while v > 0:
            x[0] = anchor + sgn * v
            d = _fs_decide(x, t2lo, t2hi, max_cells)
            if d == IN:
                last_in = v
                break
            st[anchor + sgn * v + h] = d  # OUT or UNDECIDED
            v -= 1
        for u in range(last_in + 1):
            st[anchor + sgn * u + h] = IN
    return st

if HAVE_NUMBA:

    @njit(cache=True)
    def _fs_enum_nb(cbound, l2w, t2lo, t2hi, budget, max_cells):
        n1 = cbound.shape[0]
        cap = 1024
        pts = np.empty((cap, n1), dtype=np.int64)
        st = np.empty(cap, dtype=np.int8)
        cnt = 0
        visits = 0
        c = np.zeros(n1, dtype=np.int64)
        partial = np.zeros(n1 + 1)  # partial[j]: L2 mass of coordinates j..n
        hi = np.zeros(n1, dtype=np.int64)
        j = n1 - 1

        # depth-first, fixing coordinates from the top degree down
        def limit(j, rem):
            if rem <= 0:
                return 0
            b = int(math.floor(math.sqrt(rem / l2w[j]) * (1 + 1e-12)))
            return min(cbound[j], b)

        hi[j] = limit(j, t2hi * (1 + 1e-12))
        c[j] = -hi[j]
        exceeded = False
        while True:
            visits += 1
            if visits > budget:
                exceeded = True
                break
            partial[j] = partial[j + 1] + l2w[j] * c[j] * c[j]
            if j == 0:
                h = hi[0]
                visits += 2 * h
                line = _fs_line(c.astype(np.float64), h, t2lo, t2hi, max_cells)
                for v in range(-h, h + 1):
                    s = line[v + h]
                    if s == OUT:
                        continue
                    if cnt == cap:
                        cap *= 2
                        p2 = np.empty((cap, n1), dtype=np.int64)
                        p2[:cnt] = pts[:cnt]
                        pts = p2
                        s2 = np.empty(cap, dtype=np.int8)
                        s2[:cnt] = st[:cnt]
                        st = s2
                    c[0] = v
                    pts[cnt] = c
                    st[cnt] = s
                    cnt += 1
                c[0] = h
            else:
                j -= 1
                hi[j] = limit(j, t2hi * (1 + 1e-12) - partial[j + 1])
                c[j] = -hi[j]
                continue
            # advance
            while j < n1 and c[j] >= hi[j]:
                j += 1
            if j == n1:
                break
            c[j] += 1
        return pts[:cnt], st[:cnt], visits, exceeded


def _fs_enum_np(cbound, l2w, t2lo, t2hi, budget, max_cells):
    n1 = cbound.shape[0]
    pts, sts = [], []
    visits = 0
    c = np.zeros(n1, dtype=np.int64)
    partial = np.zeros(n1 + 1)
    hi = np.zeros(n1, dtype=np.int64)

    def limit(j, rem):
        if rem <= 0:
            return 0
        b = int(math.floor(math.sqrt(rem / l2w[j]) * (1 + 1e-12)))
        return min(int(cbound[j]), b)

    j = n1 - 1
    hi[j] = limit(j, t2hi * (1 + 1e-12))
    c[j] = -hi[j]
    while True:
        visits += 1
        if visits > budget:
            return np.array(pts, dtype=np.int64).reshape(-1, n1), np.array(sts, dtype=np.int8), visits, True
        partial[j] = partial[j + 1] + l2w[j] * c[j] * c[j]
        if j == 0:
            h = int(hi[0])
            visits += 2 * h
            line = _fs_line(c.astype(np.float64), h, t2lo, t2hi, max_cells)
            keep = np.nonzero(line != OUT)[0]
            if keep.size:
                block = np.repeat(c[None, :], keep.size, axis=0)
                block[:, 0] = keep - h
                pts.extend(block)
                sts.extend(line[keep].tolist())
            c[0] = h
        else:
            j -= 1
            hi[j] = limit(j, t2hi * (1 + 1e-12) - partial[j + 1])
            c[j] = -hi[j]
            continue
        while j < n1 and c[j] >= hi[j]:
            j += 1
        if j == n1:
            break
        c[j] += 1
    return np.array(pts, dtype=np.int64).reshape(-1, n1), np.array(sts, dtype=np.int8), visits, False


def fs_enumerate(cbound, l2w, t2lo, t2hi, budget, max_cells=200_000):
    """Integer polynomials inside the FS ball of squared radius ``[t2lo, t2hi]``.

    Coordinates are pruned by the per-coefficient bounds ``cbound`` and by
    the L2 mass ``sum l2w[j]*c[j]^2 <= t2hi``; survivors are decided by the
    branch-and-bound sup test.  Returns ``(points, status, visits, exceeded)``
    with OUT points dropped.
    """
    cb = np.ascontiguousarray(cbound, dtype=np.int64)
    w = np.ascontiguousarray(l2w, dtype=np.float64)
    if _backend == "numba":
        return _fs_enum_nb(cb, w, float(t2lo), float(t2hi), int(budget), int(max_cells))
    return _fs_enum_np(cb, w, float(t2lo), float(t2hi), int(budget), int(max_cells))


def fs_decide(coeffs, t2lo: float, t2hi: float, max_cells: int = 200_000) -> int:
    return int(_fs_decide(np.asarray(coeffs, dtype=np.float64), float(t2lo), float(t2hi), int(max_cells)))
