import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arithokounkov import _kernels
from arithokounkov.normed_module import fs_coefficient_bounds, fs_l2_weights, short_vectors
from arithokounkov.surface_model import SurfaceBundle, sections_lattice
from arithokounkov.valuation import FlagData, nu

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def both(fn):
    out = {}
    for be in ("numba", "numpy"):
        with _kernels.use_backend(be):
            out[be] = fn()
    return out["numba"], out["numpy"]


def test_backend_flag_in_subprocess():
    code = "from arithokounkov import _kernels; print(_kernels.backend())"
    env = dict(os.environ, ARITHOKOUNKOV_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    env["ARITHOKOUNKOV_BACKEND"] = "fortran"
    bad = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert bad.returncode != 0 and "ARITHOKOUNKOV_BACKEND" in bad.stderr


def test_use_backend_restores():
    before = _kernels.backend()
    with _kernels.use_backend("numpy"):
        assert _kernels.backend() == "numpy"
    assert _kernels.backend() == before


@needs_numba
@given(st.sampled_from([2, 3, 5]), st.integers(0, 4),
       st.lists(st.lists(st.integers(-40, 40), min_size=5, max_size=5).filter(any), min_size=1, max_size=30))
def test_nu_batch_backends_agree(p, a, rows):
    a = a % p if a < 4 else _kernels.INF
    arr = np.array(rows, dtype=np.int64)
    x, y = both(lambda: _kernels.nu_batch(arr, p, a))
    assert np.array_equal(x, y)
    F = FlagData(p, "inf" if a == _kernels.INF else a)
    assert [tuple(map(int, r)) for r in x] == [nu(r, F, 4) for r in rows]


@needs_numba
@given(st.lists(st.integers(0, 6), min_size=1, max_size=4), st.sampled_from([2, 3, 5]))
def test_box_scan_backends_agree(bounds, p):
    x, y = both(lambda: _kernels.box_valuation_scan(bounds, p, [0, 1 % p, _kernels.INF]))
    assert np.array_equal(x, y)


@needs_numba
def test_classify_plane_backends_agree():
    emb = np.array([[1.0, math.sqrt(2)], [1.0, -math.sqrt(2)]], dtype=complex)
    x, y = both(lambda: _kernels.classify_plane((-40, 40), (-30, 30), emb, [400.0, 400.0], [400.0, 400.0]))
    assert np.array_equal(x, y)
    assert set(np.unique(x)) <= {_kernels.OUT, _kernels.IN, _kernels.UNDECIDED}


@needs_numba
@pytest.mark.parametrize("level,t2", [(1, 1.0), (2, math.e ** 2), (3, 1.0)])
def test_fs_enumerate_backends_agree(level, t2):
    cb = [int(math.sqrt(float(b) * t2)) + 1 for b in fs_coefficient_bounds(level)]
    w = [float(v) for v in fs_l2_weights(level)]
    x, y = both(lambda: _kernels.fs_enumerate(cb, w, t2, t2, 10 ** 7))
    for a, b in zip(x, y):
        assert np.array_equal(np.asarray(a), np.asarray(b))


@needs_numba
def test_short_vectors_same_under_both_backends():
    M = sections_lattice(SurfaceBundle.parse("fs:-1", level=2))
    x, y = both(lambda: short_vectors(M).as_set())
    assert x == y and len(x) > 1


def test_fs_decide_statuses():
    # level 1: sup |c z| / sqrt(1 + |z|^2) = |c|
    assert _kernels.fs_decide([0.0, 0.5], 1.0, 1.0) == _kernels.IN
    assert _kernels.fs_decide([0.0, 2.0], 1.0, 1.0) == _kernels.OUT
