import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial.distance import cdist, directed_hausdorff

from loja import _pykernels, kernels

try:
    from loja import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
IDS = ["python"] + (["cython"] if _ckernels is not None else [])


def clouds(max_rows=30):
    dims = st.integers(1, 4)
    return dims.flatmap(lambda d: st.tuples(
        arrays(float, st.tuples(st.integers(1, max_rows), st.just(d)),
               elements=st.floats(-100, 100, allow_nan=False)),
        arrays(float, st.tuples(st.integers(1, max_rows), st.just(d)),
               elements=st.floats(-100, 100, allow_nan=False)),
    ))


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
@given(pq=clouds())
def test_against_scipy(impl, pq):
    P, Q = pq
    D = cdist(P, Q)
    np.testing.assert_allclose(impl.min_dists(P, Q), D.min(axis=1), rtol=1e-12, atol=1e-12)
    want = directed_hausdorff(P, Q)[0]
    assert impl.directed_hausdorff(P, Q) == pytest.approx(want, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_nearest_stats(impl):
    P = np.array([[0.0, 0.0], [10.0, 0.0]])
    Q = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 3.0], [12.0, 0.0]])
    d1, d2, cnt = impl.nearest_stats(P, Q, 1e-9)
    np.testing.assert_allclose(d1, [1.0, 2.0])
    np.testing.assert_allclose(d2, [1.0, 9.0])
    assert list(cnt) == [2, 1]


@pytest.mark.skipif(_ckernels is None, reason="extension not built")
def test_backends_agree_on_large_input():
    rng = np.random.default_rng(0)
    P, Q = rng.normal(size=(700, 3)), rng.normal(size=(900, 3))
    np.testing.assert_allclose(_ckernels.min_dists(P, Q), _pykernels.min_dists(P, Q), rtol=1e-13)
    for a, b in zip(_ckernels.nearest_stats(P, Q, 1e-6), _pykernels.nearest_stats(P, Q, 1e-6)):
        np.testing.assert_allclose(a, b, rtol=1e-13)


def test_pure_python_switch():
    env = dict(os.environ, LOJA_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import loja.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("python", "cython")
