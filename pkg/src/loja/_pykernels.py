"""Numpy fallback for the compiled distance scans in ``_ckernels``."""

import numpy as np

_CHUNK_ELEMS = 2_000_000


def _pair_dists(P, Q):
    diff = P[:, None, :] - Q[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _chunks(n_rows, n_cols):
    step = max(1, _CHUNK_ELEMS // max(1, n_cols))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def min_dists(P, Q):
    P = np.ascontiguousarray(P, dtype=np.float64)
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    out = np.empty(P.shape[0])
    if Q.shape[0] == 0:
        out[:] = np.inf
        return out
    for sl in _chunks(P.shape[0], Q.shape[0]):
        out[sl] = _pair_dists(P[sl], Q).min(axis=1)
    return out


def directed_hausdorff(P, Q):
    if P.shape[0] == 0:
        return 0.0
    return float(min_dists(P, Q).max())


def nearest_stats(P, Q, tol):
    P = np.ascontiguousarray(P, dtype=np.float64)
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    n = P.shape[0]
    d1 = np.full(n, np.inf)
    d2 = np.full(n, np.inf)
    cnt = np.zeros(n, dtype=np.int64)
    if Q.shape[0] == 0:
        return d1, d2, cnt
    for sl in _chunks(n, Q.shape[0]):
        D = _pair_dists(P[sl], Q)
        if Q.shape[0] >= 2:
            part = np.partition(D, 1, axis=1)
            d1[sl] = part[:, 0]
            d2[sl] = part[:, 1]
        else:
            d1[sl] = D[:, 0]
        cnt[sl] = np.sum(D <= (d1[sl] + tol)[:, None], axis=1)
    return d1, d2, cnt
