"""Closed-form reference values used across the tests."""

import numpy as np


def hausdorff_to_interval(A, a: float, b: float) -> float:
    """Exact Hausdorff distance from a finite subset of R to ``[a, b]``."""
    x = np.sort(np.asarray(A, dtype=float).ravel())
    out = np.max(np.maximum(a - x, 0) + np.maximum(x - b, 0))
    # sup over [a, b] of the distance to x is attained at an endpoint or a midpoint
    probes = np.concatenate([[a, b], 0.5 * (x[1:] + x[:-1])])
    probes = probes[(probes >= a) & (probes <= b)]
    far = np.abs(probes[:, None] - x[None, :]).min(axis=1).max()
    return float(max(out, far))
