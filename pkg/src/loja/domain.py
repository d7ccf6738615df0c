"""Axis-aligned sampling domains with an optional guard predicate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LojaError
from .expr import Guard, eval_guard, parse_guard


@dataclass(frozen=True)
class Sample:
    """Points drawn from a domain's bounding box.

    ``points`` covers the closed box (boundary included); ``inside`` marks the
    rows that satisfy the guard. ``grid_count`` rows at the top are the
    deterministic grid, the rest are seeded uniform draws.
    """

    points: np.ndarray
    inside: np.ndarray
    pitch: float
    grid_count: int

    @property
    def interior(self) -> np.ndarray:
        return self.points[self.inside]

    @property
    def grid(self) -> np.ndarray:
        return self.points[: self.grid_count]


def _odd_at_most(value: float) -> int:
    m = int(np.floor(value + 1e-9))
    if m % 2 == 0:
        m -= 1
    return max(m, 3)


class Domain:
    """A box ``[a1,b1] x ... x [an,bn]`` optionally cut down by a guard.

    The guard is a quantifier-free boolean combination of polynomial
    comparisons, e.g. ``x1 > -1`` for the half-open interval ``(-1, 1]``.
    """

    def __init__(self, bounds, guard: Guard | str | None = None):
        b = np.asarray(bounds, dtype=float).reshape(-1, 2)
        if b.shape[0] == 0:
            raise LojaError("empty domain: no coordinates")
        if np.any(b[:, 1] < b[:, 0]) or not np.all(np.isfinite(b)):
            raise LojaError(f"empty domain: bad bounds {b.tolist()}")
        self.bounds = b
        if isinstance(guard, str):
            guard = parse_guard(guard, arity=b.shape[0])
        self.guard = guard

    @classmethod
    def parse(cls, text: str, where: str | None = None) -> "Domain":
        """Read ``"a1,b1;a2,b2"``."""
        rows = []
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            lo, hi = (float(v) for v in part.split(","))
            rows.append((lo, hi))
        return cls(rows, where)

    def __repr__(self) -> str:
        box = ";".join(f"{lo:g},{hi:g}" for lo, hi in self.bounds)
        return f"Domain({box!r}{', guarded' if self.guard is not None else ''})"

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @property
    def lo(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def hi(self) -> np.ndarray:
        return self.bounds[:, 1]

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ok = np.all((X >= self.lo) & (X <= self.hi), axis=1)
        if self.guard is not None and ok.any():
            with np.errstate(all="ignore"):
                ok &= eval_guard(self.guard, X)
        return ok

    def grid(self, per_dim: int) -> np.ndarray:
        """Tensor grid with ``per_dim`` points per nondegenerate axis, endpoints included."""
        axes = []
        for lo, hi in self.bounds:
            axes.append(np.array([lo]) if hi == lo else np.linspace(lo, hi, per_dim))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def grid_pitch(self, per_dim: int) -> float:
        widths = self.hi - self.lo
        return float(np.max(widths) / (per_dim - 1))

    def nested_level(self, base_per_dim: int, level: int) -> tuple[np.ndarray, float]:
        """Grid of refinement ``level``; every coarser grid point reappears in it."""
        per_dim = (base_per_dim - 1) * 2**level + 1
        return self.grid(per_dim), self.grid_pitch(per_dim)

    def grid_size_for(self, samples: int) -> int:
        live = int(np.sum(self.hi > self.lo))
        if live == 0:
            return 1
        return _odd_at_most(samples ** (1.0 / live))

    def sample(self, samples: int, seed: int = 42, random_fraction: float = 0.25) -> Sample:
        """Deterministic odd-sized grid plus seeded uniform points, about ``samples`` in total.

        The grid has an odd count per axis so that box midpoints (and every
        box corner) are always sampled exactly.
        """
        if samples < 1:
            raise LojaError("samples must be positive")
        n_grid_target = max(1, int(round(samples * (1.0 - random_fraction))))
        per_dim = self.grid_size_for(n_grid_target)
        G = self.grid(per_dim)
        n_rand = max(0, samples - G.shape[0])
        rng = np.random.default_rng(seed)
        R = self.lo + (self.hi - self.lo) * rng.random((n_rand, self.dim))
        P = np.vstack([G, R]) if n_rand else G
        inside = self.contains(P)
        if not inside.any():
            raise LojaError(f"empty domain: no sample of {self!r} satisfies the guard")
        pitch = self.grid_pitch(per_dim) if np.any(self.hi > self.lo) else 0.0
        return Sample(P, inside, pitch, G.shape[0])
