"""Registry of the worked examples shared by the suite and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import Domain
from .errors import LojaError
from .expr import PiecewiseFn, parse
from .multifun import SampledMultifunction

TAGS = ("ex3_8", "ex3_9", "ex4_9", "ex5_14", "ex5_16", "ex5_18", "ex6_4", "ex6_6",
        "prop6_circle", "twopoint")


@dataclass(frozen=True)
class PairFixture:
    f: PiecewiseFn
    g: PiecewiseFn
    domain: Domain


@dataclass(frozen=True)
class MultiFixture:
    branches: tuple[PiecewiseFn, ...]
    domain: Domain

    def sampled(self, samples: int = 1000, seed: int = 42) -> SampledMultifunction:
        S = self.domain.sample(samples, seed)
        return SampledMultifunction.from_branches(self.branches, S.interior)

    def pitch(self, samples: int = 1000) -> float:
        return self.domain.sample(samples, 0, random_fraction=0.25).pitch


@dataclass(frozen=True)
class SetFixture:
    X: np.ndarray
    pitch: float = 0.0
    params: dict = field(default_factory=dict)


def ex3_8(eps: float = 1e-8) -> PairFixture:
    return PairFixture(parse("x1"), parse("piecewise{ x1 < 1 : 1/(1 - x1) ; x1 == 1 : 1 }"),
                       Domain([[0.0, 1.0 - eps]]))


def ex3_9() -> PairFixture:
    return PairFixture(parse("0"), parse("piecewise{ x1 == 0 : 1 ; x1 > 0 : 0 }"),
                       Domain([[0.0, 1.0]]))


def ex4_9(M: float = 12) -> PairFixture:
    return PairFixture(parse("(x1 - floor(x1))^floor(x1)"), parse("x1 - floor(x1)"),
                       Domain([[0.0, float(M)]]))


def ex5_14() -> MultiFixture:
    return MultiFixture(
        (parse("piecewise{ x1 > 0 && x1 < 4 : sqrt(x1) ; x1 == 4 : 2 }"),
         parse("piecewise{ x1 == 4 : 1 ; x1 > 4 && x1 < 5 : 5 - x1 }")),
        Domain([[0.0, 5.0]], "x1 > 0 && x1 < 5"),
    )


def ex5_16() -> MultiFixture:
    return MultiFixture(
        (parse("piecewise{ x1 >= -1 && x1 < 4 : (x1 - 2)^2 }"),
         parse("piecewise{ x1 >= -1 && x1 <= 6 : 1 }"),
         parse("piecewise{ x1 >= -1 && x1 <= 6 : 2 }")),
        Domain([[-1.0, 6.0]]),
    )


def ex5_18(K: tuple[float, float] | None = None) -> MultiFixture:
    """H(x) = {x^2, x^2 + 1} on (-1, 1]; ``K`` restricts the sampled arguments."""
    guard = "x1 > -1 && x1 <= 1"
    br = (parse(f"piecewise{{ {guard} : x1^2 }}"), parse(f"piecewise{{ {guard} : x1^2 + 1 }}"))
    if K is None:
        return MultiFixture(br, Domain([[-1.0, 1.0]], "x1 > -1"))
    return MultiFixture(br, Domain([list(K)]))


def ex6_4() -> SetFixture:
    return SetFixture(np.array([[0.0], [1.0]]))


def twopoint() -> SetFixture:
    return SetFixture(np.array([[-1.0, 0.0], [1.0, 0.0]]))


def circle(n: int = 1000) -> SetFixture:
    th = 2 * np.pi * np.arange(n) / n
    return SetFixture(np.column_stack([np.cos(th), np.sin(th)]), 2 * np.pi / n, {"n": n})


def parabola(segments: int = 16) -> SetFixture:
    """{(0,0)} plus the arc y = -(x-1)^2, x in [1/2, 1], with ``segments`` equal x-steps."""
    x = np.linspace(0.5, 1.0, segments + 1)
    arc = np.column_stack([x, -(x - 1.0) ** 2])
    steps = np.linalg.norm(np.diff(arc, axis=0), axis=1)
    return SetFixture(np.vstack([[0.0, 0.0], arc]), float(steps.max()),
                      {"segments": segments, "h": 0.5 / segments})


def interval_with_point(n: int = 20) -> SetFixture:
    """[0, 1] sampled with ``n`` steps, plus the isolated point 2 (a 1-D fixture)."""
    x = np.linspace(0.0, 1.0, n + 1)
    return SetFixture(np.append(x, 2.0).reshape(-1, 1), 1.0 / n, {"n": n})


def get(tag: str, **params):
    table = {
        "ex3_8": ex3_8, "ex3_9": ex3_9, "ex4_9": ex4_9, "ex5_14": ex5_14, "ex5_16": ex5_16,
        "ex5_18": ex5_18, "ex6_4": ex6_4, "ex6_6": parabola, "prop6_circle": circle,
        "twopoint": twopoint,
    }
    if tag not in table:
        raise LojaError(f"unknown fixture tag {tag!r}; known: {', '.join(TAGS)}")
    return table[tag](**params)
