"""Value types shared across the package: link functions, choice bits, seeds, gaps."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SEED_MASK = (1 << 64) - 1


class LinkFunction(enum.IntEnum):
    """Maps a pair of latent utilities to the probability that the left one is chosen.

    Integer values are shared with the compiled kernel.
    """

    LINEAR = 0
    NATURAL = 1
    LOGIT = 2

    @classmethod
    def parse(cls, name: "str | LinkFunction") -> "LinkFunction":
        if isinstance(name, LinkFunction):
            return name
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown link function {name!r}") from None

    def __call__(self, u: float, v: float) -> float:
        return link_eval(self, u, v)


class ChoiceOutcome(enum.IntEnum):
    """The observed bit: LEFT (0) if x_t was chosen, RIGHT (1) if y_t was."""

    LEFT = 0
    RIGHT = 1


def _check_utility(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"utility {name}={value!r} outside [0, 1]")


def link_eval(link: LinkFunction, u: float, v: float) -> float:
    """Probability that the left alternative (utility ``u``) beats the right (``v``)."""
    _check_utility("u", u)
    _check_utility("v", v)
    return _link_unchecked(link, u, v)


def _link_unchecked(link: int, u: float, v: float) -> float:
    # expression forms must stay in sync with _kernel.pyx
    if link == LinkFunction.LINEAR:
        return (1.0 + u - v) / 2.0
    if link == LinkFunction.NATURAL:
        s = u + v
        return u / s if s > 0.0 else 0.5
    if link == LinkFunction.LOGIT:
        return 1.0 / (1.0 + math.exp(v - u))
    raise ValueError(f"unknown link function {link!r}")


def draw_choice(p_left: float, rng) -> ChoiceOutcome:
    """Sample the choice bit given the probability of the left side winning."""
    return ChoiceOutcome.LEFT if rng.random() < p_left else ChoiceOutcome.RIGHT


def make_rng(seed: int) -> np.random.Generator:
    """Generator for one run; identical seeds give identical streams."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.default_rng(seed & SEED_MASK)


@dataclass(frozen=True)
class GapProfile:
    gaps: tuple[float, ...]
    best_arm: int
    hardness: float | None  # None when a non-best arm ties the best

    @property
    def n_arms(self) -> int:
        return len(self.gaps)


def argmax_lowest(values: Sequence[float]) -> int:
    best, best_val = 0, values[0]
    for i in range(1, len(values)):
        if values[i] > best_val:
            best, best_val = i, values[i]
    return best


def gap_profile(mu: Sequence[float]) -> GapProfile:
    """Per-arm gaps to the best arm and H, the sum of reciprocal non-best gaps."""
    if len(mu) == 0:
        raise ValueError("need at least one arm")
    for i, m in enumerate(mu):
        _check_utility(f"mu[{i}]", m)
    best = argmax_lowest(mu)
    gaps = tuple(mu[best] - m for m in mu)
    others = [g for i, g in enumerate(gaps) if i != best]
    hardness = None if any(g == 0.0 for g in others) else sum(1.0 / g for g in others)
    return GapProfile(gaps=gaps, best_arm=best, hardness=hardness)
