"""Singleton bandit machines: black-box MAB policies with reset/advance/feedback.

Every machine enforces strict alternation of ``advance`` and ``feedback``
starting from ``advance``, and only accepts rewards in [0, 1].
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

__all__ = ["ContractViolation", "SingletonBanditMachine", "Ucb", "LinearUcb"]


class ContractViolation(RuntimeError):
    """advance/feedback called out of order."""


class SingletonBanditMachine:
    """Alternation guard shared by all machines. Subclasses implement ``_select``
    and ``_update``."""

    def __init__(self) -> None:
        self._pending: int | None = None

    @property
    def pending(self) -> int | None:
        return self._pending

    def reset(self) -> None:
        self._pending = None
        self._clear()

    def advance(self) -> int:
        if self._pending is not None:
            raise ContractViolation("advance called while feedback is pending")
        arm = self._select()
        self._pending = arm
        return arm

    def feedback(self, reward: float) -> None:
        if self._pending is None:
            raise ContractViolation("feedback called without a preceding advance")
        reward = float(reward)
        if not 0.0 <= reward <= 1.0:
            raise ValueError(f"reward {reward!r} outside [0, 1]")
        arm, self._pending = self._pending, None
        self._update(arm, reward)

    def _clear(self) -> None:
        raise NotImplementedError

    def _select(self) -> int:
        raise NotImplementedError

    def _update(self, arm: int, reward: float) -> None:
        raise NotImplementedError


class Ucb(SingletonBanditMachine):
    """UCB over ``n_arms`` arms with robustness parameter ``alpha``.

    Index of arm x at global time t is ``mean_x + sqrt((alpha + 2) ln t / (2 t_x))``.
    Unplayed arms have infinite index and are tried first, in index order.
    """

    def __init__(self, n_arms: int, alpha: float = 3.0) -> None:
        if n_arms < 1:
            raise ValueError("n_arms must be positive")
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        super().__init__()
        self.n_arms = int(n_arms)
        self.alpha = float(alpha)
        self._clear()

    def _clear(self) -> None:
        self.counts = [0] * self.n_arms
        self.sums = [0.0] * self.n_arms
        self.t = 1

    @property
    def means(self) -> list[float]:
        return [s / n if n else math.inf for s, n in zip(self.sums, self.counts)]

    def index(self, arm: int) -> float:
        n = self.counts[arm]
        if n == 0:
            return math.inf
        # expression form must stay in sync with _kernel.pyx
        return self.sums[arm] / n + math.sqrt((self.alpha + 2.0) * math.log(self.t) / (2.0 * n))

    def _select(self) -> int:
        counts = self.counts
        for x in range(self.n_arms):
            if counts[x] == 0:
                return x
        scale = (self.alpha + 2.0) * math.log(self.t)
        sums = self.sums
        best, best_val = 0, -math.inf
        for x in range(self.n_arms):
            n = counts[x]
            val = sums[x] / n + math.sqrt(scale / (2.0 * n))
            if val > best_val:
                best, best_val = x, val
        return best

    def _update(self, arm: int, reward: float) -> None:
        self.counts[arm] += 1
        self.sums[arm] += reward
        self.t += 1


class LinearUcb(SingletonBanditMachine):
    """Optimism over a confidence ellipsoid for linear rewards on a finite arm set.

    The reward of candidate ``x`` is modelled as ``theta . x`` (or
    ``theta . [x, 1]`` when ``intercept`` is set). Each round picks the
    candidate maximising ``theta_hat . x + beta_t * ||x||_{G^-1}`` with
    ``beta_t = noise_scale * sqrt(d ln(1 + t)) + 1`` and ``G = reg * I + sum x x^T``.
    ``advance`` returns a candidate index.

    ``noise_scale`` is the sub-Gaussian constant of the rewards; 1/2 holds for
    any reward in [0, 1].
    """

    def __init__(
        self,
        candidates: Sequence[Sequence[float]],
        reg: float = 1.0,
        intercept: bool = False,
        noise_scale: float = 0.5,
    ) -> None:
        arms = np.atleast_2d(np.asarray(candidates, dtype=float))
        if arms.shape[0] == 0:
            raise ValueError("candidate list is empty")
        if reg <= 0:
            raise ValueError("reg must be positive")
        super().__init__()
        self.candidates = arms
        self.intercept = intercept
        self.features = np.hstack([arms, np.ones((len(arms), 1))]) if intercept else arms
        self.dim = self.features.shape[1]
        self.reg = float(reg)
        self.noise_scale = float(noise_scale)
        self._clear()

    def _clear(self) -> None:
        self.gram = self.reg * np.eye(self.dim)
        self.reward_sum = np.zeros(self.dim)
        self.rounds = 0

    def confidence_scale(self) -> float:
        return self.noise_scale * math.sqrt(self.dim * math.log(1.0 + self.rounds)) + 1.0

    def optimistic_values(self) -> np.ndarray:
        feats = self.features
        chol = np.linalg.cholesky(self.gram)
        theta = np.linalg.solve(self.gram, self.reward_sum)
        # ||x||_{G^-1} via triangular solve: G = L L^T
        w = np.linalg.solve(chol, feats.T)
        widths = np.sqrt(np.einsum("ij,ij->j", w, w))
        return feats @ theta + self.confidence_scale() * widths

    def _select(self) -> int:
        return int(np.argmax(self.optimistic_values()))

    def _update(self, arm: int, reward: float) -> None:
        x = self.features[arm]
        self.gram += np.outer(x, x)
        self.reward_sum += reward * x
        self.rounds += 1
