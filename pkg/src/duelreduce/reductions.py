"""Dueling-bandit strategies built from singleton bandit machines.

Every strategy exposes the same two-step round: ``propose(rng)`` returns
the pair ``(x, y)`` to show, and ``absorb(b)`` consumes the observed choice
bit (0 = left chosen, 1 = right chosen).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import LinkFunction, _link_unchecked, draw_choice
from .sbm import ContractViolation, SingletonBanditMachine, Ucb


def _check_bit(b) -> int:
    b = int(b)
    if b not in (0, 1):
        raise ValueError(f"choice bit must be 0 or 1, got {b!r}")
    return b


def multisbm_alpha(n_arms: int, horizon: int | None = None) -> float:
    """Robustness parameter max(3, ln K / ln ln T); 3 when T is unknown or tiny."""
    if horizon is None or horizon <= math.e:
        return 3.0
    loglog = math.log(math.log(horizon))
    if loglog <= 0:
        return 3.0
    return max(3.0, math.log(n_arms) / loglog)


class Doubler:
    """Epoch-based reduction. Epoch i lasts 2**i duels (i starting at 1).

    During an epoch the left arm is drawn uniformly from the multiset of right
    arms played in the previous epoch, while a single machine picks the right
    arm and is rewarded with the choice bit. The machine is reset at the start
    of every epoch.

    If ``arm_vectors`` is given, arms are vectors: the left arm is the average
    of last epoch's right vectors, and proposals are returned as vectors.
    """

    def __init__(
        self,
        sbm: SingletonBanditMachine,
        first_arm: int = 0,
        arm_vectors: Sequence[Sequence[float]] | None = None,
    ) -> None:
        self.sbm = sbm
        self.first_arm = first_arm
        self.arm_vectors = None if arm_vectors is None else np.asarray(arm_vectors, dtype=float)
        self.reset()

    @property
    def average_mode(self) -> bool:
        return self.arm_vectors is not None

    def reset(self) -> None:
        self.epoch = 1
        self.steps_left = 2
        self.left_pool: list[int] = [self.first_arm]
        self.next_pool: list[int] = []
        if self.average_mode:
            self.left_vector = self.arm_vectors[self.first_arm].copy()
            self._next_sum = np.zeros(self.arm_vectors.shape[1])
            self._next_count = 0
        self._pending: tuple | None = None
        self.sbm.reset()

    @property
    def pending(self):
        return self._pending

    def propose(self, rng):
        if self._pending is not None:
            raise ContractViolation("propose called while a choice is pending")
        if self.average_mode:
            y = self.sbm.advance()
            self._pending = (None, y)
            return self.left_vector, self.arm_vectors[y]
        pool = self.left_pool
        x = pool[int(rng.random() * len(pool))]
        y = self.sbm.advance()
        self._pending = (x, y)
        return x, y

    def absorb(self, b) -> None:
        if self._pending is None:
            raise ContractViolation("absorb called without a pending pair")
        b = _check_bit(b)
        _, y = self._pending
        self._pending = None
        self.sbm.feedback(float(b))
        if self.average_mode:
            # only the running sum is kept; the multiset itself is not needed
            self._next_sum += self.arm_vectors[y]
            self._next_count += 1
        else:
            self.next_pool.append(y)
        self.steps_left -= 1
        if self.steps_left == 0:
            self._rotate()

    def _rotate(self) -> None:
        if self.average_mode:
            self.left_vector = self._next_sum / self._next_count
            self._next_sum = np.zeros_like(self._next_sum)
            self._next_count = 0
        self.left_pool, self.next_pool = self.next_pool, []
        self.epoch += 1
        self.steps_left = 2**self.epoch
        self.sbm.reset()


class MultiSbm:
    """One machine per arm. The right arm of round t becomes the left arm of
    round t+1, and the machine indexed by the left arm picks the right arm."""

    def __init__(self, machines: Sequence[SingletonBanditMachine], first_arm: int = 0) -> None:
        if not machines:
            raise ValueError("need at least one machine")
        self.machines = list(machines)
        self.first_arm = first_arm
        self.reset()

    @classmethod
    def with_ucb(cls, n_arms: int, alpha: float | None = None, horizon: int | None = None):
        a = multisbm_alpha(n_arms, horizon) if alpha is None else alpha
        return cls([Ucb(n_arms, a) for _ in range(n_arms)])

    def reset(self) -> None:
        for m in self.machines:
            m.reset()
        self.previous_right = self.first_arm
        self._pending: tuple[int, int] | None = None

    @property
    def pending(self):
        return self._pending

    @property
    def advance_counts(self) -> list[int]:
        """Completed cycles per machine (rho_x in the analysis)."""
        return [sum(m.counts) if isinstance(m, Ucb) else m.rounds for m in self.machines]

    def propose(self, rng=None) -> tuple[int, int]:
        if self._pending is not None:
            raise ContractViolation("propose called while a choice is pending")
        x = self.previous_right
        y = self.machines[x].advance()
        self._pending = (x, y)
        return x, y

    def absorb(self, b) -> None:
        if self._pending is None:
            raise ContractViolation("absorb called without a pending pair")
        b = _check_bit(b)
        x, y = self._pending
        self._pending = None
        self.machines[x].feedback(float(b))
        self.previous_right = y


class Sparring:
    """Two machines play against each other; the chosen side is rewarded 1."""

    def __init__(self, left: SingletonBanditMachine, right: SingletonBanditMachine) -> None:
        self.left = left
        self.right = right
        self.reset()

    @classmethod
    def with_ucb(cls, n_arms: int, alpha: float = 3.0):
        return cls(Ucb(n_arms, alpha), Ucb(n_arms, alpha))

    def reset(self) -> None:
        self.left.reset()
        self.right.reset()
        self._pending: tuple[int, int] | None = None

    @property
    def pending(self):
        return self._pending

    def propose(self, rng=None) -> tuple[int, int]:
        if self._pending is not None:
            raise ContractViolation("propose called while a choice is pending")
        self._pending = (self.left.advance(), self.right.advance())
        return self._pending

    def absorb(self, b) -> None:
        if self._pending is None:
            raise ContractViolation("absorb called without a pending pair")
        b = _check_bit(b)
        self._pending = None
        self.left.feedback(1.0 if b == 0 else 0.0)
        self.right.feedback(1.0 if b == 1 else 0.0)


# -- reverse direction: a MAB player driven by a dueling solver ---------------


class BernoulliMab:
    def __init__(self, mu: Sequence[float]) -> None:
        self.mu = tuple(float(m) for m in mu)
        if any(not 0.0 <= m <= 1.0 for m in self.mu):
            raise ValueError("means must lie in [0, 1]")
        self.best_value = max(self.mu)

    def pull(self, arm: int, rng) -> float:
        return 1.0 if rng.random() < self.mu[arm] else 0.0


@dataclass
class PullLog:
    arms: list[int] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.arms)

    def regret(self, best_value: float) -> float:
        """Realized MAB regret: sum of (best mean - observed reward)."""
        return len(self.rewards) * best_value - sum(self.rewards)

    def pseudo_regret(self, mu: Sequence[float]) -> float:
        best = max(mu)
        return sum(best - mu[a] for a in self.arms)


def dueling_to_mab_adapter(solver, mab: BernoulliMab, horizon: int, rng) -> PullLog:
    """Play ``horizon`` MAB rounds using a dueling solver.

    Each duel pulls x then y as two consecutive MAB rounds, observes their
    rewards u and v, and feeds the solver a bit drawn from the linear link.
    """
    if horizon % 2:
        raise ValueError("horizon must be even (two pulls per duel)")
    log = PullLog()
    for _ in range(horizon // 2):
        x, y = solver.propose(rng)
        u = mab.pull(x, rng)
        v = mab.pull(y, rng)
        log.arms += (x, y)
        log.rewards += (u, v)
        solver.absorb(draw_choice(_link_unchecked(LinkFunction.LINEAR, u, v), rng))
    return log
