"""Pure-Python trajectory kernels, built directly on the reduction classes.

Randomness comes from a pre-drawn array of uniforms consumed in call order,
so these functions and the compiled ``_kernel`` module produce identical
trajectories from the same array.
"""

from __future__ import annotations

import numpy as np

from .reductions import Doubler, MultiSbm, Sparring
from .sbm import Ucb

ALGORITHMS = ("doubler", "multisbm", "sparring")


class UniformStream:
    """Minimal stand-in for ``Generator.random()`` that replays an array."""

    def __init__(self, uniforms) -> None:
        self._it = iter(np.asarray(uniforms, dtype=float).tolist())
        self.used = 0

    def random(self) -> float:
        self.used += 1
        try:
            return next(self._it)
        except StopIteration:
            raise RuntimeError("uniform stream exhausted") from None


def make_reduction(name: str, n_arms: int, alpha: float):
    if name == "doubler":
        return Doubler(Ucb(n_arms, alpha))
    if name == "multisbm":
        return MultiSbm.with_ucb(n_arms, alpha=alpha)
    if name == "sparring":
        return Sparring.with_ucb(n_arms, alpha)
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")


def simulate_duels(algorithm: str, env, alpha: float, horizon: int, uniforms):
    """Run one trajectory; returns cumulative (average, choice) regret arrays.

    For a preference-matrix environment the first array holds the matrix
    regret and the second is all NaN.
    """
    stream = UniformStream(uniforms)
    solver = make_reduction(algorithm, env.n_arms, alpha)
    av = np.empty(horizon)
    ch = np.empty(horizon)
    acc_av = acc_ch = 0.0
    matrix = hasattr(env, "epsilon")
    for t in range(horizon):
        x, y = solver.propose(stream)
        if matrix:
            b = env.duel(x, y, stream)
            acc_av += env.regret(x, y)
            ch[t] = np.nan
        else:
            b, u, v = env.duel(x, y, stream)
            acc_av += env.regret_av(u, v)
            acc_ch += env.regret_choice(b, u, v)
            ch[t] = acc_ch
        av[t] = acc_av
        solver.absorb(b)
    return av, ch


def simulate_mab_ucb(mu, alpha: float, horizon: int, uniforms) -> np.ndarray:
    """Plain UCB on a Bernoulli MAB; returns pull counts per arm."""
    stream = UniformStream(uniforms)
    policy = Ucb(len(mu), alpha)
    for _ in range(horizon):
        arm = policy.advance()
        policy.feedback(1.0 if stream.random() < mu[arm] else 0.0)
    return np.asarray(policy.counts, dtype=np.int64)
