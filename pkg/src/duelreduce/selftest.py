"""Quick invariant checks runnable without pytest (``duelreduce selftest``)."""

from __future__ import annotations

import numpy as np

from . import kernel
from .core import LinkFunction, _link_unchecked, make_rng
from .env import YJ_EPSILON, UTILITY_ROWS, UtilityEnvironment, check_antisymmetric
from .harness import make_spec, run_trajectory
from .reductions import Doubler, MultiSbm, Sparring
from .sbm import ContractViolation, Ucb


def _links(rng):
    u, v = rng.random(10_000), rng.random(10_000)
    for link in LinkFunction:
        for a, b in zip(u, v):
            p, q = _link_unchecked(link, a, b), _link_unchecked(link, b, a)
            if abs(p + q - 1.0) > 1e-12 or not 0.0 <= p <= 1.0:
                return False, f"{link.name} complementarity at ({a}, {b})"
            if a > b and not p > 0.5:
                return False, f"{link.name} favoring at ({a}, {b})"
    return True, "10^4 pairs x 3 links"


def _determinism(rng):
    ok = np.array_equal(make_rng(12345).random(100_000), make_rng(12345).random(100_000))
    return ok, "10^5 draws"


def _yj(rng):
    eps = np.asarray(YJ_EPSILON)
    check_antisymmetric(eps)
    return bool(np.allclose(eps[0], [0, 0.05, 0.05, 0.04, 0.11, 0.11])), "antisymmetric, row A"


def _alternation(rng):
    m = Ucb(3)
    try:
        m.feedback(1.0)
        return False, "feedback before advance accepted"
    except ContractViolation:
        pass
    m.advance()
    try:
        m.advance()
        return False, "double advance accepted"
    except ContractViolation:
        return True, "guard raises"


def _chaining(rng):
    env = UtilityEnvironment(UTILITY_ROWS["2good"])
    solver = MultiSbm.with_ucb(env.n_arms)
    prev = None
    for _ in range(500):
        x, y = solver.propose()
        if prev is not None and x != prev:
            return False, "left != previous right"
        b, _, _ = env.duel(x, y, rng)
        solver.absorb(b)
        prev = y
    return sum(solver.advance_counts) == 500, "500 duels"


def _epochs(rng):
    env = UtilityEnvironment(UTILITY_ROWS["1good"])
    solver = Doubler(Ucb(env.n_arms))
    boundaries = []
    for t in range(1, 31):
        epoch = solver.epoch
        x, y = solver.propose(rng)
        solver.absorb(env.duel(x, y, rng)[0])
        if solver.epoch != epoch:
            boundaries.append(t)
    return boundaries == [2, 6, 14, 30], f"boundaries {boundaries}"


def _sparring(rng):
    s = Sparring.with_ucb(6)
    for _ in range(200):
        s.propose()
        before = sum(s.left.sums) + sum(s.right.sums)
        s.absorb(int(rng.random() < 0.5))
        if sum(s.left.sums) + sum(s.right.sums) - before != 1.0:
            return False, "rewards do not sum to 1"
    return True, "200 duels"


def _backends(rng):
    impls = kernel.backends()
    if "cython" not in impls:
        return True, "compiled kernel not built; skipped"
    for name in ("1good-linear", "geom-logit", "yj"):
        spec = make_spec(name, horizon=512, runs=1, base_seed=3)
        for alg in kernel.ALGORITHMS:
            a = run_trajectory(spec, alg, 0, impls["python"])
            b = run_trajectory(spec, alg, 0, impls["cython"])
            if not (np.array_equal(a.avg, b.avg) and np.array_equal(a.choice, b.choice, equal_nan=True)):
                return False, f"{name}/{alg} differs"
    return True, "python == cython"


def _choice_vs_average(rng):
    grid = np.linspace(0.0, 1.0, 21)
    for link in LinkFunction:
        for u in grid:
            for v in grid:
                choice = _link_unchecked(link, u, v) * u + _link_unchecked(link, v, u) * v
                if choice < (u + v) / 2.0 - 1e-12:
                    return False, f"{link.name} at ({u}, {v})"
    return True, "21x21 grid x 3 links"


CHECKS = {
    "link functions": _links,
    "seed determinism": _determinism,
    "YJ matrix integrity": _yj,
    "SBM alternation guard": _alternation,
    "MultiSBM chaining": _chaining,
    "Doubler epoch boundaries": _epochs,
    "Sparring reward complementarity": _sparring,
    "kernel backends agree": _backends,
    "choice vs average utility": _choice_vs_average,
}


def run_selftest(out=print) -> bool:
    all_ok = True
    for name, check in CHECKS.items():
        ok, detail = check(make_rng(0))
        all_ok &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    out(f"backend: {kernel.BACKEND}")
    return all_ok
