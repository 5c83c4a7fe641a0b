"""Simulated dueling environments, per-step regret, and preference-matrix checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    ChoiceOutcome,
    GapProfile,
    LinkFunction,
    _link_unchecked,
    draw_choice,
    gap_profile,
)

ARM_NAMES = ("A", "B", "C", "D", "E", "F")

UTILITY_ROWS: dict[str, tuple[float, ...]] = {
    "1good": (0.8, 0.2, 0.2, 0.2, 0.2, 0.2),
    "2good": (0.8, 0.7, 0.2, 0.2, 0.2, 0.2),
    "3good": (0.8, 0.7, 0.7, 0.2, 0.2, 0.2),
    "arith": (0.8, 0.7, 0.575, 0.45, 0.325, 0.2),
    "geom": (0.8, 0.7, 0.512, 0.374, 0.274, 0.2),
}

# Search-engine preference gaps as printed, row x, column y = eps(x, y).
# The printed table disagrees with itself once (B,D = 0.06 but D,B = -0.04),
# so the matrix is built from the upper triangle and mirrored.
YJ_EPSILON_PRINTED: tuple[tuple[float, ...], ...] = (
    (0.0, 0.05, 0.05, 0.04, 0.11, 0.11),
    (-0.05, 0.0, 0.05, 0.06, 0.08, 0.10),
    (-0.05, -0.05, 0.0, 0.04, 0.01, 0.06),
    (-0.04, -0.04, -0.04, 0.0, 0.04, 0.0),
    (-0.11, -0.08, -0.01, -0.04, 0.0, 0.01),
    (-0.11, -0.10, -0.06, 0.0, -0.01, 0.0),
)


def _mirror_upper(rows) -> tuple[tuple[float, ...], ...]:
    n = len(rows)
    return tuple(
        tuple(rows[i][j] if j >= i else (-rows[j][i] if rows[j][i] else 0.0) for j in range(n))
        for i in range(n)
    )


YJ_EPSILON = _mirror_upper(YJ_EPSILON_PRINTED)


class UtilityEnvironment:
    """Arms with expected utilities ``mu``; the choice law is given by ``link``.

    With ``bernoulli=False`` the utilities of a duel are exactly the means;
    otherwise each side draws an independent Bernoulli(mu) utility.
    """

    def __init__(
        self,
        mu: Sequence[float],
        link: LinkFunction | str = LinkFunction.LINEAR,
        bernoulli: bool = False,
    ) -> None:
        self.mu = tuple(float(m) for m in mu)
        self.gaps: GapProfile = gap_profile(self.mu)
        self.link = LinkFunction.parse(link)
        self.bernoulli = bool(bernoulli)

    @property
    def n_arms(self) -> int:
        return len(self.mu)

    @property
    def best_arm(self) -> int:
        return self.gaps.best_arm

    @property
    def best_value(self) -> float:
        return self.mu[self.gaps.best_arm]

    def permuted(self, perm: Sequence[int]) -> "UtilityEnvironment":
        """Relabel arms: new arm i is old arm ``perm[i]``."""
        return UtilityEnvironment([self.mu[p] for p in perm], self.link, self.bernoulli)

    def _check(self, arm: int) -> None:
        if not 0 <= arm < len(self.mu):
            raise IndexError(f"arm {arm} out of range for {len(self.mu)} arms")

    def draw_utilities(self, x: int, y: int, rng) -> tuple[float, float]:
        self._check(x)
        self._check(y)
        if self.bernoulli:
            u = 1.0 if rng.random() < self.mu[x] else 0.0
            v = 1.0 if rng.random() < self.mu[y] else 0.0
            return u, v
        return self.mu[x], self.mu[y]

    def duel(self, x: int, y: int, rng) -> tuple[ChoiceOutcome, float, float]:
        """Play ``(x, y)``. Returns the choice bit and the hidden utilities.

        Only the bit may be passed to a learner; u and v are for regret accounting.
        """
        u, v = self.draw_utilities(x, y, rng)
        return draw_choice(_link_unchecked(self.link, u, v), rng), u, v

    def regret_av(self, u: float, v: float) -> float:
        return regret_av_step(self.best_value, u, v)

    def regret_choice(self, b: int, u: float, v: float) -> float:
        return regret_choice_step(self.best_value, b, u, v)

    def describe(self) -> dict:
        return {
            "kind": "utility",
            "mu": list(self.mu),
            "link": self.link.name.lower(),
            "bernoulli": self.bernoulli,
        }


class LinearUtilityEnvironment:
    """Vector arms with utility ``theta . x``, evaluated deterministically."""

    def __init__(
        self,
        theta: Sequence[float],
        vertices: Sequence[Sequence[float]],
        link: LinkFunction | str = LinkFunction.LINEAR,
    ) -> None:
        self.theta = np.asarray(theta, dtype=float)
        self.vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        self.link = LinkFunction.parse(link)
        values = self.vertices @ self.theta
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("vertex utilities must lie in [0, 1]")
        self.best_value = float(values.max())

    def utility(self, arm) -> float:
        return float(np.dot(self.theta, arm))

    def duel(self, x, y, rng) -> tuple[ChoiceOutcome, float, float]:
        u, v = self.utility(x), self.utility(y)
        return draw_choice(_link_unchecked(self.link, u, v), rng), u, v

    def regret_av(self, u: float, v: float) -> float:
        return regret_av_step(self.best_value, u, v)


class PreferenceMatrixEnvironment:
    """Duels governed by an antisymmetric gap matrix: Pr[x beats y] = 1/2 + eps[x][y]."""

    def __init__(self, epsilon, order: Sequence[int] | None = None) -> None:
        eps = np.asarray(epsilon, dtype=float)
        check_antisymmetric(eps)
        if np.abs(eps).max() > 0.5:
            raise ValueError("|eps| must not exceed 1/2")
        self.epsilon = eps
        self.order = tuple(implied_order(eps) if order is None else order)
        if sorted(self.order) != list(range(len(eps))):
            raise ValueError("order must be a permutation of the arms")

    @property
    def n_arms(self) -> int:
        return len(self.epsilon)

    @property
    def best_arm(self) -> int:
        return self.order[0]

    def permuted(self, perm: Sequence[int]) -> "PreferenceMatrixEnvironment":
        perm = np.asarray(perm)
        inverse = np.argsort(perm)
        return PreferenceMatrixEnvironment(
            self.epsilon[np.ix_(perm, perm)], [int(inverse[a]) for a in self.order]
        )

    def duel(self, x: int, y: int, rng) -> ChoiceOutcome:
        n = self.n_arms
        if not (0 <= x < n and 0 <= y < n):
            raise IndexError(f"arm pair ({x}, {y}) out of range for {n} arms")
        return draw_choice(0.5 + self.epsilon[x, y], rng)

    def regret(self, x: int, y: int) -> float:
        return regret_yj_step(self.epsilon, self.best_arm, x, y)

    def describe(self) -> dict:
        return {"kind": "matrix", "epsilon": self.epsilon.tolist(), "order": list(self.order)}


def regret_av_step(best_value: float, u: float, v: float) -> float:
    # expression form must stay in sync with _kernel.pyx
    return best_value - (u + v) / 2.0


def regret_choice_step(best_value: float, b: int, u: float, v: float) -> float:
    return best_value - (u if b == 0 else v)


def regret_yj_step(epsilon, best: int, x: int, y: int) -> float:
    return (epsilon[best][x] + epsilon[best][y]) / 2.0


@dataclass
class RegretLedger:
    """Cumulative realized regret with snapshots at chosen times."""

    checkpoints: Sequence[int] = ()
    t: int = 0
    avg: float = 0.0
    choice: float = 0.0
    history: list[tuple[int, float, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._marks = set(self.checkpoints)

    def record(self, avg_step: float, choice_step: float = math.nan) -> None:
        self.t += 1
        self.avg += avg_step
        self.choice += choice_step
        if self.t in self._marks:
            self.history.append((self.t, self.avg, self.choice))


# -- preference matrix validation --------------------------------------------


def check_antisymmetric(eps, tol: float = 1e-12) -> None:
    eps = np.asarray(eps, dtype=float)
    if eps.ndim != 2 or eps.shape[0] != eps.shape[1]:
        raise ValueError("epsilon must be a square matrix")
    if np.abs(eps + eps.T).max() > tol:
        raise ValueError("epsilon is not antisymmetric")


def implied_order(eps) -> list[int]:
    """Arms sorted by number of strictly positive gaps (wins), ties by index."""
    eps = np.asarray(eps, dtype=float)
    wins = (eps > 0).sum(axis=1)
    return sorted(range(len(eps)), key=lambda a: (-wins[a], a))


def utility_gap_matrix(mu: Sequence[float]) -> np.ndarray:
    """Delta(x, y) = (mu(x) - mu(y)) / 2, the gap matrix implied by the linear link."""
    mu = np.asarray(mu, dtype=float)
    return (mu[:, None] - mu[None, :]) / 2.0


@dataclass
class RelaxedPropertyReport:
    order: list[int]
    strict_order_violations: list[tuple[int, int]]
    transitivity_gamma: float
    triangle_range: tuple[float, float]
    extended_triangle_range: tuple[float, float]
    mirrored_triangle_gamma: float
    mirrored_extended_gamma: float

    @staticmethod
    def _fmt_range(r: tuple[float, float]) -> str:
        lo, hi = r
        return f"[{lo:.6g}, {hi:.6g}]" if lo <= hi else f"empty (needs >= {lo:.6g}, <= {hi:.6g})"

    def format(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names else [str(i) for i in range(len(self.order))]
        viol = ", ".join(f"({names[x]}, {names[y]})" for x, y in self.strict_order_violations)
        lines = [
            "order: " + " > ".join(names[a] for a in self.order),
            f"strict order violations: {viol or 'none'}",
            f"minimal transitivity gamma: {self.transitivity_gamma:.6g}",
            f"triangle gamma range (gamma on left): {self._fmt_range(self.triangle_range)}",
            f"extended triangle gamma range (gamma on left): "
            f"{self._fmt_range(self.extended_triangle_range)}",
            f"mirrored triangle minimal gamma (gamma on right): {self.mirrored_triangle_gamma:.6g}",
            f"mirrored extended minimal gamma (gamma on right): {self.mirrored_extended_gamma:.6g}",
        ]
        return "\n".join(lines)


def _gamma_range(constraints) -> tuple[float, float]:
    """Feasible gamma >= 1 for constraints ``gamma * lhs <= rhs``."""
    lo, hi = 1.0, math.inf
    for lhs, rhs in constraints:
        if lhs > 0:
            hi = min(hi, float(rhs / lhs))
        elif lhs < 0:
            lo = max(lo, float(rhs / lhs))
        elif rhs < 0:
            return (math.inf, -math.inf)
    return (lo, hi)


def _min_gamma(constraints) -> float:
    """Smallest gamma >= 1 with ``need <= gamma * have`` for each (need, have)."""
    gamma = 1.0
    for need, have in constraints:
        if need <= 0:
            continue
        if have <= 0:
            return math.inf
        gamma = max(gamma, float(need / have))
    return gamma


def verify_relaxed_properties(eps, order: Sequence[int] | None = None) -> RelaxedPropertyReport:
    """Scan a gap matrix for relaxed transitivity and triangle-type inequalities.

    Triples range over all ``a > b > c`` in ``order``; the extended forms fix
    ``a`` to the top arm and let ``(b, c)`` range over every pair. The
    triangle forms are checked exactly as ``gamma * D(a,c) <= D(a,b) + D(b,c)``;
    the mirrored forms put gamma on the right-hand side instead.
    """
    eps = np.asarray(eps, dtype=float)
    check_antisymmetric(eps)
    order = list(implied_order(eps) if order is None else order)
    n = len(order)
    d = eps

    violations = [
        (order[i], order[j]) for i in range(n) for j in range(i + 1, n) if d[order[i], order[j]] <= 0
    ]

    triples = [
        (order[i], order[j], order[k])
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
    ]
    transitivity = _min_gamma((max(d[a, b], d[b, c]), d[a, c]) for a, b, c in triples)
    triangle = _gamma_range((d[a, c], d[a, b] + d[b, c]) for a, b, c in triples)
    mirrored = _min_gamma((d[a, c], d[a, b] + d[b, c]) for a, b, c in triples)

    top = order[0]
    pairs = [(x, y) for x in range(n) for y in range(n)]
    extended = _gamma_range((d[top, y], d[top, x] + d[x, y]) for x, y in pairs)
    mirrored_ext = _min_gamma((d[top, y], d[top, x] + d[x, y]) for x, y in pairs)

    return RelaxedPropertyReport(
        order=order,
        strict_order_violations=violations,
        transitivity_gamma=transitivity,
        triangle_range=triangle,
        extended_triangle_range=extended,
        mirrored_triangle_gamma=mirrored,
        mirrored_extended_gamma=mirrored_ext,
    )
