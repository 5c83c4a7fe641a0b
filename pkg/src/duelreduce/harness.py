"""Scenario registry, seeded Monte-Carlo replication, aggregation and CSV output."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernel
from .core import LinkFunction, make_rng
from .env import (
    ARM_NAMES,
    UTILITY_ROWS,
    YJ_EPSILON,
    PreferenceMatrixEnvironment,
    UtilityEnvironment,
)
from .reductions import multisbm_alpha

DEFAULT_HORIZON = 32768
DEFAULT_RUNS = 400
DEFAULT_ALPHA = 3.0
METRICS = ("av", "choice")

CSV_HEADER = ("scenario", "algorithm", "t", "log2_t", "mean_regret", "std_regret", "runs")


def scenario_registry() -> dict:
    """Built-in environments: every utility row under every link, plus ``yj``."""
    reg = {}
    for row, mu in UTILITY_ROWS.items():
        for link in LinkFunction:
            reg[f"{row}-{link.name.lower()}"] = UtilityEnvironment(mu, link)
    reg["yj"] = PreferenceMatrixEnvironment(YJ_EPSILON)
    return reg


def registry_json() -> str:
    doc = {"arm_names": list(ARM_NAMES), "scenarios": []}
    for name, env in scenario_registry().items():
        doc["scenarios"].append({"name": name, **env.describe()})
    return json.dumps(doc, indent=2)


def power_of_two_checkpoints(horizon: int) -> tuple[int, ...]:
    return tuple(2**i for i in range(int(math.log2(horizon)) + 1) if 2**i <= horizon)


def algorithm_alpha(algorithm: str, n_arms: int, horizon: int) -> float:
    if algorithm == "multisbm":
        return multisbm_alpha(n_arms, horizon)
    return DEFAULT_ALPHA


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    environment: UtilityEnvironment | PreferenceMatrixEnvironment
    algorithms: tuple[str, ...] = kernel.ALGORITHMS
    horizon: int = DEFAULT_HORIZON
    runs: int = DEFAULT_RUNS
    base_seed: int = 0
    checkpoints: tuple[int, ...] | None = None
    permute: bool = True

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        for alg in self.algorithms:
            if alg not in kernel.ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}; expected one of {kernel.ALGORITHMS}")
        times = self.checkpoint_times
        if not times:
            raise ValueError("no checkpoints")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        if times[0] < 1:
            raise ValueError("checkpoints must be positive")
        if times[0] > self.horizon:
            raise ValueError(f"horizon {self.horizon} is smaller than the first checkpoint {times[0]}")
        if times[-1] > self.horizon:
            raise ValueError("last checkpoint exceeds the horizon")

    @property
    def checkpoint_times(self) -> tuple[int, ...]:
        if self.checkpoints is not None:
            return tuple(self.checkpoints)
        return power_of_two_checkpoints(self.horizon)

    def with_(self, **changes) -> "ScenarioSpec":
        return replace(self, **changes)


def make_spec(name: str, **overrides) -> ScenarioSpec:
    registry = scenario_registry()
    if name not in registry:
        raise KeyError(f"unknown scenario {name!r}")
    return ScenarioSpec(name=name, environment=registry[name], **overrides)


class Trajectory(NamedTuple):
    seed: int
    permutation: np.ndarray
    avg: np.ndarray  # cumulative; holds the matrix regret for preference-matrix scenarios
    choice: np.ndarray  # cumulative; NaN for preference-matrix scenarios


def run_trajectory(spec: ScenarioSpec, algorithm: str, run_index: int, backend=None) -> Trajectory:
    """One seeded run. The permutation is drawn first, then the uniform stream."""
    seed = spec.base_seed + run_index
    rng = make_rng(seed)
    env = spec.environment
    n = env.n_arms
    perm = rng.permutation(n) if spec.permute else np.arange(n)
    if spec.permute:
        env = env.permuted(perm)
    uniforms = rng.random(kernel.UNIFORMS_PER_DUEL * spec.horizon)
    simulate = kernel.simulate_duels if backend is None else backend.simulate_duels
    av, ch = simulate(algorithm, env, algorithm_alpha(algorithm, n, spec.horizon), spec.horizon, uniforms)
    return Trajectory(seed, perm, av, ch)


@dataclass
class CurveSummary:
    """Mean and spread of cumulative regret at each checkpoint over ``runs`` runs."""

    scenario: str
    algorithm: str
    times: tuple[int, ...]
    runs: int
    mean: np.ndarray
    m2: np.ndarray  # sum of squared deviations from the mean
    metric: str = "av"

    @classmethod
    def from_samples(cls, scenario, algorithm, times, samples, metric="av") -> "CurveSummary":
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        mean = samples.mean(axis=0)
        m2 = ((samples - mean) ** 2).sum(axis=0)
        return cls(scenario, algorithm, tuple(times), samples.shape[0], mean, m2, metric)

    @property
    def std(self) -> np.ndarray:
        if self.runs < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.runs - 1))

    @property
    def sem(self) -> np.ndarray:
        return self.std / math.sqrt(self.runs)

    def at(self, t: int) -> float:
        return float(self.mean[self.times.index(t)])

    def merge(self, other: "CurveSummary") -> "CurveSummary":
        """Pool two disjoint batches of runs of the same cell."""
        if (self.scenario, self.algorithm, self.times, self.metric) != (
            other.scenario,
            other.algorithm,
            other.times,
            other.metric,
        ):
            raise ValueError("can only merge summaries of the same cell")
        n = self.runs + other.runs
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.runs / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.runs * other.runs / n)
        return CurveSummary(self.scenario, self.algorithm, self.times, n, mean, m2, self.metric)


@dataclass
class CellResult:
    summaries: dict[str, CurveSummary]
    permutations: list[tuple[int, list[int]]] = field(default_factory=list)


def run_cell_metrics(
    spec: ScenarioSpec,
    algorithm: str,
    metrics: Sequence[str] = METRICS,
    workers: int = 1,
    backend=None,
) -> CellResult:
    if algorithm not in kernel.ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {kernel.ALGORITHMS}")
    for m in metrics:
        if m not in METRICS:
            raise ValueError(f"unknown metric {m!r}")
    times = spec.checkpoint_times
    idx = np.asarray(times) - 1

    def one(r: int):
        traj = run_trajectory(spec, algorithm, r, backend)
        return traj.seed, traj.permutation, traj.avg[idx], traj.choice[idx]

    if workers > 1:
        # the compiled kernel releases the GIL; results come back in run order
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(spec.runs)))
    else:
        results = [one(r) for r in range(spec.runs)]

    samples = {"av": np.array([r[2] for r in results]), "choice": np.array([r[3] for r in results])}
    summaries = {
        m: CurveSummary.from_samples(spec.name, algorithm, times, samples[m], m) for m in metrics
    }
    perms = [(seed, [int(p) for p in perm]) for seed, perm, _, _ in results]
    return CellResult(summaries, perms)


def run_cell(spec: ScenarioSpec, algorithm: str, metric: str = "av", workers: int = 1) -> CurveSummary:
    """Run ``spec.runs`` seeded trajectories (seeds base_seed + i) and aggregate."""
    return run_cell_metrics(spec, algorithm, (metric,), workers).summaries[metric]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _fmt_log2(t: int) -> str:
    lg = math.log2(t)
    return str(int(lg)) if lg.is_integer() else _fmt(lg)


def emit_csv(summaries: Iterable[CurveSummary]) -> bytes:
    """One row per (scenario, algorithm, checkpoint), header first."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for s in summaries:
        std = s.std
        for i, t in enumerate(s.times):
            writer.writerow(
                (s.scenario, s.algorithm, t, _fmt_log2(t), _fmt(s.mean[i]), _fmt(std[i]), s.runs)
            )
    return buf.getvalue().encode("utf-8")


def emit_audit_csv(rows: Iterable[tuple[str, str, int, list[int]]]) -> bytes:
    """Per-run arm permutations: scenario, algorithm, seed, permutation."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("scenario", "algorithm", "seed", "permutation"))
    for scenario, algorithm, seed, perm in rows:
        writer.writerow((scenario, algorithm, seed, " ".join(map(str, perm))))
    return buf.getvalue().encode("utf-8")
