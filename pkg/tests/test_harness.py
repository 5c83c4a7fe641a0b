import time

import numpy as np
import pytest

from duelreduce import kernel
from duelreduce.env import UTILITY_ROWS, UtilityEnvironment
from duelreduce.harness import (
    CSV_HEADER,
    CurveSummary,
    ScenarioSpec,
    emit_audit_csv,
    emit_csv,
    make_spec,
    power_of_two_checkpoints,
    registry_json,
    run_cell,
    run_cell_metrics,
    run_trajectory,
    scenario_registry,
)


def test_registry_has_sixteen_scenarios():
    reg = scenario_registry()
    assert len(reg) == 16
    assert "yj" in reg and "geom-logit" in reg
    assert '"1good-natural"' in registry_json()


def test_checkpoints():
    assert power_of_two_checkpoints(1) == (1,)
    assert power_of_two_checkpoints(12) == (1, 2, 4, 8)
    assert power_of_two_checkpoints(32768)[-1] == 32768


@pytest.mark.parametrize("alg", kernel.ALGORITHMS)
def test_single_run_deterministic(alg):
    spec = make_spec("arith-natural", runs=1, horizon=4, base_seed=11)
    a, b = run_cell(spec, alg), run_cell(spec, alg)
    assert np.array_equal(a.mean, b.mean)
    assert a.times == (1, 2, 4) and a.runs == 1
    assert np.array_equal(a.std, np.zeros(3))


@pytest.mark.parametrize("alg", kernel.ALGORITHMS)
def test_one_arm_scenario_has_zero_regret(alg):
    spec = ScenarioSpec("one", UtilityEnvironment((0.6,)), horizon=256, runs=3)
    cell = run_cell_metrics(spec, alg)
    for s in cell.summaries.values():
        assert np.array_equal(s.mean, np.zeros(len(s.times)))


def test_seed_offsets_per_run():
    spec = make_spec("geom-linear", runs=3, horizon=64, base_seed=100)
    assert [run_trajectory(spec, "sparring", r).seed for r in range(3)] == [100, 101, 102]
    perms = run_cell_metrics(spec, "sparring").permutations
    assert [p[0] for p in perms] == [100, 101, 102]
    assert all(sorted(p[1]) == list(range(6)) for p in perms)


def test_no_permute_keeps_order():
    spec = make_spec("1good-linear", runs=1, horizon=8, permute=False)
    assert list(run_trajectory(spec, "doubler", 0).permutation) == list(range(6))


def test_csv_format():
    assert emit_csv([]) == (",".join(CSV_HEADER) + "\n").encode()
    s = CurveSummary.from_samples("one", "sparring", (1, 2, 3), [[0.0, 0.0, 0.123456789]])
    lines = emit_csv([s]).decode().splitlines()
    assert lines[0] == "scenario,algorithm,t,log2_t,mean_regret,std_regret,runs"
    assert lines[2] == "one,sparring,2,1,0.000000,0.000000,1"
    assert lines[3] == "one,sparring,3,1.584963,0.123457,0.000000,1"


def test_csv_byte_identical_for_same_seed():
    spec = make_spec("2good-logit", runs=3, horizon=128, base_seed=5)
    out = [emit_csv([run_cell(spec, a) for a in spec.algorithms]) for _ in range(2)]
    assert out[0] == out[1]


def test_audit_csv():
    text = emit_audit_csv([("yj", "doubler", 3, [2, 0, 1])]).decode()
    assert text == "scenario,algorithm,seed,permutation\nyj,doubler,3,2 0 1\n"


def test_merge_matches_single_batch():
    env = UtilityEnvironment(UTILITY_ROWS["arith"])
    full = run_cell(ScenarioSpec("arith", env, horizon=256, runs=400, base_seed=7), "multisbm")
    a = run_cell(ScenarioSpec("arith", env, horizon=256, runs=200, base_seed=7), "multisbm")
    b = run_cell(ScenarioSpec("arith", env, horizon=256, runs=200, base_seed=207), "multisbm")
    m = a.merge(b)
    assert m.runs == 400
    np.testing.assert_allclose(m.mean, full.mean, rtol=1e-9)
    np.testing.assert_allclose(m.std, full.std, rtol=1e-9)


def test_merge_rejects_other_cells():
    a = CurveSummary.from_samples("x", "doubler", (1,), [[1.0]])
    b = CurveSummary.from_samples("x", "sparring", (1,), [[1.0]])
    with pytest.raises(ValueError):
        a.merge(b)


@pytest.mark.parametrize("name", ["1good-linear", "arith-logit", "yj"])
@pytest.mark.parametrize("alg", kernel.ALGORITHMS)
def test_checkpoint_monotonicity(name, alg):
    s = run_cell(make_spec(name, runs=5, horizon=1024), alg)
    assert np.all(np.diff(s.mean) >= 0)


def test_threaded_runs_match_serial():
    spec = make_spec("geom-natural", runs=8, horizon=512)
    a = run_cell(spec, "doubler")
    b = run_cell(spec, "doubler", workers=4)
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.m2, b.m2)


@pytest.mark.parametrize("alg", kernel.ALGORITHMS)
def test_trajectory_throughput(alg):
    spec = make_spec("geom-linear", runs=1, horizon=32768)
    run_trajectory(spec, alg, 0)
    start = time.perf_counter()
    run_trajectory(spec, alg, 1)
    elapsed = time.perf_counter() - start
    # budget is ~0.2 s; one second leaves a 5x margin on either backend
    assert elapsed < 1.0


def test_spec_errors():
    env = UtilityEnvironment((0.5, 0.4))
    with pytest.raises(ValueError):
        ScenarioSpec("x", env, algorithms=("thompson",))
    with pytest.raises(ValueError):
        ScenarioSpec("x", env, horizon=4, checkpoints=(8, 16))
    with pytest.raises(ValueError):
        ScenarioSpec("x", env, horizon=16, checkpoints=(4, 2))
    with pytest.raises(KeyError):
        make_spec("nosuch")
    with pytest.raises(ValueError):
        run_cell(make_spec("yj", horizon=8, runs=1), "thompson")
