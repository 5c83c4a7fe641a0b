import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duelreduce.core import make_rng
from duelreduce.sbm import ContractViolation, LinearUcb, Ucb


def _play(m, rewards, arm=None):
    for r in rewards:
        got = m.advance()
        if arm is not None:
            assert got == arm
        m.feedback(r)


def test_ucb_fresh_picks_arm_zero():
    assert Ucb(3).advance() == 0


def test_ucb_unplayed_arms_first_in_order():
    m = Ucb(4)
    order = []
    for _ in range(4):
        order.append(m.advance())
        m.feedback(1.0)
    assert order == [0, 1, 2, 3]


def test_ucb_equal_bonus_means_decide():
    m = Ucb(2, alpha=3)
    m.advance(); m.feedback(1.0)
    m.advance(); m.feedback(0.0)
    assert m.t == 3
    assert m.advance() == 0


def test_ucb_index_hand_evaluation():
    m = Ucb(2, alpha=3)
    m.counts, m.sums, m.t = [9, 1], [5.4, 0.3], 11
    # 0.6 + sqrt(5 ln 11 / 18) and 0.3 + sqrt(5 ln 11 / 2), via mpmath
    assert m.index(0) == pytest.approx(1.41613848103233656775, abs=1e-14)
    assert m.index(1) == pytest.approx(2.74841544309700970325, abs=1e-14)
    assert m.advance() == 1


@pytest.mark.parametrize(
    "rewards, mean",
    [([1.0, 0.0], 0.5), ([0.7], 0.7), ([1.0, 1.0, 1.0, 0.0], 0.75)],
)
def test_ucb_running_mean(rewards, mean):
    m = Ucb(1)
    _play(m, rewards, arm=0)
    assert m.means[0] == pytest.approx(mean)
    assert m.counts[0] == len(rewards)
    assert m.t == len(rewards) + 1


def test_ucb_unplayed_mean_is_infinite():
    assert Ucb(2).means == [math.inf, math.inf]


def test_ucb_feedback_errors():
    m = Ucb(2)
    with pytest.raises(ContractViolation):
        m.feedback(0.5)
    m.advance()
    with pytest.raises(ValueError):
        m.feedback(1.5)
    with pytest.raises(ContractViolation):
        m.advance()


def test_ucb_constructor_errors():
    with pytest.raises(ValueError):
        Ucb(0)
    with pytest.raises(ValueError):
        Ucb(3, alpha=0)


def test_reset_clears_and_is_idempotent():
    m = Ucb(3)
    rng = make_rng(0)
    _play(m, rng.random(100))
    m.reset()
    assert m.counts == [0, 0, 0] and m.t == 1
    m.reset()
    assert m.counts == [0, 0, 0] and m.t == 1 and m.pending is None
    assert m.advance() == 0


def test_reset_clears_pending():
    m = Ucb(3)
    m.advance()
    m.reset()
    m.advance()  # no violation


@settings(max_examples=200)
@given(st.lists(st.sampled_from(["advance", "feedback"]), max_size=30))
def test_alternation_guard(calls):
    m = Ucb(3)
    pending = False
    for call in calls:
        if call == "advance":
            if pending:
                with pytest.raises(ContractViolation):
                    m.advance()
            else:
                m.advance()
                pending = True
        else:
            if pending:
                m.feedback(0.5)
                pending = False
            else:
                with pytest.raises(ContractViolation):
                    m.feedback(0.5)
    assert sum(m.counts) == m.t - 1


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=60))
def test_ucb_bookkeeping(rewards):
    m = Ucb(4)
    per_arm = {a: [] for a in range(4)}
    for r in rewards:
        a = m.advance()
        m.feedback(r)
        per_arm[a].append(r)
    assert sum(m.counts) == len(rewards)
    for a, rs in per_arm.items():
        if rs:
            assert m.means[a] == pytest.approx(sum(rs) / len(rs))


# -- linear machine ------------------------------------------------------------


def test_linear_fresh_equal_norm_tie():
    m = LinearUcb([[1, 0], [0, 1], [-1, 0]])
    assert m.advance() == 0


def test_linear_identical_candidates():
    m = LinearUcb([[0.5, 0.5]] * 3)
    for _ in range(20):
        assert m.advance() == 0
        m.feedback(0.3)


def test_linear_learns_sign_d1():
    m = LinearUcb([[1.0], [-1.0]])
    for _ in range(1000):
        arm = m.advance()
        m.feedback(0.9 if arm == 0 else 0.1)
    assert m.advance() == 0


def test_linear_feedback_updates():
    m = LinearUcb([[1, 0], [0, 1], [0, 0]])
    m._pending = 0
    m.feedback(1.0)
    assert np.array_equal(m.gram, [[2, 0], [0, 1]])
    assert np.array_equal(m.reward_sum, [1, 0])

    gram, total = m.gram.copy(), m.reward_sum.copy()
    m._pending = 2
    m.feedback(0.7)
    assert np.array_equal(m.gram, gram) and np.array_equal(m.reward_sum, total)

    m.reset()
    for _ in range(2):
        m._pending = 1
        m.feedback(0.5)
    assert np.array_equal(m.reward_sum, [0, 1])


def test_linear_gram_stays_positive_definite():
    rng = make_rng(1)
    m = LinearUcb(rng.random((10, 3)), intercept=True)
    for _ in range(200):
        m.advance()
        m.feedback(rng.random())
        assert np.allclose(m.gram, m.gram.T)
        assert np.linalg.eigvalsh(m.gram).min() > 0
        assert np.isfinite(m.optimistic_values()).all()


def test_linear_spec_scale_recoverable():
    m = LinearUcb([[1, 0]], noise_scale=1.0)
    m.rounds = 10
    assert m.confidence_scale() == pytest.approx(math.sqrt(2 * math.log(11)) + 1)


def test_linear_errors():
    with pytest.raises(ValueError):
        LinearUcb(np.zeros((0, 2)))
    m = LinearUcb([[1.0]])
    with pytest.raises(ContractViolation):
        m.feedback(0.5)


def test_linear_sanity_delta_gap():
    # unit-square vertices, reward theta . x + Bernoulli noise; best (1,1) by 0.4
    verts = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float)
    theta = np.array([0.5, 0.4])
    means = verts @ theta
    rng = make_rng(3)
    m = LinearUcb(verts)
    T = 10_000
    picks = np.empty(T, dtype=int)
    for t in range(T):
        a = m.advance()
        picks[t] = a
        m.feedback(1.0 if rng.random() < means[a] else 0.0)
    assert (picks[3 * T // 4 :] == 3).mean() > 0.9
