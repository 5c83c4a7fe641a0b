"""Dueling bandits solved through ordinary stochastic multi-armed bandit machines.

Strategies: :class:`Doubler`, :class:`MultiSbm`, :class:`Sparring`, each
driving one or more :class:`Ucb` (or :class:`LinearUcb`) machines.
"""

from .core import ChoiceOutcome, GapProfile, LinkFunction, gap_profile, link_eval, make_rng
from .env import (
    UTILITY_ROWS,
    YJ_EPSILON,
    LinearUtilityEnvironment,
    PreferenceMatrixEnvironment,
    RegretLedger,
    UtilityEnvironment,
    verify_relaxed_properties,
)
from .harness import CurveSummary, ScenarioSpec, emit_csv, make_spec, run_cell, scenario_registry
from .kernel import BACKEND
from .reductions import (
    BernoulliMab,
    Doubler,
    MultiSbm,
    PullLog,
    Sparring,
    dueling_to_mab_adapter,
    multisbm_alpha,
)
from .sbm import ContractViolation, LinearUcb, Ucb

__version__ = "0.1.0"
