"""Trajectory kernels, compiled when available.

The Cython extension ``duelreduce._kernel`` is used if it imports; otherwise,
or when ``DUELREDUCE_PURE_PYTHON=1`` is set, the pure-Python versions in
``_kernel_py`` are used. Both consume the uniform stream identically.
"""

from __future__ import annotations

import os

from . import _kernel_py
from ._kernel_py import ALGORITHMS, UniformStream, make_reduction

# at most: left pick, two Bernoulli utilities, one choice
UNIFORMS_PER_DUEL = 4

_compiled = None
if os.environ.get("DUELREDUCE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    BACKEND = "cython"
    simulate_duels = _compiled.simulate_duels
    simulate_mab_ucb = _compiled.simulate_mab_ucb
else:
    BACKEND = "python"
    simulate_duels = _kernel_py.simulate_duels
    simulate_mab_ucb = _kernel_py.simulate_mab_ucb


def backends() -> dict:
    """All importable implementations, keyed by name."""
    out = {"python": _kernel_py}
    try:
        from . import _kernel

        out["cython"] = _kernel
    except ImportError:
        pass
    return out


__all__ = [
    "ALGORITHMS",
    "BACKEND",
    "UNIFORMS_PER_DUEL",
    "UniformStream",
    "backends",
    "make_reduction",
    "simulate_duels",
    "simulate_mab_ucb",
]
