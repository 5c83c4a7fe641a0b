"""Time the compiled and pure-Python trajectory kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--horizon T] [--repeat N]
"""

import argparse
import time

import numpy as np

from duelreduce import kernel
from duelreduce.core import make_rng
from duelreduce.harness import algorithm_alpha, scenario_registry


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=32768)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scenarios", default="1good-linear,geom-logit,yj")
    args = ap.parse_args()

    impls = kernel.backends()
    if "cython" not in impls:
        print("compiled extension not built; only the Python kernel is available")
    reg = scenario_registry()
    uniforms = make_rng(0).random(kernel.UNIFORMS_PER_DUEL * args.horizon)

    names = sorted(impls)
    print(f"horizon {args.horizon}, best of {args.repeat}")
    print(f"{'scenario':14s} {'algorithm':9s} " + " ".join(f"{n:>10s}" for n in names) + "   speedup")
    for scen in args.scenarios.split(","):
        env = reg[scen]
        for alg in kernel.ALGORITHMS:
            alpha = algorithm_alpha(alg, env.n_arms, args.horizon)
            secs, outs = {}, {}
            for n in names:
                run = lambda: impls[n].simulate_duels(alg, env, alpha, args.horizon, uniforms)
                secs[n] = best_of(run, args.repeat)
                outs[n] = run()
            if len(outs) == 2:
                same = all(np.array_equal(a, b, equal_nan=True) for a, b in zip(*outs.values()))
                assert same, f"backends disagree on {scen}/{alg}"
            cols = " ".join(f"{secs[n] * 1e3:8.1f}ms" for n in names)
            speed = f"{secs['python'] / secs['cython']:8.1f}x" if "cython" in secs else ""
            print(f"{scen:14s} {alg:9s} {cols} {speed}")


if __name__ == "__main__":
    main()
