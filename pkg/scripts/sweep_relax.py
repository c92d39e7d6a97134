"""Sweep the relaxation factor used by the alternating decoder's fallback.

For each factor, count how many of 100 random restarts reach the exact l1
objective on a few small instances. Usage: python3 scripts/sweep_relax.py
"""

import argparse

import numpy as np

from phaseless import decoders
from phaseless.measurements import phaseless_measure


def instance(seed, m=10, n=6):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    x0 = np.zeros(n)
    x0[rng.integers(n)] = rng.standard_normal()
    return A, phaseless_measure(A, x0)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--factors", type=float, nargs="+", default=[1.05, 1.3, 1.5, 1.8, 2.0, 2.5, 3.0])
    p.add_argument("--instances", type=int, default=5)
    p.add_argument("--restarts", type=int, default=100)
    a = p.parse_args()
    problems = [instance(s) for s in range(a.instances)]
    exact = [decoders.decode_noiseless_l1(A, obs).objective for A, obs in problems]
    for f in a.factors:
        decoders.RELAX = f
        hits = []
        for (A, obs), e in zip(problems, exact):
            r = decoders.decode_alternating(A, obs, 0.0, max_iters=100, restarts=a.restarts, seed=0)
            objs = [v for v in r.info["restart_objectives"] if v is not None]
            hits.append(sum(abs(v - e) <= 1e-6 for v in objs))
        print(f"RELAX={f:<6g} exact restarts per instance: {hits}")


if __name__ == "__main__":
    main()
