#!/usr/bin/env python3
"""Timing sweep of the conic path across section families.

    python scripts/solver_benchmark.py [--instances 20] [--tol 1e-7]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from gnorm import (
    base_norm,
    channels_section,
    comb_section,
    custom_section,
    herm,
    identity,
    states_section,
    trace_pair,
)


def rand_herm(rng, d, dims=()):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return herm((g + g.conj().T) / 2, dims)


def rand_custom(rng, d=3, extra=3):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    normalizer = herm(g @ g.conj().T / d) + 0.4 * identity(d)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    b0 = herm(g @ g.conj().T / d) + 0.4 * identity(d)
    b0 = b0 / trace_pair(b0, normalizer)
    return custom_section([b0] + [rand_herm(rng, d) for _ in range(extra)], normalizer)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=20)
    parser.add_argument("--tol", type=float, default=1e-7)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = [
        ("states(2) forced conic", states_section(2), 2),
        ("states(4) forced conic", states_section(4), 4),
        ("channels(2,2)", channels_section(2, 2), 4),
        ("custom d=3", rand_custom(rng), 3),
        ("comb(2,2,2,2)", comb_section((2, 2, 2, 2)), 16),
    ]
    print(f"{'section':<24} {'ambient':>7} {'span':>5} {'med ms':>8} {'max ms':>8} "
          f"{'med iters':>9} {'worst gap':>10}")
    for name, sec, d in rows:
        dims = sec.subsystem_dims
        times, iters, gaps = [], [], []
        for _ in range(args.instances):
            x = rand_herm(rng, d, dims=dims)
            t0 = time.perf_counter()
            res = base_norm(sec, x, tol=args.tol, prefer_closed=False)
            times.append(1e3 * (time.perf_counter() - t0))
            iters.append(res.iterations)
            gaps.append(res.gap)
        print(f"{name:<24} {sec.ambient_dim:>7} {sec.span_dim:>5} "
              f"{np.median(times):>8.1f} {max(times):>8.1f} "
              f"{int(np.median(iters)):>9d} {max(gaps):>10.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
