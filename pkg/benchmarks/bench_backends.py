"""Time the numba hot kernels against their pure-numpy twins.

Runs both implementations on identical inputs at a few sizes, checks the
outputs agree bit for bit, and prints a timing table. Requires numba for
the comparison; without it only the numpy path is timed.

    python benchmarks/bench_backends.py [--full]
"""

import argparse
import time

import numpy as np

from quadhc.backend import NUMBA_ENABLED
from quadhc._kernels import _passive_kernel_numpy, _pref_counts_np
from quadhc.oracle import sample_passive
from quadhc.pairs import num_pairs, pair_decode_arr
from quadhc.planted import PlantedConfig, generate_planted

if NUMBA_ENABLED:
    from quadhc._kernels import _passive_kernel_numba, _pref_counts_nb


def _time(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pref_counts(n, p, seed):
    cfg = PlantedConfig(n0=n // 8, levels=3, mu=0.8, delta=0.1, sigma=0.1, seed=seed)
    w, _ = generate_planted(cfg)
    qs = sample_passive(w, p, seed=seed)
    pw = qs.winner.astype(np.int32)
    pl = qs.loser.astype(np.int32)
    npairs = num_pairs(n)
    # singleton partition: every pair is its own cell, one denominator class
    paircell = np.arange(npairs, dtype=np.int32)
    dci = np.zeros(npairs, dtype=np.int16)
    rows = [f"preference counts: n={n} |Q|={len(qs):,}"]
    acc_np = np.zeros(npairs, dtype=np.int64)
    t_np, _ = _time(_pref_counts_np, pw, pl, paircell, dci, 1, acc_np)
    rows.append(f"  numpy : {t_np * 1e3:9.1f} ms")
    if NUMBA_ENABLED:
        acc_nb = np.zeros(npairs, dtype=np.int64)
        _pref_counts_nb(pw[:16], pl[:16], paircell, dci, 1, acc_nb)  # compile
        acc_nb[:] = 0
        t_nb, _ = _time(_pref_counts_nb, pw, pl, paircell, dci, 1, acc_nb)
        # accumulators were reused across repeats; rerun once for the check
        a1 = np.zeros(npairs, dtype=np.int64)
        a2 = np.zeros(npairs, dtype=np.int64)
        _pref_counts_np(pw, pl, paircell, dci, 1, a1)
        _pref_counts_nb(pw, pl, paircell, dci, 1, a2)
        assert np.array_equal(a1, a2), "backend mismatch"
        rows.append(f"  numba : {t_nb * 1e3:9.1f} ms   ({t_np / t_nb:5.1f}x)")
    return "\n".join(rows)


def bench_passive_kernel(n, p, seed):
    cfg = PlantedConfig(n0=n // 8, levels=3, mu=0.8, delta=0.1, sigma=0.1, seed=seed)
    w, _ = generate_planted(cfg)
    qs = sample_passive(w, p, seed=seed)
    npairs = num_pairs(n)
    pa, pb = pair_decode_arr(np.arange(npairs), n)
    args = (qs.winner, qs.loser, pa, pb, n, npairs)
    rows = [f"passive kernel: n={n} |Q|={len(qs):,}"]
    t_np, k_np = _time(_passive_kernel_numpy, *args)
    rows.append(f"  numpy : {t_np * 1e3:9.1f} ms")
    if NUMBA_ENABLED:
        _passive_kernel_numba(qs.winner[:16], qs.loser[:16], pa, pb, n, npairs)
        t_nb, k_nb = _time(_passive_kernel_numba, *args)
        assert np.array_equal(k_np, k_nb), "backend mismatch"
        rows.append(f"  numba : {t_nb * 1e3:9.1f} ms   ({t_np / t_nb:5.1f}x)")
    return "\n".join(rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--full", action="store_true", help="include the experiment-scale size"
    )
    args = parser.parse_args()
    print(f"numba available: {NUMBA_ENABLED}")
    sizes = [(48, 0.3), (96, 0.2)]
    if args.full:
        sizes.append((240, 0.05))
    for n, p in sizes:
        print(bench_pref_counts(n, p, seed=1))
        print(bench_passive_kernel(n, p, seed=2))


if __name__ == "__main__":
    main()
