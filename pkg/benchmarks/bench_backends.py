#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the pure-Python twin.

Kernel-level timings run both implementations in-process; the end-to-end
outage evaluation is re-executed in a subprocess with FASRIS_PURE_PYTHON=1
because the backend is fixed at import time.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def _time(fn, min_time=0.2):
    fn()  # warm up
    n = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(n):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_time:
            return dt / n
        n = max(n + 1, int(n * min_time / max(dt, 1e-9)))


def kernel_table(quick=False):
    from fasris import _kernels_py

    try:
        from fasris import _kernels
    except ImportError:
        _kernels = None
        print("compiled extension not built; showing pure-python only\n")

    rng = np.random.default_rng(42)
    ab = rng.uniform(0, 40, size=(200, 2))
    t_nodes = np.linspace(1e-9, 15.0, 480)
    x_nodes = np.linspace(0.0, 200.0, 2000)

    cases = [
        ("marcum_q1_pair x200 (scalars)",
         lambda m: [m.marcum_q1_pair(a, b) for a, b in ab]),
        ("bessel_j0 x200 (scalars)",
         lambda m: [m.bessel_j0(x) for x in np.linspace(0, 400, 200)]),
        ("i0e_array (2000 nodes)", lambda m: m.i0e_array(x_nodes)),
        ("bdma_integrand (480 nodes)",
         lambda m: m.bdma_integrand(t_nodes, 3.0, 0.97, 8, 5.0)),
        ("design_integrand (480 nodes)",
         lambda m: m.design_integrand(t_nodes, 0.97, 8, 5.0)),
    ]
    print(f"{'kernel':<32} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for name, fn in cases:
        tp = _time(lambda: fn(_kernels_py), 0.05 if quick else 0.2)
        if _kernels is None:
            print(f"{name:<32} {tp * 1e3:>10.3f}ms {'-':>12} {'-':>9}")
        else:
            tc = _time(lambda: fn(_kernels), 0.05 if quick else 0.2)
            print(f"{name:<32} {tp * 1e3:>10.3f}ms {tc * 1e3:>10.3f}ms {tp / tc:>8.1f}x")


END_TO_END = r"""
import time
import numpy as np
from fasris import analysis, backend, channel, optimize

cfg = channel.SystemConfig(N=50, M=9, W=5.0, K=1.0, R=5.0, noise_power=-104.0,
                           pl_exp_bs_ris=2.2, pl_exp_ris_user=2.2, pl_ref_db=29.0)
sigma = channel.jakes_matrix(cfg.N, cfg.W)
part = channel.bdma_partition(sigma, policy="eigen", mu_sq=0.97)
los = channel.generate_los(cfg.M, np.random.default_rng(cfg.los_angle_seed))
phases = optimize.optimal_phases(los.h_bar, los.g_bar)
stats = analysis.cascaded_stats(cfg, los, phases)
t0 = time.perf_counter()
for p_dbm in range(0, 21, 2):
    g = analysis.normalized_threshold(cfg.R, p_dbm, cfg.noise_power)
    analysis.outage_bdma(analysis.OutageQuery(g, part, stats))
dt = time.perf_counter() - t0
print(f"  {backend.backend_name():<22} 11-point power sweep: {dt:8.2f} s")
"""


def end_to_end():
    print("\nend-to-end analytic sweep (N=50, eigen partition, 11 powers):")
    sys.stdout.flush()
    for env_val in ("0", "1"):
        env = dict(os.environ, FASRIS_PURE_PYTHON=env_val)
        subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="shorter timing windows")
    args = ap.parse_args()
    kernel_table(quick=args.quick)
    end_to_end()
