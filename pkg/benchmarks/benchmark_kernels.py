#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot paths (fixed-step master-equation integration and the
pairwise coupling-matrix fill) on both backends and prints a table with
speedups. Run from the repository root:

    python benchmarks/benchmark_kernels.py [--steps 2000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dfslab import collective_model, excitation_number, line_config, pure_state
from dfslab._kernels import py_backend

try:
    from dfslab._kernels import _native as native
except ImportError:
    native = None


def best_of(repeats: int, fn, *args) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def evolve_case(n_atoms: int, steps: int):
    config = line_config(n_atoms, 0.25, "axial")
    model = collective_model(config)
    jumps, rates = model.jump_stack()
    psi = np.zeros(1 << n_atoms)
    psi[1] = 1.0
    rho0 = pure_state(psi).matrix
    obs = excitation_number(n_atoms).astype(complex)
    return (model.h_eff, jumps, rates, rho0, 1e-3, steps, obs, 0)


def fill_case(n_atoms: int):
    rng = np.random.default_rng(0)
    positions = rng.uniform(-2, 2, (n_atoms, 3))
    dipole = np.array([0.0, 0.0, 1.0])
    return positions, dipole


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2000, help="RK4 steps per run")
    parser.add_argument("--repeats", type=int, default=5, help="best-of repeats")
    args = parser.parse_args()

    if native is None:
        print("compiled kernels not available; nothing to compare")
        return 0

    print(f"{'kernel':<28}{'python':>12}{'native':>12}{'speedup':>10}")
    print("-" * 62)

    for n_atoms in (2, 3, 4):
        case = evolve_case(n_atoms, args.steps)
        t_py = best_of(args.repeats, py_backend.evolve_rk4, *case)
        t_nat = best_of(args.repeats, native.evolve_rk4, *case)
        label = f"evolve_rk4 N={n_atoms} ({args.steps} steps)"
        print(f"{label:<28}{t_py * 1e3:>10.1f}ms{t_nat * 1e3:>10.1f}ms{t_py / t_nat:>9.1f}x")

    for n_atoms in (60, 200):
        positions, dipole = fill_case(n_atoms)
        t_py = best_of(args.repeats, py_backend.fill_reduced, positions, dipole)
        t_nat = best_of(args.repeats, native.fill_reduced, positions, dipole)
        label = f"fill_reduced N={n_atoms}"
        print(f"{label:<28}{t_py * 1e3:>10.1f}ms{t_nat * 1e3:>10.1f}ms{t_py / t_nat:>9.1f}x")

    # sanity: identical output on a shared case
    case = evolve_case(2, 200)
    diff = np.abs(py_backend.evolve_rk4(*case)[0] - native.evolve_rk4(*case)[0]).max()
    print(f"\nmax |python - native| on a shared run: {diff:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
