"""Pure-numpy implementations of the hot kernels.

Semantics must match ``_native`` exactly (same branch cutoffs, same update
order); the compiled module is only a faster drop-in.
"""

from __future__ import annotations

import numpy as np

K0 = 2.0 * np.pi          # wavenumber, lengths measured in resonant wavelengths
EPS_DICKE = 1e-8          # below this separation the co-location limit is returned
SERIES_CUTOFF = 1e-3      # switch to series evaluation to survive cancellation


def lindblad_rhs(
    h: np.ndarray,
    jumps: np.ndarray,
    rates: np.ndarray,
    gamma_total: np.ndarray,
    rho: np.ndarray,
) -> np.ndarray:
    """Right-hand side -i[h, rho] + sum_l rate_l (J rho J† - {J†J, rho}/2).

    ``gamma_total`` must be the precomputed sum of ``rate_l J†J``.
    """
    out = -1j * (h @ rho - rho @ h)
    out -= 0.5 * (gamma_total @ rho + rho @ gamma_total)
    if len(rates):
        sandwiched = np.matmul(np.matmul(jumps, rho), jumps.conj().transpose(0, 2, 1))
        out += np.tensordot(rates, sandwiched, axes=1)
    return out


def evolve_rk4(
    h: np.ndarray,
    jumps: np.ndarray,
    rates: np.ndarray,
    rho0: np.ndarray,
    dt: float,
    n_steps: int,
    observable: np.ndarray,
    snapshot_stride: int = 0,
):
    """Classical fixed-step 4th-order integration of the master equation.

    Returns ``(rho_final, traces, populations, purities, snapshots)`` where
    the scalar arrays have ``n_steps + 1`` entries (sample 0 is the initial
    state) and ``snapshots`` is a list of ``(step, rho)`` pairs taken every
    ``snapshot_stride`` steps (empty when the stride is 0).
    """
    rho = np.array(rho0, dtype=complex)
    gamma_total = np.zeros_like(rho)
    for jump, rate in zip(jumps, rates):
        gamma_total += rate * (jump.conj().T @ jump)

    traces = np.empty(n_steps + 1)
    pops = np.empty(n_steps + 1)
    purs = np.empty(n_steps + 1)
    snapshots: list[tuple[int, np.ndarray]] = []

    def record(i: int) -> None:
        traces[i] = np.trace(rho).real
        pops[i] = np.sum(rho * observable.T).real
        purs[i] = np.vdot(rho, rho).real
        if snapshot_stride and i % snapshot_stride == 0:
            snapshots.append((i, rho.copy()))

    record(0)
    for step in range(1, n_steps + 1):
        k1 = lindblad_rhs(h, jumps, rates, gamma_total, rho)
        k2 = lindblad_rhs(h, jumps, rates, gamma_total, rho + (0.5 * dt) * k1)
        k3 = lindblad_rhs(h, jumps, rates, gamma_total, rho + (0.5 * dt) * k2)
        k4 = lindblad_rhs(h, jumps, rates, gamma_total, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        record(step)
    return rho, traces, pops, purs, snapshots


def pair_coupling(sep: np.ndarray, dipole: np.ndarray) -> float:
    """Collective-decay coupling of one emitter pair, in single-atom rate units."""
    r = float(np.sqrt(sep[0] ** 2 + sep[1] ** 2 + sep[2] ** 2))
    if r < EPS_DICKE:
        return 1.0
    u = K0 * r
    c = (dipole[0] * sep[0] + dipole[1] * sep[1] + dipole[2] * sep[2]) / r
    a = 1.0 - c * c
    b = 1.0 - 3.0 * c * c
    if u < SERIES_CUTOFF:
        u2 = u * u
        t1 = 1.0 - u2 / 6.0 + u2 * u2 / 120.0
        t2 = -1.0 / 3.0 + u2 / 30.0 - u2 * u2 / 840.0
    else:
        t1 = np.sin(u) / u
        t2 = np.cos(u) / (u * u) - np.sin(u) / (u * u * u)
    return 1.5 * (a * t1 + b * t2)


def fill_reduced(positions: np.ndarray, dipole: np.ndarray) -> np.ndarray:
    """Pairwise coupling matrix: unit diagonal, symmetric off-diagonals."""
    positions = np.asarray(positions, dtype=float)
    dipole = np.asarray(dipole, dtype=float)
    n = positions.shape[0]
    out = np.eye(n)
    for j in range(n):
        for k in range(j + 1, n):
            out[j, k] = out[k, j] = pair_coupling(positions[j] - positions[k], dipole)
    return out
