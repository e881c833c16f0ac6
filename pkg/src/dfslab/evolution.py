"""Fixed-step master-equation integrator and decay-rate extraction.

A classical 4th-order scheme with a stability guard: decoherence rates at
desk scale are O(N) in single-atom units, so a fixed step is simpler than
adaptivity and bit-for-bit reproducible. The trace is never renormalized;
its drift is reported as an integration diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import StabilityError
from .lindblad import DensityMatrix, LindbladModel
from .operators import dagger

#: Upper bound on dt * (||H||_F + sum rate ||J||_F^2) for the fixed step.
STABILITY_LIMIT = 0.05

#: Default step in units of inverse single-atom decay rate.
DEFAULT_DT = 1e-3

#: The compiled stepper wins below this Hilbert dimension; numpy's batched
#: BLAS wins above it (measured in benchmarks/benchmark_kernels.py).
NATIVE_DIM_LIMIT = 8


@dataclass(frozen=True)
class EvolutionResult:
    """Scalar time series of one integration run.

    ``excited_population`` is the expectation of the chosen observable (the
    total excitation number for atomic models) and ``trace_drift`` the
    largest deviation of the trace from 1 over the whole run.
    """

    times: np.ndarray
    excited_population: np.ndarray
    purity: np.ndarray
    trace_drift: float
    final_state: DensityMatrix
    snapshots: tuple = ()


def stability_margin(model: LindbladModel, dt: float) -> float:
    """dt times the crude generator scale used by the step-size guard."""
    scale = np.linalg.norm(model.h_eff)
    for op, rate in model.jumps:
        scale += rate * np.linalg.norm(op) ** 2
    return float(dt * scale)


def evolve(
    model: LindbladModel,
    rho0: DensityMatrix,
    t_final: float,
    dt: float = DEFAULT_DT,
    observable: np.ndarray | None = None,
    snapshot_stride: int = 0,
) -> EvolutionResult:
    """Integrate the master equation from ``rho0`` to ``t_final``.

    ``observable`` defaults to ``sum_l J_l† J_l`` (unweighted by rates), which
    coincides with the excitation-number operator for the canonical atomic
    jump decomposition when no mode was dropped; pass the exact operator when
    it matters. ``snapshot_stride > 0`` additionally records the density
    matrix every that many steps.
    """
    if rho0.dim != model.dim:
        raise ValueError("initial state dimension differs from model")
    if not t_final > 0.0 or not dt > 0.0:
        raise ValueError("t_final and dt must be positive")
    margin = stability_margin(model, dt)
    if margin > STABILITY_LIMIT:
        raise StabilityError(
            f"dt too large for this model: dt * scale = {margin:.3g} > {STABILITY_LIMIT}"
        )
    if observable is None:
        observable = np.zeros((model.dim, model.dim), dtype=complex)
        for op, _ in model.jumps:
            observable += dagger(op) @ op
    else:
        observable = np.asarray(observable, dtype=complex)

    n_steps = max(1, int(round(t_final / dt)))
    jumps, rates = model.jump_stack()
    stepper = _kernels.evolve_rk4
    if _kernels.BACKEND == "native" and model.dim > NATIVE_DIM_LIMIT:
        from ._kernels import py_backend

        stepper = py_backend.evolve_rk4
    final, traces, pops, purs, snaps = stepper(
        model.h_eff, jumps, rates, rho0.matrix, dt, n_steps, observable, snapshot_stride
    )
    times = dt * np.arange(n_steps + 1)
    return EvolutionResult(
        times=times,
        excited_population=pops,
        purity=purs,
        trace_drift=float(np.abs(traces - 1.0).max()),
        final_state=DensityMatrix(final),
        snapshots=tuple((dt * step, rho) for step, rho in snaps),
    )


def fit_decay_rate(result: EvolutionResult, window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of log population; the decay rate in rate units.

    With no window given, a crude endpoint estimate picks the default window
    ``[0.1, 1.0]`` lifetimes of the decaying signal, avoiding both the initial
    transient and the late-time floor. Populations inside the window must be
    strictly positive.
    """
    times = result.times
    pops = result.excited_population
    if window is None:
        if pops.max() < 1e-12:
            return 0.0
        positive = pops > 0.0
        if not positive.all():
            last = int(np.argmin(positive))  # first non-positive sample
            times, pops = times[:last], pops[:last]
        if pops.size < 2:
            raise ValueError("not enough positive samples to fit")
        span = times[-1] - times[0]
        crude = (np.log(pops[0]) - np.log(pops[-1])) / span if span > 0 else 0.0
        if crude > 0.0 and 0.1 / crude < times[-1]:
            window = (0.1 / crude, min(1.0 / crude, times[-1]))
        else:
            # run shorter than a tenth of a lifetime: fit everything positive
            window = (times[0], times[-1])
    t0, t1 = window
    mask = (result.times >= t0) & (result.times <= t1)
    if mask.sum() < 2:
        raise ValueError("fit window contains fewer than two samples")
    pops = result.excited_population[mask]
    if np.any(pops <= 0.0):
        raise ValueError("population must be strictly positive inside the fit window")
    slope = np.polyfit(result.times[mask], np.log(pops), 1)[0]
    return float(-slope)
