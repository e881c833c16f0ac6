"""Numerical witnesses for the impossibility of multi-atom protected states.

Separated emitters in a homogeneous isotropic memoryless environment admit no
perfectly protected multi-atom state. Two numerical surrogates back this up:

* a Gram-rank check that plane waves (optionally weighted by monomials)
  anchored at distinct positions stay linearly independent on a momentum
  sphere, and
* strict positivity of the smallest reduced-matrix eigenvalue, which tends
  to zero only in the co-location limit.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .atoms import AtomConfiguration, reduced_matrix
from ._kernels import K0


@dataclass(frozen=True)
class GramReport:
    """Singular values and numerical rank of the sampled function family."""

    n_functions: int
    n_samples: int
    singular_values: np.ndarray  # descending
    rank_at_tol: int
    tol: float


def fibonacci_sphere(n_samples: int) -> np.ndarray:
    """Deterministic quasi-uniform unit vectors (golden-angle lattice)."""
    i = np.arange(n_samples)
    z = 1.0 - 2.0 * (i + 0.5) / n_samples
    azimuth = np.pi * (3.0 - np.sqrt(5.0)) * i
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([np.cos(azimuth) * s, np.sin(azimuth) * s, z])


def gram_rank_check(
    positions: Sequence[Sequence[float]] | np.ndarray,
    k_radius: float = K0,
    n_samples: int | None = None,
    monomial_exponents: Sequence[Sequence[int]] | None = None,
    tol: float = 1e-8,
) -> GramReport:
    """Rank of ``{P_j(k) exp(i k . x_j)}`` sampled on the sphere ``|k| = k_radius``.

    One function per position; ``P_j`` defaults to 1, or to the monomial
    ``k^alpha_j`` given per-function exponent triples. Functions anchored at
    distinct positions are linearly independent, so the numerical rank equals
    the function count unless positions repeat.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise ValueError("positions must be an (N, 3) array")
    n_functions = positions.shape[0]
    if not k_radius > 0.0:
        raise ValueError("k_radius must be positive")
    if n_samples is None:
        n_samples = 16 * n_functions
    if n_samples < 4 * n_functions:
        raise ValueError(f"need at least {4 * n_functions} samples for {n_functions} functions")

    points = k_radius * fibonacci_sphere(n_samples)
    design = np.exp(1j * points @ positions.T)
    if monomial_exponents is not None:
        if len(monomial_exponents) != n_functions:
            raise ValueError("one exponent triple per function required")
        weights = np.stack(
            [np.prod(points ** np.asarray(alpha, dtype=float), axis=1) for alpha in monomial_exponents],
            axis=1,
        )
        design = weights * design
    singular_values = np.linalg.svd(design, compute_uv=False)
    rank = int(np.sum(singular_values > tol * singular_values[0])) if singular_values[0] > 0 else 0
    return GramReport(
        n_functions=n_functions,
        n_samples=n_samples,
        singular_values=singular_values,
        rank_at_tol=rank,
        tol=tol,
    )


def min_nontrivial_eigenvalue(config: AtomConfiguration) -> float:
    """Smallest reduced-matrix eigenvalue: the slowest nontrivial decay rate.

    The single-excitation manifold hosts the most subradiant nontrivial
    states of this model, so strict positivity of this value witnesses the
    absence of a protected multi-atom state. Only the co-location limit
    (excluded here) reaches zero.
    """
    if config.dicke:
        raise ValueError("co-located (dicke) configurations are excluded; the witness is trivially 0")
    return float(np.linalg.eigvalsh(reduced_matrix(config).entries).min())


def dicke_convergence(
    builder: Callable[[float], AtomConfiguration],
    r_values: Sequence[float],
) -> np.ndarray:
    """Tabulate ``(r, smallest reduced eigenvalue)`` along a shrinking family.

    ``builder`` maps a length parameter to a configuration; values must be
    positive and decreasing. The witness stays positive for every r > 0 and
    decreases toward zero as the geometry collapses.
    """
    r_values = [float(r) for r in r_values]
    if not r_values or any(r <= 0.0 for r in r_values):
        raise ValueError("r_values must be positive")
    if any(b >= a for a, b in zip(r_values, r_values[1:])):
        raise ValueError("r_values must be strictly decreasing")
    rows = [(r, min_nontrivial_eigenvalue(builder(r))) for r in r_values]
    return np.array(rows)
