"""Collective decay of N two-level atoms at fixed positions.

Units are fixed once and for all: lengths in resonant wavelengths, rates in
units of the isolated-atom decay rate (Einstein A coefficient), wavenumber
``k0 = 2 pi``. All atoms share one dipole direction.

The reduced decay matrix is the N x N matrix of pairwise couplings with unit
diagonal. Its eigenvalues are the inverse lifetimes of the collective states
with exactly one atom excited; together with the shifted family they embed
exactly into the spectrum of the full 2**N x 2**N decoherence operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lindblad import LindbladModel
from .operators import N_MAX, HermitianSpectrum, embed_lowering, hermitian_eig

K0 = _kernels.K0
EPS_DICKE = _kernels.EPS_DICKE

#: Eigenmodes of the reduced matrix below this rate are dropped from the
#: canonical jump decomposition (rates must be strictly positive).
MODE_RATE_FLOOR = 1e-12


@dataclass(frozen=True)
class AtomConfiguration:
    """Emitter positions (wavelength units) with a shared unit dipole.

    ``dicke`` marks the co-location limit: pairwise couplings are pinned to
    their analytic limit 1 regardless of the stored positions, and coincident
    positions become legal.
    """

    positions: np.ndarray
    dipole: np.ndarray
    gamma0: float = 1.0
    dicke: bool = False

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must be an (N, 3) array with N >= 1")
        dip = np.array(self.dipole, dtype=float).ravel()
        if dip.shape != (3,):
            raise ValueError("dipole must be a 3-vector")
        if abs(np.linalg.norm(dip) - 1.0) > 1e-12:
            raise ValueError("dipole must be a unit vector (within 1e-12)")
        if not float(self.gamma0) > 0.0:
            raise ValueError("gamma0 must be positive")
        if not self.dicke:
            for j in range(pos.shape[0]):
                for k in range(j + 1, pos.shape[0]):
                    if np.linalg.norm(pos[j] - pos[k]) == 0.0:
                        raise ValueError(
                            f"atoms {j + 1} and {k + 1} coincide; "
                            "co-located atoms require the dicke flag"
                        )
        pos.flags.writeable = False
        dip.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "dipole", dip)
        object.__setattr__(self, "gamma0", float(self.gamma0))

    @property
    def n(self) -> int:
        return self.positions.shape[0]


def gamma_coupling(separation: np.ndarray, dipole: np.ndarray) -> float:
    """Pairwise collective-decay coupling for one separation vector.

    Evaluates, with ``u = k0 |x|`` and ``c`` the cosine between dipole and
    separation::

        (3/2) { (1 - c^2) sin(u)/u + (1 - 3 c^2) (cos(u)/u^2 - sin(u)/u^3) }

    The three-term bracket cancels catastrophically as u -> 0, so below
    ``u = 1e-3`` a series expansion is used and below a separation of
    1e-8 wavelengths the exact co-location limit 1 is returned.
    """
    sep = np.asarray(separation, dtype=float).ravel()
    if sep.shape != (3,) or not np.all(np.isfinite(sep)):
        raise ValueError("separation must be a finite 3-vector")
    dip = np.asarray(dipole, dtype=float).ravel()
    nrm = np.linalg.norm(dip)
    if dip.shape != (3,) or nrm == 0.0:
        raise ValueError("dipole must be a nonzero 3-vector")
    return float(_kernels.pair_coupling(sep, dip / nrm))


@dataclass(frozen=True)
class ReducedDecayMatrix:
    """Pairwise decay-coupling matrix: real symmetric, unit diagonal, PSD."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("reduced matrix must be square")
        if not np.array_equal(m, m.T):
            raise ValueError("reduced matrix must be symmetric")
        if not np.all(np.diag(m) == 1.0):
            raise ValueError("reduced matrix diagonal must be exactly 1")
        off = m - np.eye(m.shape[0])
        if np.abs(off).max() > 1.0 + 1e-9:
            raise ValueError("off-diagonal couplings exceed 1 in magnitude")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("reduced matrix is not positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def spectrum(self) -> HermitianSpectrum:
        return hermitian_eig(self.entries)


def reduced_matrix(config: AtomConfiguration) -> ReducedDecayMatrix:
    """Pairwise coupling matrix of a configuration (all ones in the Dicke limit)."""
    if config.dicke:
        return ReducedDecayMatrix(np.ones((config.n, config.n)))
    return ReducedDecayMatrix(_kernels.fill_reduced(config.positions, config.dipole))


def full_gamma(config: AtomConfiguration) -> np.ndarray:
    """Full 2**N x 2**N decoherence operator of the ensemble.

    Built directly from matrix elements of ``sum_jk gamma0 g_jk sigma_j† sigma_k``
    in the computational basis (particle 1 = most significant bit, 0 = ground);
    equals the brute-force sum over embedded lowering-operator products.
    """
    n = config.n
    if n > N_MAX:
        raise ValueError(f"N={n} exceeds cap {N_MAX} for full operators")
    g = reduced_matrix(config).entries
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    bits = [1 << (n - j) for j in range(1, n + 1)]  # particle j's bit
    for col in range(dim):
        for k in range(n):
            if not col & bits[k]:
                continue
            lowered = col ^ bits[k]
            for j in range(n):
                if lowered & bits[j]:
                    continue
                out[lowered | bits[j], col] += config.gamma0 * g[j, k]
    return out


def excitation_number(n_atoms: int) -> np.ndarray:
    """Total excitation-number operator ``sum_n sigma_n† sigma_n`` (diagonal)."""
    if n_atoms > N_MAX:
        raise ValueError(f"N={n_atoms} exceeds cap {N_MAX} for full operators")
    counts = [bin(b).count("1") for b in range(1 << n_atoms)]
    return np.diag(np.array(counts, dtype=complex))


def collective_model(config: AtomConfiguration, h_eff: np.ndarray | None = None) -> LindbladModel:
    """Canonical jump decomposition of the ensemble's decoherence.

    Diagonalizes the reduced matrix and forms one collective lowering mode
    per strictly positive eigenvalue: ``J_m = sum_n O[n, m] sigma_n`` with rate
    ``gamma0 * mu_m``. This is the positive-rate form of the generator and
    reconstructs the full decoherence operator exactly.
    """
    n = config.n
    if n > N_MAX:
        raise ValueError(f"N={n} exceeds cap {N_MAX} for full operators")
    mu, modes = np.linalg.eigh(reduced_matrix(config).entries)
    lowerings = [embed_lowering(j, n) for j in range(1, n + 1)]
    jumps = []
    for m in range(n):
        if mu[m] <= MODE_RATE_FLOOR:
            continue
        op = np.zeros_like(lowerings[0])
        for j in range(n):
            op += modes[j, m] * lowerings[j]
        jumps.append((op, config.gamma0 * mu[m]))
    if h_eff is None:
        h_eff = np.zeros((1 << n, 1 << n), dtype=complex)
    return LindbladModel(h_eff=h_eff, jumps=tuple(jumps))


def line_config(
    n: int, spacing: float, orientation: str = "axial", gamma0: float = 1.0, dicke: bool = False
) -> AtomConfiguration:
    """Equally spaced chain along z; dipole along the chain or across it."""
    if n < 1:
        raise ValueError("need at least one atom")
    if not spacing > 0.0:
        raise ValueError("spacing must be positive")
    positions = [(0.0, 0.0, i * spacing) for i in range(n)]
    if orientation == "axial":
        dipole = (0.0, 0.0, 1.0)
    elif orientation == "transverse":
        dipole = (1.0, 0.0, 0.0)
    else:
        raise ValueError(f"unknown orientation {orientation!r} (axial|transverse)")
    return AtomConfiguration(positions, dipole, gamma0=gamma0, dicke=dicke)


def square_config(side: float, gamma0: float = 1.0, dicke: bool = False) -> AtomConfiguration:
    """Four atoms on square corners in the xy-plane, dipole along one side (x)."""
    if not side > 0.0:
        raise ValueError("side must be positive")
    positions = [(0.0, 0.0, 0.0), (side, 0.0, 0.0), (side, side, 0.0), (0.0, side, 0.0)]
    return AtomConfiguration(positions, (1.0, 0.0, 0.0), gamma0=gamma0, dicke=dicke)


def ring_config(
    n: int, radius: float, orientation: str = "normal", gamma0: float = 1.0, dicke: bool = False
) -> AtomConfiguration:
    """Atoms equally spaced on a circle in the xy-plane.

    The dipole is normal to the plane by default; "tangential" places it in
    the plane (along x), the closest shared-direction reading of an in-plane
    choice.
    """
    if n < 2:
        raise ValueError("a ring needs at least two atoms")
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    angles = 2.0 * np.pi * np.arange(n) / n
    positions = np.column_stack(
        [radius * np.cos(angles), radius * np.sin(angles), np.zeros(n)]
    )
    if orientation == "normal":
        dipole = (0.0, 0.0, 1.0)
    elif orientation == "tangential":
        dipole = (1.0, 0.0, 0.0)
    else:
        raise ValueError(f"unknown orientation {orientation!r} (normal|tangential)")
    return AtomConfiguration(positions, dipole, gamma0=gamma0, dicke=dicke)


@dataclass(frozen=True)
class EmbeddingReport:
    """Check that reduced-matrix eigenpairs embed into the full spectrum.

    For every eigenpair ``(lam, x)`` of the reduced matrix, both
    ``gamma0 * lam`` and ``(N - 2 + lam) * gamma0`` must appear in the full
    spectrum, with the single-excitation embedding ``sum_l x_l |1, l>`` and
    the one-atom-ground embedding ``sum_l x_l |0, l>`` as eigenvectors.
    Spectral inclusion only: the full spectrum generally contains additional
    values outside these two families.
    """

    reduced_eigenvalues: np.ndarray
    single_excitation_distances: np.ndarray
    complement_distances: np.ndarray
    single_excitation_residuals: np.ndarray
    complement_residuals: np.ndarray
    tol: float
    passed: bool


def reduced_embedding_report(config: AtomConfiguration, tol: float = 1e-9) -> EmbeddingReport:
    """Verify both reduced-spectrum families inside the full decoherence spectrum."""
    n = config.n
    if n > N_MAX:
        raise ValueError(f"N={n} exceeds cap {N_MAX} for full operators")
    gamma = full_gamma(config)
    full_spectrum = np.linalg.eigvalsh(gamma)
    lam, vecs = np.linalg.eigh(reduced_matrix(config).entries)

    dim = 1 << n
    bits = [1 << (n - j) for j in range(1, n + 1)]
    single_dist = np.empty(n)
    compl_dist = np.empty(n)
    single_res = np.empty(n)
    compl_res = np.empty(n)
    for i in range(n):
        target_single = config.gamma0 * lam[i]
        target_compl = (n - 2 + lam[i]) * config.gamma0
        single_dist[i] = np.abs(full_spectrum - target_single).min()
        compl_dist[i] = np.abs(full_spectrum - target_compl).min()
        psi = np.zeros(dim, dtype=complex)
        phi = np.zeros(dim, dtype=complex)
        for l in range(n):
            psi[bits[l]] = vecs[l, i]
            phi[(dim - 1) ^ bits[l]] = vecs[l, i]
        single_res[i] = np.linalg.norm(gamma @ psi - target_single * psi)
        compl_res[i] = np.linalg.norm(gamma @ phi - target_compl * phi)

    passed = bool(
        single_dist.max() <= tol
        and compl_dist.max() <= tol
        and single_res.max() <= tol
        and compl_res.max() <= tol
    )
    return EmbeddingReport(
        reduced_eigenvalues=lam,
        single_excitation_distances=single_dist,
        complement_distances=compl_dist,
        single_excitation_residuals=single_res,
        complement_residuals=compl_res,
        tol=tol,
        passed=passed,
    )
