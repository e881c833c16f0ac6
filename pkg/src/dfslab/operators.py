"""Dense complex operator algebra for systems of two-level emitters.

Conventions used everywhere in the package:

* computational basis with particle 1 as the most significant bit,
* ``|0> = ground``, ``|1> = excited``,
* the single-qubit lowering operator maps excited to ground, so its only
  nonzero entry is ``<ground| sigma |excited> = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

#: Largest particle count for which full 2**N operators are built. A dense
#: Hermitian eigensolve at 16384 x 16384 is the practical ceiling; reduced
#: N x N paths are not subject to this cap.
N_MAX = 14

#: Relative tolerance for accepting a matrix as Hermitian.
HERMITIAN_RTOL = 1e-12

#: Single-qubit lowering operator |g><e| in the (ground, excited) basis.
LOWERING = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    """True if ``max|A - A†| <= rtol * max|A|`` entrywise (zero matrix passes)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = np.abs(a).max()
    if scale == 0.0:
        return True
    return np.abs(a - dagger(a)).max() <= rtol * scale


def require_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL, name: str = "matrix") -> None:
    if not is_hermitian(a, rtol):
        raise ValueError(f"{name} is not Hermitian within relative tolerance {rtol:g}")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a), np.asarray(b))


def embed_lowering(n: int, n_particles: int) -> np.ndarray:
    """Lowering operator of particle ``n`` (1-based) inside ``n_particles`` qubits.

    Returns the 2**N x 2**N matrix acting as the lowering operator on
    particle ``n`` and as the identity elsewhere: exactly one unit entry per
    basis state with particle ``n`` excited.
    """
    if not 1 <= n <= n_particles:
        raise ValueError(f"particle index {n} outside 1..{n_particles}")
    if n_particles > N_MAX:
        raise ValueError(f"n_particles={n_particles} exceeds cap {N_MAX}")
    dim = 1 << n_particles
    bit = 1 << (n_particles - n)  # particle 1 is the most significant bit
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    excited = cols[(cols & bit) != 0]
    out[excited ^ bit, excited] = 1.0
    return out


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are sorted ascending and ``eigenvectors[:, i]`` is the
    orthonormal eigenvector paired with ``eigenvalues[i]``. Within a
    degenerate cluster no particular eigenvector is promised; downstream
    checks must use residuals or projectors, never vector equality.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _phase_normalize(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant component is positive real."""
    out = vectors.copy()
    for i in range(out.shape[1]):
        col = out[:, i]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        lead = np.argmax(mags > 1e-12 * top)
        phase = col[lead] / abs(col[lead])
        out[:, i] = col * phase.conjugate()
    return out


def hermitian_eig(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> HermitianSpectrum:
    """Full eigendecomposition of a Hermitian matrix.

    Deterministic output: eigenvalues ascending, each eigenvector phase-fixed
    so that its first significant component is positive real. Raises
    ``ValueError`` for non-Hermitian input and ``NumericalError`` if the
    underlying solver fails to converge.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("hermitian_eig expects a square matrix")
    require_hermitian(a, rtol)
    sym = 0.5 * (a + dagger(a))  # strip the (tolerated) anti-Hermitian noise
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver did not converge: {exc}") from exc
    return HermitianSpectrum(eigenvalues=w, eigenvectors=_phase_normalize(v))
