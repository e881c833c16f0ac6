"""Abstract open quantum system: dissipator, decoherence operator, kernel search.

The system is specified by jump operators ``J_l`` with positive rates and an
effective Hamiltonian. Everything decoherence-related derives from the
decoherence operator ``Gamma = sum_l rate_l J_l† J_l``: its eigenvalues are
the inverse lifetimes of the corresponding eigenstates, and its numerical
kernel spans the instantaneous pure decoherence-free states (IPDFS) whenever
all jump operators are nilpotent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericalError
from .operators import dagger, hermitian_eig, is_hermitian, require_hermitian

#: Default relative spectral threshold for kernel membership.
TOL_KERNEL = 1e-10


def _as_square_complex(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    return a


@dataclass(frozen=True)
class LindbladModel:
    """Open system: effective Hamiltonian plus rated jump operators.

    ``jumps`` is a sequence of ``(operator, rate)`` pairs with strictly
    positive, time-independent rates. The environment-induced level shift has
    no closed atomic form here, so by default it is simply absorbed into (or
    omitted from) ``h_eff``.
    """

    h_eff: np.ndarray
    jumps: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        h = _as_square_complex(self.h_eff, "h_eff")
        require_hermitian(h, 1e-12, "h_eff")
        cleaned = []
        for op, rate in self.jumps:
            op = _as_square_complex(op, "jump operator")
            if op.shape != h.shape:
                raise ValueError("jump operator dimension differs from h_eff")
            rate = float(rate)
            if not rate > 0.0:
                raise ValueError("jump rates must be strictly positive")
            cleaned.append((op, rate))
        object.__setattr__(self, "h_eff", h)
        object.__setattr__(self, "jumps", tuple(cleaned))

    @property
    def dim(self) -> int:
        return self.h_eff.shape[0]

    def jump_stack(self) -> tuple[np.ndarray, np.ndarray]:
        """Jump operators as an (M, dim, dim) stack plus the (M,) rate vector."""
        if not self.jumps:
            return (np.zeros((0, self.dim, self.dim), dtype=complex), np.zeros(0))
        ops = np.stack([op for op, _ in self.jumps])
        rates = np.array([rate for _, rate in self.jumps])
        return ops, rates


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix: Hermitian, unit trace, positive."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _as_square_complex(self.matrix, "density matrix")
        if not is_hermitian(m, 1e-10):
            raise ValueError("density matrix is not Hermitian within 1e-10")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"density matrix trace {tr!r} deviates from 1 beyond 1e-8")
        lo = np.linalg.eigvalsh(0.5 * (m + dagger(m))).min()
        if lo < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def pure_state(psi: np.ndarray) -> DensityMatrix:
    """Projector onto a (normalized) state vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ValueError("zero state vector")
    psi = psi / nrm
    return DensityMatrix(np.outer(psi, psi.conj()))


def decoherence_operator(model: LindbladModel) -> np.ndarray:
    """``sum_l rate_l J_l† J_l`` — Hermitian, positive semidefinite."""
    out = np.zeros((model.dim, model.dim), dtype=complex)
    for op, rate in model.jumps:
        out += rate * (dagger(op) @ op)
    return out


def dissipator(model: LindbladModel, rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Non-unitary part of the master equation applied to ``rho``.

    Equals ``sum_l rate_l (J rho J† - {J†J, rho}/2)``; the output is
    traceless and Hermitian for Hermitian input.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (model.dim, model.dim):
        raise ValueError("density matrix dimension differs from model")
    jumps, rates = model.jump_stack()
    gamma = decoherence_operator(model)
    zero_h = np.zeros_like(mat)
    return _kernels.lindblad_rhs(zero_h, jumps, rates, gamma, mat)


def check_nilpotent(j: np.ndarray, tol: float = 1e-12) -> bool:
    """True iff all power traces vanish: ``|Tr(J^m)| <= tol * ||J||_F^m``.

    All power sums of the eigenvalues vanishing is equivalent to every
    eigenvalue being zero. The operator is normalized to unit Frobenius norm
    first so that high powers cannot overflow.
    """
    j = _as_square_complex(j, "jump operator")
    nrm = np.linalg.norm(j)
    if nrm == 0.0:
        return True
    unit = j / nrm
    power = np.eye(j.shape[0], dtype=complex)
    for _ in range(j.shape[0]):
        power = power @ unit
        if abs(np.trace(power)) > tol:
            return False
    return True


@dataclass(frozen=True)
class PureStateCheck:
    """Outcome of the pure-state decoherence-free criterion.

    A normalized state is instantaneously decoherence-free iff it is a
    simultaneous eigenvector of every jump operator; then the decoherence
    operator has it as an eigenvector with eigenvalue ``decay_weight``.
    """

    passed: bool
    jump_expectations: np.ndarray   # c_l = <psi| J_l |psi>
    decay_weight: float             # g = sum_l rate_l |c_l|^2
    jump_residuals: np.ndarray      # || J_l psi - c_l psi ||
    gamma_residual: float           # || Gamma psi - g psi ||
    dissipator_norm: float          # || L_D[|psi><psi|] ||_F


def check_pure_state(model: LindbladModel, psi: np.ndarray, tol: float = 1e-10) -> PureStateCheck:
    """Test whether a pure state is decoherence-free at this instant."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("state vector must be normalized")
    coeffs = []
    residuals = []
    for op, _rate in model.jumps:
        image = op @ psi
        c = np.vdot(psi, image)
        coeffs.append(c)
        residuals.append(np.linalg.norm(image - c * psi))
    coeffs = np.array(coeffs)
    residuals = np.array(residuals)
    g = float(sum(rate * abs(c) ** 2 for (_, rate), c in zip(model.jumps, coeffs)))
    gamma = decoherence_operator(model)
    gamma_residual = float(np.linalg.norm(gamma @ psi - g * psi))
    passed = bool(np.all(residuals <= tol) and gamma_residual <= tol)
    ld_norm = float(np.linalg.norm(dissipator(model, np.outer(psi, psi.conj()))))
    if passed and ld_norm > 10.0 * tol * max(1.0, np.linalg.norm(gamma)):
        raise NumericalError(
            "pure-state criterion passed but the dissipator does not vanish; "
            f"||L_D|| = {ld_norm:.3e}"
        )
    return PureStateCheck(
        passed=passed,
        jump_expectations=coeffs,
        decay_weight=g,
        jump_residuals=residuals,
        gamma_residual=gamma_residual,
        dissipator_norm=ld_norm,
    )


@dataclass(frozen=True)
class DFSReport:
    """Numerically found kernel of the decoherence operator.

    ``basis`` columns are orthonormal state vectors spanning the kernel at
    the requested threshold; residual arrays certify each vector. When the
    nilpotency hypothesis fails, detection falls back to the fully general
    pure-state criterion and ``jump_expectations``/``decay_weights`` carry the
    per-vector eigenvalue data (they vanish identically on the nilpotent
    path and are ``None`` there).
    """

    kernel_dim: int
    basis: np.ndarray                 # (dim, kernel_dim)
    gamma_residuals: np.ndarray       # || Gamma v ||
    jump_residuals: np.ndarray        # (M, kernel_dim): || J_l v ||
    dissipator_residuals: np.ndarray  # || L_D[v v†] ||_F
    nilpotent: bool
    jump_expectations: np.ndarray | None = None
    decay_weights: np.ndarray | None = None


def find_ipdfs(model: LindbladModel, tol_kernel: float = TOL_KERNEL) -> DFSReport:
    """Locate the instantaneous pure decoherence-free states of a model.

    With nilpotent jump operators these are exactly the zero-eigenvalue
    eigenvectors of the decoherence operator; kernel membership is decided
    spectrally at ``tol_kernel * ||Gamma||_F``. Non-nilpotent jumps void that
    shortcut, so the search then scans all eigenvectors with the general
    pure-state criterion instead of silently returning the kernel.
    """
    gamma = decoherence_operator(model)
    scale = float(np.linalg.norm(gamma))
    spectrum = hermitian_eig(gamma)
    nilpotent = all(check_nilpotent(op) for op, _ in model.jumps)

    if nilpotent:
        mask = spectrum.eigenvalues <= tol_kernel * scale
        basis = spectrum.eigenvectors[:, mask]
        expectations = None
        weights = None
    else:
        cols = []
        expectations_list = []
        weights_list = []
        threshold = max(tol_kernel * scale, tol_kernel)
        for i in range(spectrum.eigenvalues.size):
            vec = spectrum.eigenvectors[:, i]
            chk = check_pure_state(model, vec, tol=threshold)
            if chk.passed:
                cols.append(vec)
                expectations_list.append(chk.jump_expectations)
                weights_list.append(chk.decay_weight)
        basis = np.stack(cols, axis=1) if cols else np.zeros((model.dim, 0), dtype=complex)
        expectations = np.stack(expectations_list, axis=1) if cols else np.zeros((len(model.jumps), 0), dtype=complex)
        weights = np.array(weights_list)

    k = basis.shape[1]
    gamma_res = np.array([np.linalg.norm(gamma @ basis[:, i]) for i in range(k)])
    jump_res = np.array([[np.linalg.norm(op @ basis[:, i]) for i in range(k)] for op, _ in model.jumps])
    if jump_res.size == 0:
        jump_res = jump_res.reshape(len(model.jumps), k)
    diss_res = np.array(
        [np.linalg.norm(dissipator(model, np.outer(basis[:, i], basis[:, i].conj()))) for i in range(k)]
    )
    bound = 10.0 * tol_kernel * max(scale, 1.0)
    if np.any(diss_res > bound):
        raise NumericalError(
            "kernel vector fails dissipator cross-validation: "
            f"max ||L_D|| = {diss_res.max():.3e} > {bound:.3e}"
        )
    return DFSReport(
        kernel_dim=k,
        basis=basis,
        gamma_residuals=gamma_res,
        jump_residuals=jump_res,
        dissipator_residuals=diss_res,
        nilpotent=nilpotent,
        jump_expectations=expectations,
        decay_weights=weights,
    )


def check_shift_implication(
    model: LindbladModel,
    psi: np.ndarray,
    delta: np.ndarray,
    tol: float = 1e-10,
) -> bool:
    """Property check: a level shift cannot mask decoherence of a pure state.

    For ``rho = |psi><psi|``, whenever ``|| -i[delta, rho] + L_D[rho] || <= tol``
    the dissipator itself must already vanish (``|| L_D[rho] || <= 10 tol``).
    Returns whether that implication held for the given inputs. The
    mathematical guarantee presumes nilpotent jump operators, as produced by
    every lowering-type model in this package.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    delta = _as_square_complex(delta, "delta")
    require_hermitian(delta, 1e-10, "delta")
    rho = np.outer(psi, psi.conj())
    ld = dissipator(model, rho)
    combined = -1j * (delta @ rho - rho @ delta) + ld
    antecedent = np.linalg.norm(combined) <= tol
    consequent = np.linalg.norm(ld) <= 10.0 * tol
    return (not antecedent) or consequent


def hamiltonian_leakage(h_eff: np.ndarray, basis: np.ndarray) -> float:
    """Norm of the effective-Hamiltonian coupling out of a subspace.

    An instantaneous decoherence-free subspace is a true decoherence-free
    subspace only if the effective Hamiltonian does not drive states out of
    it; this returns ``|| (1 - P) H P ||_F`` for the projector ``P`` onto the
    span of the given orthonormal columns.
    """
    h = _as_square_complex(h_eff, "h_eff")
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim == 1:
        basis = basis[:, None]
    p = basis @ dagger(basis)
    return float(np.linalg.norm((np.eye(h.shape[0]) - p) @ h @ p))
