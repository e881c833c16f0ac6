"""dfslab: collective decay and decoherence-free subspaces of two-level emitters.

A numerical laboratory for N two-level emitters at arbitrary 3D positions:
builds collective decoherence operators, detects (approximate)
decoherence-free subspaces through spectral criteria, integrates the master
equation, and reproduces lifetime-enhancement numbers and geometry scans.
"""

from ._kernels import BACKEND
from .atoms import (
    AtomConfiguration,
    EmbeddingReport,
    ReducedDecayMatrix,
    collective_model,
    excitation_number,
    full_gamma,
    gamma_coupling,
    line_config,
    reduced_embedding_report,
    reduced_matrix,
    ring_config,
    square_config,
)
from .errors import ConfigError, DFSLabError, NumericalError, StabilityError
from .evolution import EvolutionResult, evolve, fit_decay_rate
from .independence import (
    GramReport,
    dicke_convergence,
    fibonacci_sphere,
    gram_rank_check,
    min_nontrivial_eigenvalue,
)
from .lindblad import (
    DensityMatrix,
    DFSReport,
    LindbladModel,
    PureStateCheck,
    check_nilpotent,
    check_pure_state,
    check_shift_implication,
    decoherence_operator,
    dissipator,
    find_ipdfs,
    hamiltonian_leakage,
    pure_state,
)
from .operators import (
    N_MAX,
    HermitianSpectrum,
    LOWERING,
    dagger,
    embed_lowering,
    hermitian_eig,
    is_hermitian,
    kron,
)

__version__ = "0.1.0"

__all__ = [
    "AtomConfiguration",
    "BACKEND",
    "ConfigError",
    "DFSLabError",
    "DFSReport",
    "DensityMatrix",
    "EmbeddingReport",
    "EvolutionResult",
    "GramReport",
    "HermitianSpectrum",
    "LOWERING",
    "LindbladModel",
    "N_MAX",
    "NumericalError",
    "PureStateCheck",
    "ReducedDecayMatrix",
    "StabilityError",
    "check_nilpotent",
    "check_pure_state",
    "check_shift_implication",
    "collective_model",
    "dagger",
    "decoherence_operator",
    "dicke_convergence",
    "dissipator",
    "embed_lowering",
    "evolve",
    "excitation_number",
    "fibonacci_sphere",
    "find_ipdfs",
    "fit_decay_rate",
    "full_gamma",
    "gamma_coupling",
    "gram_rank_check",
    "hamiltonian_leakage",
    "hermitian_eig",
    "is_hermitian",
    "kron",
    "line_config",
    "min_nontrivial_eigenvalue",
    "pure_state",
    "reduced_embedding_report",
    "reduced_matrix",
    "ring_config",
    "square_config",
]
