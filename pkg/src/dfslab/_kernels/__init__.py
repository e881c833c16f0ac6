"""Hot-kernel backend selection.

The compiled extension is preferred when present; the pure-numpy fallback is
used otherwise or when ``DFSLAB_PURE_PYTHON`` is set in the environment.
Both implementations share exact semantics, so the choice only affects speed.
"""

import os

from . import py_backend

if os.environ.get("DFSLAB_PURE_PYTHON"):
    _impl = py_backend
    BACKEND = "python"
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        _impl = py_backend
        BACKEND = "python"

K0 = py_backend.K0
EPS_DICKE = py_backend.EPS_DICKE
SERIES_CUTOFF = py_backend.SERIES_CUTOFF

lindblad_rhs = _impl.lindblad_rhs
evolve_rk4 = _impl.evolve_rk4
pair_coupling = _impl.pair_coupling
fill_reduced = _impl.fill_reduced
