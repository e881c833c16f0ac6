"""Build script: compiles the optional native kernels.

The package works without the extension (a pure-numpy fallback is selected
at import time), so the extension is marked optional and a failed compile
only degrades performance.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # pure-python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "dfslab._kernels._native",
                ["src/dfslab/_kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off pins IEEE mul+add rounding so the compiled
                # kernels agree bitwise with the numpy fallback
                extra_compile_args=["-O3", "-march=native", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
