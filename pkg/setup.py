"""Build the optional compiled kernels.

The package works without them: ``cohort_bias_lab._backend`` falls back to
the pure-Python kernels when the extension cannot be imported.
"""
import os
import warnings

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("COHORT_BIAS_LAB_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython or numpy not found; building without compiled kernels.")
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "cohort_bias_lab._ckernels",
                    ["src/cohort_bias_lab/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
