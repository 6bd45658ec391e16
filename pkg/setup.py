"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time); set FRAC_RABI_NO_EXT=1 to skip
the compilation step entirely.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("FRAC_RABI_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "fracrabi._kernels",
                    ["src/fracrabi/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
                "nonecheck": False,
                "embedsignature": True,
            },
        )
    except Exception as exc:  # pragma: no cover - build-environment dependent
        print(f"warning: skipping Cython extension ({exc}); pure-Python backend will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
