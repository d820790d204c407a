"""Build the optional Cython kernels; the package still installs without them."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("GEODEX_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        openmp = os.environ.get("GEODEX_OPENMP", "1") == "1"
        ext = Extension(
            "geodex.kernels._ckernels",
            ["src/geodex/kernels/_ckernels.pyx"],
            include_dirs=[numpy.get_include()],
            extra_compile_args=["-O3"] + (["-fopenmp"] if openmp else []),
            extra_link_args=["-fopenmp"] if openmp else [],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize([ext], language_level=3, quiet=True)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
