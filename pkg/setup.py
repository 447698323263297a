"""Builds the optional compiled kernel extension.

The package is fully functional without it: mhdbq.kernels falls back to
vectorized numpy at import time if mhdbq._speedups is missing.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("mhdbq._speedups", ["src/mhdbq/_speedups.pyx"])],
        language_level=3,
    )
except ImportError:
    print("Cython not available; building without compiled kernels", file=sys.stderr)

setup(ext_modules=ext_modules)
