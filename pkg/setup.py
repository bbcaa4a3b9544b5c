import os

from setuptools import setup

ext_modules = []
if os.environ.get("SAYREA_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("sayrea.kernels._ckernels", ["src/sayrea/kernels/_ckernels.pyx"])],
            language_level=3,
        )
    except ImportError:
        # Cython unavailable: install pure-Python only, kernels fall back at import.
        ext_modules = []

setup(ext_modules=ext_modules)
