"""Build hook: compiles the optional Cython kernel module.

The package is fully functional without the compiled extension; the
numpy fallback in ``submax._kernels._ref`` is selected at import time
when ``submax._kernels._core`` is missing.  Set ``SUBMAX_SKIP_BUILD=1``
to force a pure-Python install.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SUBMAX_SKIP_BUILD"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "submax._kernels._core",
                    ["src/submax/_kernels/_core.pyx"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
