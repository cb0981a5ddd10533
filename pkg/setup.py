"""Builds the optional compiled simplex kernel.

The package works without it (a numpy fallback is selected at import time),
so a missing compiler or Cython only costs speed, not functionality.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "histolearn.lp._simplex",
                ["src/histolearn/lp/_simplex.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
