"""Build script: compiles the Cython shuffle core when possible.

The package works without the extension (a numpy fallback is selected at
import time), so any build failure here downgrades to a pure-Python install
rather than aborting.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        "src/arctic_kernel/_shuffle_core.pyx",
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [np.get_include()]
except Exception:
    include_dirs = []

setup(
    ext_modules=ext_modules,
    include_dirs=include_dirs,
)
