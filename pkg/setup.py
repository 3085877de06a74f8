"""Build the optional compiled kernel.

Set FLATSYS_NO_EXT=1 to skip it; the package then runs on the pure-Python
kernel.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FLATSYS_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "flatsys._kernels",
                    ["src/flatsys/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
