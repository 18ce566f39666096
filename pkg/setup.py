"""Build script: compiles the optional Cython kernel backend.

The package is fully functional without the extension; ticktalk._kernels
falls back to the pure-Python implementation at import time. The extension
is marked optional so a missing compiler never breaks installation.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ticktalk._kernels._ckernels",
                ["src/ticktalk/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
