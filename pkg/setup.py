"""Build script: compiles the optional kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time), so any build failure here should not block installation.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fasris._kernels",
                ["src/fasris/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    print("Cython not available; building without the compiled kernel extension")

setup(ext_modules=ext_modules)
