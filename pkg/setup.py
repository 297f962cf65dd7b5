import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "faithsum.kernels._native",
                ["src/faithsum/kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    # Pure-Python kernels are selected at import time when the extension
    # is unavailable, so a Cython-less install still works.
    extensions = []

setup(ext_modules=extensions)
