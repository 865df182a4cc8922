"""Build script: compiles the score-kernel extension when a toolchain is
available; the package falls back to the numpy kernels otherwise."""

from setuptools import setup

try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        ["src/youden_napg/_scorekernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
except ImportError:
    ext_modules = []
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
