"""Build script for the optional compiled integrator kernels.

The package works without the extension: magnonic._kernels falls back to a
numpy implementation when the compiled module is absent or fails to import.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "magnonic._kernels._ode_cy",
                ["src/magnonic/_kernels/_ode_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    extensions = []

setup(ext_modules=extensions)
