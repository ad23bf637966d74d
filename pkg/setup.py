"""Builds the optional compiled convolution kernel.

The package works without it (a numpy fallback is selected at import);
the extension build failing is therefore non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("walklab._dp_native", ["src/walklab/_dp_native.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
