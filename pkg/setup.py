"""Build script: compiles the optional oscillatory-sum extension.

The package is pure Python except for one hot kernel (the oscillatory
tensor-grid reduction in ``equivar.oscsum``).  If Cython or a C compiler
is unavailable the build silently skips the extension and the package
falls back to an equivalent NumPy implementation at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/equivar/_oscsum.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
