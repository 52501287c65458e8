"""Build script for the optional compiled scan kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so the extension is marked optional: a missing
compiler or Cython only costs speed, never the install.
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
                "icpmac.kernels._scan",
                ["src/icpmac/kernels/_scan.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
