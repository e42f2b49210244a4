"""Build script.

The compiled kernel extension is optional: if Cython (or a C compiler) is
unavailable, the install proceeds with the pure-Python kernels and everything
still works, only slower.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/artifact/_kernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - environment dependent
    print(f"note: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
