"""Build script: compiles the optional Cython speed kernels.

The package works without the extension (a pure-Python fallback is selected
at import time); the build therefore tolerates a missing compiler or Cython.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        ["src/topodrift/_kernels.pyx"],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
except Exception as exc:  # pragma: no cover - build-environment dependent
    import sys

    print(f"topodrift: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
