"""Build script: compiles the optional search kernel when Cython is available.

The package is fully functional without the extension (the pure-Python
backend is selected at import time); a failed extension build therefore
degrades to a working install instead of erroring out.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "braidfold._speedups",
                ["src/braidfold/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
