import os

from setuptools import setup

ext_modules = []
if os.environ.get("PROMPTSYNTH_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/promptsynth/sat/_cdcl.pyx"],
            language_level="3",
        )
    except Exception:
        # No Cython (or broken toolchain): install the pure-Python package;
        # the solver backend falls back at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
