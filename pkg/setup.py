"""Build script. The compiled kernel extension is optional: if Cython or a
C compiler is unavailable the install proceeds and the package falls back to
the pure-numpy kernels at import time."""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Swallow compiler failures so the pure-Python install still works."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain
            print(f"spiralsheet: skipping compiled kernels ({exc!r})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"spiralsheet: skipping {ext.name} ({exc!r})")


ext_modules = []
if not os.environ.get("SPIRALSHEET_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/spiralsheet/_kernels/_c.pyx"],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        print("spiralsheet: Cython not found, installing pure-Python kernels")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
