"""Build script: compiles the optional Cython speedup module.

The package works without the extension (a pure-Python twin is selected at
import time), so a failed compile only costs speed, not functionality.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: skipping compiled speedups ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: skipping {ext.name} ({exc})")


try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        ["src/concentra/greens/_speedups.pyx"],
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3"]
except ImportError:  # pragma: no cover
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
