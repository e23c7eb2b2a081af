"""Build script: compiles the optional iteration kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time), so any build failure here degrades to a warning.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class _OptionalBuildExt(build_ext):
    """Build the kernel extension if possible, warn and continue if not."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            sys.stderr.write(f"warning: kernel extension not built ({exc}); "
                             "falling back to the pure-Python backend\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(f"warning: {ext.name} failed to compile ({exc}); "
                             "falling back to the pure-Python backend\n")


def _extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        sys.stderr.write("warning: Cython not available; building without the "
                         "compiled kernel\n")
        return []
    ext = Extension(
        "nonexp_fp._kernel._core",
        sources=["src/nonexp_fp/_kernel/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": _OptionalBuildExt},
)
