"""Builds the compiled kernel.

The kernel source ``src/qdd/_kernel.py`` is plain Python written in Cython's
pure-Python mode.  It is compiled here into the extension module
``qdd._ckernel``; the same file keeps working interpreted, so a failed
extension build degrades to the pure-Python kernel instead of breaking the
install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Treat extension build failures as a soft degrade, not an install error."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: building the qdd._ckernel extension failed ({exc}); "
            "falling back to the pure-Python kernel",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not available; installing pure-Python kernel only", file=sys.stderr)
        return []
    return cythonize(
        [Extension("qdd._ckernel", ["src/qdd/_kernel.py"])],
        compiler_directives={"language_level": "3", "embedsignature": True},
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
