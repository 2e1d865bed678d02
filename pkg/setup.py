import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the compiled kernel if possible; the package works without it."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: compiled simplex kernel not built ({exc}); "
            "rsgame will use the pure-Python backend"
        )


ext_modules = []
cmdclass = {}
if os.environ.get("RSGAME_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "rsgame._kernels._simplex_c",
                    ["src/rsgame/_kernels/_simplex_c.pyx"],
                )
            ],
            language_level=3,
        )
        cmdclass = {"build_ext": OptionalBuildExt}
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass=cmdclass)
