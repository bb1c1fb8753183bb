"""Build script for the optional compiled Monte Carlo kernels.

The package is fully functional without the extension: radsurf._kernels
falls back to a vectorized numpy implementation when the compiled module
is absent.  Any failure while building the extension is therefore
tolerated rather than fatal.
"""

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cythonize failure, ...
            print(f"warning: compiled kernels not built ({exc}); "
                  "falling back to the numpy implementation")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to the numpy implementation")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "radsurf._kernels._core",
        ["src/radsurf/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
