"""Build script: compiles the optional word-kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so any failure here downgrades to a pure build instead of
aborting the install.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("IDEALCSTAR_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext = Extension(
            "idealcstar._speed._freewords",
            sources=["src/idealcstar/_speed/_freewords.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
        ext_modules = cythonize([ext], language_level=3)
    except Exception as exc:  # noqa: BLE001 - any build-chain problem means "pure build"
        print(f"idealcstar: skipping compiled kernels ({exc!r}); "
              "the NumPy fallback will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
