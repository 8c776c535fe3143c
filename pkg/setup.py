"""Build the optional compiled kernel extension.

The package works without it (a pure-Python reference backend is selected at
import time), so a failed extension build only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "edge_epirisk._kernels._fast",
                ["src/edge_epirisk/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: FMA contraction would break bit-identity
                # with the pure-Python backend
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001 - any build-chain failure means "no extension"
    print(f"edge-epirisk: skipping compiled kernels ({exc})")

setup(ext_modules=ext_modules)
