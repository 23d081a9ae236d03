"""Build script: compiles the optional C push-kernel extension.

The package is fully functional without the extension (a pure-Python
backend is selected at import time), so any failure here degrades to a
source-only install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "pushrank._kernels",
                ["src/pushrank/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"pushrank: skipping compiled kernels ({exc}); pure-Python backend will be used")

setup(ext_modules=ext_modules)
