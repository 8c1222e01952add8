import os

from setuptools import Extension, setup

# The compiled window-accumulation kernel is optional: when Cython is missing
# (or FLOWSENTRY_PURE_PYTHON is set at build time) the package installs
# without it and flowsentry._kernels falls back to the pure-Python backend.
ext_modules = []
if not os.environ.get("FLOWSENTRY_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "flowsentry._kernels._windowcore",
                    ["src/flowsentry/_kernels/_windowcore.pyx"],
                    language="c++",
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
