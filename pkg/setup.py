"""Build hook for the optional compiled kernels.

The package is pure Python plus one optional Cython extension
(``bsharp._kernels._speedups``).  If Cython or a C compiler is missing the
extension is skipped and the pure-Python fallback is used at runtime.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bsharp._kernels._speedups",
                ["src/bsharp/_kernels/_speedups.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
