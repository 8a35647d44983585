"""Build script. Compiles the optional interpreter kernel extension.

The package works without the extension; minicgen.vm falls back to the
pure-Python kernel when the compiled one is unavailable.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "minicgen._kernel",
                ["src/minicgen/_kernel.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
