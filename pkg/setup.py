"""Build script for the optional compiled evaluation kernel.

The package is fully functional without the extension: smatvplan.engine
falls back to a NumPy implementation of the scenario-evaluation kernel
when the compiled module is absent. Building the extension requires
Cython, NumPy and a C compiler; if any of them is missing the build
degrades to the pure-Python install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "smatvplan._kernel",
                ["src/smatvplan/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
