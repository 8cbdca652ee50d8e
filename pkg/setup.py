"""Build hook: compile the optional kernel extension when Cython is available.

The package is fully functional without the extension; `frmsol.kernels`
falls back to the NumPy implementation at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/frmsol/_kernels_cy.pyx",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )
    for ext in ext_modules:
        # -fno-math-errno lets libm calls inline; results are unchanged.
        ext.extra_compile_args = ["-O3", "-fno-math-errno"]
except ImportError:
    pass

setup(ext_modules=ext_modules)
