"""Build the optional compiled kernels.

The extension is optional: when Cython or a C compiler is unavailable the
package installs without it and ``damped_rotor._pykernels`` is used instead.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("DAMPED_ROTOR_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "damped_rotor._kernels",
            sources=["src/damped_rotor/_kernels.pyx"],
            # no -ffast-math or FMA contraction: keeps results bitwise close to the
            # pure-Python twin and exact zeros of tied-moment terms intact
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
