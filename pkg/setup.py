"""Build the optional compiled Bessel kernel.

If Cython or a C compiler is unavailable the package still installs and
falls back to the pure-Python kernel at import time.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("skinlayer._bessel_cy", ["src/skinlayer/_bessel_cy.pyx"],
                   include_dirs=[np.get_include()])],
        compiler_directives={"language_level": 3},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"skinlayer: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)
