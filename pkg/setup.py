"""Build hook for the optional compiled kernels.

The package works without the extension (pure-Python fallback); any
Cython or compiler failure downgrades to a pure install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("lsystool._kernels", ["src/lsystool/_kernels.pyx"],
                   include_dirs=[np.get_include()])],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    print(f"building without compiled kernels: {exc}")

setup(ext_modules=ext_modules)
