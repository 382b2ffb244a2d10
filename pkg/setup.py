"""Optional compiled kernels; the package falls back to numpy without them."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("FAMEDKIT_NO_EXT", "") not in ("1", "true", "yes"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("famedkit._kernels", ["src/famedkit/_kernels.pyx"],
                       include_dirs=[numpy.get_include()], extra_compile_args=["-O3", "-fopenmp"], extra_link_args=["-fopenmp"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
