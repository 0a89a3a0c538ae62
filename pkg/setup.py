"""Build script. The compiled kernel extension is optional: when Cython or
numpy are unavailable the package installs pure-Python only and selects the
fallback kernels at import."""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension(
            "redusim._ckern",
            ["src/redusim/_ckern.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
