import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("STREAMSVDD_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:  # fall back to the numpy core
        pass
    else:
        ext_modules = cythonize(
            [Extension("streamsvdd._ccore", ["src/streamsvdd/_ccore.pyx"],
                       include_dirs=[np.get_include()],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
