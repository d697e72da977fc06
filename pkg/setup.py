import os

import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

# numpy ships the C distribution functions (random_standard_normal etc.) in a
# static library next to the random module; it is not linked by default.
rand_lib = os.path.join(os.path.dirname(np.random.__file__), "lib")

ext = Extension(
    "expolevy._kernels",
    ["src/expolevy/_kernels.pyx"],
    include_dirs=[np.get_include()],
    library_dirs=[rand_lib],
    libraries=["npyrandom"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
