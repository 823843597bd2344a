import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

CFLAGS = ["-O3", "-funroll-loops"]
if not os.environ.get("SENSAKIT_PORTABLE"):
    # host-tuned build; set SENSAKIT_PORTABLE=1 for a baseline-ISA binary
    CFLAGS += ["-march=native", "-mtune=native"]

kernels = Extension(
    "sensakit._kernels._ext",
    ["src/sensakit/_kernels/_ext.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=CFLAGS,
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(
    ext_modules=cythonize(
        [kernels],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
)
