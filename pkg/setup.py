import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled kernels bitwise-identical to the
# numpy fallback (no FMA contraction).
ext = Extension(
    "lpvv._kernels_cy",
    ["src/lpvv/_kernels_cy.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
