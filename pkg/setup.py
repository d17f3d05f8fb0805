import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "tnormal._kernels",
        ["src/tnormal/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    package_dir={"": "src"},
    ext_modules=cythonize(extensions, compiler_directives={"language_level": 3}),
)
