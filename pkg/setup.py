import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("COALTWO_NO_EXT") != "1":
    ext_modules = cythonize(
        [Extension("coaltwo.mc._kernel", ["src/coaltwo/mc/_kernel.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
