from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python fallback kernels keep the package fully functional.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "glyphforge._ckernels",
                ["src/glyphforge/_ckernels.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
