from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: install the pure-Python kernels only
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "duelreduce._kernel",
                ["src/duelreduce/_kernel.pyx"],
                # no FMA contraction: results must match the Python kernel bit for bit
                extra_compile_args=["-O2", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
