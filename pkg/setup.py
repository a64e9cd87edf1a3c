from setuptools import setup

# The compiled tuple-counting kernel is optional: the package falls back to
# the pure-Python implementation in tropcover._tuplecount when the extension
# is unavailable (see tropcover.kernel).
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/tropcover/_tuplecount_c.pyx"],
        language_level=3,
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
