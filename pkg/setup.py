"""Build script: compiles the optional pq-gram kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so the build must not fail on machines without a compiler
or Cython.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("catnip._kernel", ["src/catnip/_kernel.pyx"])],
        language_level="3",
    )
    for ext in extensions:
        ext.optional = True
except ImportError:
    pass

setup(ext_modules=extensions)
