"""Build script for the optional compiled stepper core.

The package is fully functional without the extension: ``swdelay.simulate``
falls back to the pure-Python twin ``swdelay._stepper_py`` when the compiled
module is absent. The extension is therefore built best-effort.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the accelerator if possible, otherwise install without it."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled stepper not built ({exc}); "
                  "using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "using pure-Python fallback")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("swdelay._stepper", ["src/swdelay/_stepper.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
