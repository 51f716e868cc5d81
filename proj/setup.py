import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        import pybind11

        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)
        build_temp = Path(self.build_temp).resolve() / "cmake"
        build_temp.mkdir(parents=True, exist_ok=True)
        source = Path(__file__).resolve().parent
        subprocess.run(
            [
                "cmake",
                "-S", str(source),
                "-B", str(build_temp),
                "-DOCCMOB_PYTHON=ON",
                "-DCMAKE_BUILD_TYPE=Release",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_temp), "--target", "_occmob", "-j"],
            check=True,
        )


setup(
    packages=["occmob"],
    package_dir={"occmob": "python/occmob"},
    ext_modules=[CMakeExtension("occmob._occmob")],
    cmdclass={"build_ext": CMakeBuild},
)
