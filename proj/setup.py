# Copyright 2026 the corrfilt authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""CMake bridge: builds the pybind11 extension from the C++ tree.

Project metadata lives in pyproject.toml; this file only teaches
setuptools how to produce corrfilt._core via CMake. Use
``pip install -e . --no-build-isolation`` for development installs.
"""

import shutil
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
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DCORRFILT_BUILD_TESTS=OFF",
                "-DCORRFILT_BUILD_PYTHON=ON",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "corrfilt_py",
             "--parallel"],
            check=True,
        )

        staged = sorted((build_dir / "python" / "corrfilt").glob("_core.*"))
        modules = [p for p in staged if p.suffix in {".so", ".pyd", ".dylib"}]
        if not modules:
            raise RuntimeError(f"extension module not produced in {build_dir}")
        target = Path(self.get_ext_fullpath(ext.name)).resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(modules[0], target)


setup(
    ext_modules=[CMakeExtension("corrfilt._core")],
    cmdclass={"build_ext": CMakeBuild},
)
