"""Builds the _drlssv extension straight from the C++ sources."""

import os
from glob import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include():
    for candidate in (
        os.environ.get("EIGEN3_INCLUDE_DIR", ""),
        "/usr/include/eigen3",
        "/usr/local/include/eigen3",
    ):
        if candidate and os.path.isdir(candidate):
            return candidate
    raise RuntimeError("Eigen3 headers not found; set EIGEN3_INCLUDE_DIR")


here = os.path.abspath(os.path.dirname(__file__))

ext = Pybind11Extension(
    "drlssv._drlssv",
    sources=sorted(glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", eigen_include()],
    cxx_std=20,
    define_macros=[
        ("DRLSSV_DATA_DIR", '"' + os.path.join(here, "data") + '"'),
    ],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
