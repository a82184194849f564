# -*- coding: utf-8 -*-
#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

from os.path import join, dirname
from setuptools import setup, find_packages

VERSION = (0, 1, 0)
__version__ = VERSION
__versionstr__ = ".".join(map(str, VERSION))

f = open(join(dirname(__file__), "README"))
long_description = f.read().strip()
f.close()

install_requires = ["numpy>=1.20", "pandas>=1.1"]
tests_require = [
    "nose",
    "coverage",
    "mock",
    "nosexcover",
]

setup(
    name="sensorimotor",
    description="Differential-drive robot random-walk simulator and perceptual space analyses",
    license="Apache-2.0",
    long_description=long_description,
    long_description_content_type="text/x-rst",
    version=__versionstr__,
    packages=find_packages(where=".", exclude=("test_sensorimotor*",)),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: Apache Software License",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.7, <4",
    install_requires=install_requires,
    test_suite="test_sensorimotor.run_tests.run_all",
    tests_require=tests_require,
    extras_require={
        "develop": tests_require + ["sphinx", "sphinx_rtd_theme"],
        "simplejson": ["simplejson"],
    },
    entry_points={"console_scripts": ["sensorimotor = sensorimotor.cli:main"]},
)
