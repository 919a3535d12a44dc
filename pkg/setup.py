""" Setup script for the hoidiag package """

# pylint: disable=no-member, no-name-in-module, import-error, wrong-import-order
# pylint: disable=missing-docstring, no-self-use

from __future__ import absolute_import
import glob
import os
from setuptools import Command, setup
import distutils.log
import subprocess


PRODUCT_PROPS = {}
CWD = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(CWD, "hoidiag", "_product_props.py")) as f:
    exec(f.read(), PRODUCT_PROPS) # pylint: disable=exec-used

class LintCommand(Command):
    """
    Custom setuptools command for running lint
    """
    description = 'run lint against project source files'
    user_options = []
    def initialize_options(self):
        pass
    def finalize_options(self):
        pass
    def run(self):
        self.announce("Running pylint for library source files and tests",
                      level=distutils.log.INFO)
        subprocess.check_call(["pylint", "hoidiag"] + glob.glob("*.py"))

class CiCommand(Command):
    """
    Custom setuptools command for running steps that are performed during
    Continuous Integration testing.
    """
    description = 'run CI steps (lint, test, etc.)'
    user_options = []
    def initialize_options(self):
        pass
    def finalize_options(self):
        pass
    def run(self):
        self.run_command("lint")
        self.run_command("test")

TEST_REQUIREMENTS = [
    "hypothesis",
    "mock",
    'nose; python_version < "3.10"',
    'pynose; python_version >= "3.10"',
    "parameterized",
    "pylint"
]

DEV_REQUIREMENTS = TEST_REQUIREMENTS + ["sphinx"]

setup(
    # Application name:
    name="hoidiag",

    # Version number:
    version=PRODUCT_PROPS["__version__"],

    # Application author details:
    author="hoidiag contributors",

    # License
    license="Apache License 2.0",

    keywords=['hoi', 'human-object interaction', 'detection', 'evaluation',
              'diagnostics'],

    # Packages
    packages=[
        "hoidiag",
        "hoidiag._cli",
        "hoidiag.test"
    ],

    # Include additional files into the package
    include_package_data=True,

    install_requires=[
        "configobj",
        "numpy",
        "pandas>=1.5",
        "scipy"
    ],

    tests_require=TEST_REQUIREMENTS,

    extras_require={
        "dev": DEV_REQUIREMENTS,
        "test": TEST_REQUIREMENTS
    },

    test_suite="nose.collector",

    description="Diagnostics for human-object interaction detectors",

    long_description=open(os.path.join(CWD, 'README.md')).read(),

    long_description_content_type="text/markdown",

    python_requires='>=3.8',

    classifiers=[
        "Topic :: Scientific/Engineering :: Image Recognition",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],

    cmdclass={
        'ci': CiCommand,
        'lint': LintCommand
    },

    entry_points={
        'console_scripts': [
            'hoidiag = hoidiag._cli:cli_run'
        ],
    }
)
