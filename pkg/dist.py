# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Builds the API documentation and the source and wheel packages of a hoidiag
release into ``dist/``, then zips them as ``dist/hoidiag-<version>.zip``.
"""

from __future__ import absolute_import
from __future__ import print_function
import os
import shutil
import subprocess
import sys

VERSION = __import__('hoidiag').get_product_version()
RELEASE_NAME = "hoidiag-" + str(VERSION)

ROOT_DIRECTORY = os.path.dirname(os.path.realpath(__file__))
DIST_DIRECTORY = os.path.join(ROOT_DIRECTORY, "dist")
DIST_DOCTMP_DIR = os.path.join(DIST_DIRECTORY, "doctmp")
DIST_DOC_DIR = os.path.join(DIST_DIRECTORY, "doc")
DIST_LIB_DIRECTORY = os.path.join(DIST_DIRECTORY, "lib")
DIST_RELEASE_DIR = os.path.join(DIST_DIRECTORY, RELEASE_NAME)


def _step(message):
    print("\n" + message + "\n")


def _remove_tree(path):
    if os.path.exists(path):
        shutil.rmtree(path)


def build_docs():
    _step("Calling sphinx-apidoc")
    subprocess.check_call(["sphinx-apidoc", "--force", "--separate",
                           "--no-toc", "--output-dir=" + DIST_DOCTMP_DIR,
                           os.path.join(ROOT_DIRECTORY, "hoidiag")])
    for file_name in os.listdir(DIST_DOCTMP_DIR):
        if file_name.startswith("hoidiag.test"):
            os.remove(os.path.join(DIST_DOCTMP_DIR, file_name))

    _step("Copying conf.py and the sdk pages")
    shutil.copy(os.path.join(ROOT_DIRECTORY, "docs", "conf.py"),
                DIST_DOCTMP_DIR)
    sdk_dir = os.path.join(ROOT_DIRECTORY, "docs", "sdk")
    for file_name in os.listdir(sdk_dir):
        shutil.copy(os.path.join(sdk_dir, file_name), DIST_DOCTMP_DIR)

    _step("Calling sphinx-build")
    subprocess.check_call(["sphinx-build", "-b", "html", DIST_DOCTMP_DIR,
                           DIST_DOC_DIR])
    _remove_tree(os.path.join(DIST_DOC_DIR, ".doctrees"))
    os.remove(os.path.join(DIST_DOC_DIR, ".buildinfo"))
    _remove_tree(DIST_DOCTMP_DIR)


def build_packages():
    for command in (["sdist", "--formats=zip"], ["bdist_wheel"]):
        _step("Running setup.py " + command[0])
        subprocess.check_call(
            [sys.executable, "setup.py"] + command +
            ["--dist-dir", DIST_LIB_DIRECTORY], cwd=ROOT_DIRECTORY)
    _remove_tree(os.path.join(ROOT_DIRECTORY, "build"))
    _remove_tree(os.path.join(ROOT_DIRECTORY, "hoidiag.egg-info"))


def main():
    _step("Making dist directory: " + DIST_DIRECTORY)
    _remove_tree(DIST_DIRECTORY)
    os.makedirs(DIST_DIRECTORY)

    build_docs()
    shutil.copy(os.path.join(ROOT_DIRECTORY, "README.md"), DIST_DIRECTORY)
    build_packages()

    _step("Making " + RELEASE_NAME + ".zip")
    shutil.copytree(DIST_DIRECTORY, DIST_RELEASE_DIR)
    shutil.make_archive(DIST_RELEASE_DIR, "zip", DIST_DIRECTORY, RELEASE_NAME)
    _remove_tree(DIST_RELEASE_DIR)
    print("\nFinished")


if __name__ == "__main__":
    main()
