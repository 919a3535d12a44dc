# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
###############################################################################

""" File and serialization helpers shared by the report writers. """

from __future__ import absolute_import
import errno
import hashlib
import json
import os
import tempfile

import pandas as pd


class HoiUtils(object):
    """
    Utility methods for use by the hoidiag readers and report writers
    """

    @staticmethod
    def makedirs(dir_path, mode=0o755):
        """
        Create a directory (or directory tree) per the `dir_path` argument.
        If the directory already exists when this is called, no exception is
        raised.

        :param str dir_path: directory path to create
        :param int mode: permissions mode to use for each directory which is
            created
        """
        if dir_path:
            try:
                os.makedirs(dir_path, mode)
            except OSError as ex:
                if ex.errno != errno.EEXIST:
                    raise

    @staticmethod
    def save_to_file(filename, data, mode=0o644):
        """
        Atomically save a data string to a file. The data is written to a
        temporary file in the target directory which then replaces
        `filename`, so readers never observe a partially written report. Any
        missing directories in the file path are created.

        :param str filename: name of the file to save
        :param data: data to be saved
        :type data: str or bytes
        :param int mode: permissions mode to use for the file
        """
        dir_path = os.path.dirname(os.path.abspath(filename))
        HoiUtils.makedirs(dir_path)
        handle, temp_path = tempfile.mkstemp(
            prefix="." + os.path.basename(filename) + ".", dir=dir_path)
        try:
            if isinstance(data, bytes):
                with os.fdopen(handle, "wb") as temp_file:
                    temp_file.write(data)
            else:
                with os.fdopen(handle, "w", encoding="utf-8",
                               newline="") as temp_file:
                    temp_file.write(data)
            os.chmod(temp_path, mode)
            os.replace(temp_path, filename)
        except Exception:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise

    @staticmethod
    def to_json(obj):
        """
        Serialize an object to the JSON text used by every hoidiag report.
        The text is deterministic for a given object: key order follows
        insertion order and floats use their shortest repr.

        :param obj: JSON-compatible object
        :return: the JSON text, terminated by a newline
        :rtype: str
        """
        return json.dumps(obj, indent=2, allow_nan=False) + "\n"

    @staticmethod
    def save_json(filename, obj):
        """
        Atomically write `obj` as JSON to `filename`.

        :param str filename: name of the file to save
        :param obj: JSON-compatible object
        """
        HoiUtils.save_to_file(filename, HoiUtils.to_json(obj))

    @staticmethod
    def save_csv(filename, rows, columns=None):
        """
        Atomically write tabular rows as CSV with a header line.

        :param str filename: name of the file to save
        :param rows: list of dictionaries or tuples
        :param columns: column names; required for tuple rows and used to
            write the header of an empty table
        """
        frame = pd.DataFrame(list(rows), columns=columns)
        HoiUtils.save_to_file(filename,
                              frame.to_csv(index=False, lineterminator="\n"))

    @staticmethod
    def file_digest(filename):
        """
        Compute the SHA-256 digest of a file, as recorded in report
        manifests.

        :param str filename: name of the file to digest
        :return: hex digest
        :rtype: str
        """
        digest = hashlib.sha256()
        with open(filename, "rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b""):
                digest.update(chunk)
        return digest.hexdigest()
