# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

""" Entry point for ``python -m hoidiag`` """

from __future__ import absolute_import

from hoidiag._cli import cli_run

if __name__ == "__main__":
    cli_run()
