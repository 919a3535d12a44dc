# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

""" Product properties, used for packaging. """

__version__ = "1.0.0"

__product_name__ = "HOI Detection Diagnostics"

__product_props__ = {
    "General":
        {
            "Version": __version__,
            "ProductName": __product_name__
        }
}


def get_product_version():
    """
    Returns the hoidiag version.

    :returns: {@code string}: version.
    """
    return __version__


def get_product_name():
    """
    Returns the hoidiag product name.

    :returns: {@code string}: product name.
    """
    return __product_name__


def get_product_props():
    """
    Returns the hoidiag properties.

    :returns: {@code dict}: Properties of the toolkit.
    """
    return __product_props__
