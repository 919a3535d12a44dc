# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

""" Classes for the different exceptions that the hoidiag APIs can raise. """


class HoiDiagException(Exception):
    """
    A general exception for invalid input to the diagnostics toolkit
    """


class AnnotationParseError(HoiDiagException):
    """
    Exception raised when an annotation or prediction file is not valid JSON
    """

    def __init__(self, path, lineno, colno, msg):
        super(AnnotationParseError, self).__init__(
            "{}: line {} column {}: {}".format(path, lineno, colno, msg))
        self.path = path
        self.lineno = lineno
        self.colno = colno


class SchemaError(HoiDiagException):
    """
    Exception raised when a well-formed file violates the canonical schema
    """


class VocabularyError(SchemaError):
    """
    Exception raised when a vocabulary is inconsistent, or when two datasets
    do not share one vocabulary
    """


class UnknownImageError(SchemaError):
    """
    Exception raised when a prediction references an image which is absent
    from the ground truth
    """


class ExternalFormatError(HoiDiagException):
    """
    Exception raised when an external annotation export cannot be converted
    """


class ConsensusError(HoiDiagException):
    """
    Exception raised when annotator label files cannot be merged
    """


class SynthSpecError(HoiDiagException):
    """
    Exception raised when a synthetic scene request cannot be constructed
    """


class ConfigurationError(HoiDiagException):
    """
    Exception raised when the run configuration is invalid
    """


class InvariantViolationError(Exception):
    """
    Exception raised when an internal invariant or operation contract is
    violated. This indicates a defect rather than bad input.
    """

    def __init__(self, invariant, detail=""):
        message = "invariant violated: {}".format(invariant)
        if detail:
            message += " ({})".format(detail)
        super(InvariantViolationError, self).__init__(message)
        self.invariant = invariant
