# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

""" hoidiag APIs """

from __future__ import absolute_import
import logging

# pylint: disable=wildcard-import
from hoidiag._product_props import *

__version__ = get_product_version()


class _NullHandler(logging.Handler):
    def emit(self, record):
        pass


logging.getLogger(__name__).addHandler(_NullHandler())

# pylint: disable=wrong-import-position
from hoidiag.exceptions import *
from hoidiag.annotation import BoundingBox, iou, Vocabulary, HoiAnnotation, \
    GroundTruthImage, Dataset, Prediction, PredictionSet, load_vocabulary, \
    load_dataset, parse_ground_truth, parse_predictions, \
    serialize_ground_truth, serialize_predictions
from hoidiag.converters import convert_external
from hoidiag.instance_resolver import PersonInstance, ObjectInstance, \
    SceneGraph, Relation, resolve_instances, interaction_relation
from hoidiag.categorizer import SceneCategory, CategoryAssignment, \
    CategorizationSettings, filter_image, categorize, categorize_image, \
    categorize_dataset, consensus, reconcile, category_statistics
from hoidiag.evaluator import EvalSettings, MatchOutcome, EvalReport, \
    match_class, average_precision, evaluate
from hoidiag.error_decomposer import ErrorFlags, ErrorSweep, decompose_fp, \
    sweep, parse_threshold_grid
from hoidiag.bias import FrequencyTable, build_frequencies, top_k_table, \
    object_bias_table, spearman
from hoidiag.synth import SynthSpec, InjectionLog, Xorshift64Star, \
    synthetic_vocabulary, generate
from hoidiag.run_config import RunConfig
