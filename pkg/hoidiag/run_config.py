# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Contains the :class:`RunConfig` class, which holds the settings shared by the
``hoidiag`` subcommands.
"""

from __future__ import absolute_import
from collections import OrderedDict
import logging
import os
from os import path

from configobj import ConfigObj, ConfigObjError

from hoidiag._hoi_utils import HoiUtils
from hoidiag.bias import DEFAULT_MIN_TEST_INSTANCES, DEFAULT_TOP_K
from hoidiag.categorizer import CategorizationSettings
from hoidiag.error_decomposer import DEFAULT_THRESHOLD_GRID, \
    parse_threshold_grid
from hoidiag.evaluator import DEFAULT_IOU_THRESHOLD, EvalSettings
from hoidiag.exceptions import ConfigurationError
from hoidiag.instance_resolver import DEFAULT_MERGE_IOU, RelationBasis

logger = logging.getLogger(__name__)

#: Environment variable overriding the output directory of a config file
OUTPUT_DIR_ENV_VAR = "HOIDIAG_OUTPUT_DIR"


class RunConfig(object):
    """
    The settings of one ``hoidiag`` run: instance resolution, categorization,
    matching, error sweeps, bias tables and output.

    A configuration file uses the following format. Every setting is
    optional; missing settings take the defaults shown.

    .. code-block:: ini

        [Instances]
        MergeIou=0.7
        RelationBasis=person

        [Categorization]
        IncludeInvisible=false
        IncludeNoInteraction=false

        [Evaluation]
        IouThreshold=0.5
        StrictVisible=false

        [Errors]
        Thresholds=0.0:0.9:0.1

        [Bias]
        TopK=10
        MinTestInstances=5
        IncludeNoInteraction=false

        [Output]
        OutputDir=.
        Threads=1
        Manifest=false
    """

    # Config file keys
    _INSTANCES_SECTION = u"Instances"
    _MERGE_IOU_SETTING = u"MergeIou"
    _RELATION_BASIS_SETTING = u"RelationBasis"

    _CATEGORIZATION_SECTION = u"Categorization"
    _INCLUDE_INVISIBLE_SETTING = u"IncludeInvisible"
    _INCLUDE_NO_INTERACTION_SETTING = u"IncludeNoInteraction"

    _EVALUATION_SECTION = u"Evaluation"
    _IOU_THRESHOLD_SETTING = u"IouThreshold"
    _STRICT_VISIBLE_SETTING = u"StrictVisible"

    _ERRORS_SECTION = u"Errors"
    _THRESHOLDS_SETTING = u"Thresholds"

    _BIAS_SECTION = u"Bias"
    _TOP_K_SETTING = u"TopK"
    _MIN_TEST_INSTANCES_SETTING = u"MinTestInstances"

    _OUTPUT_SECTION = u"Output"
    _OUTPUT_DIR_SETTING = u"OutputDir"
    _THREADS_SETTING = u"Threads"
    _MANIFEST_SETTING = u"Manifest"

    _REQUIRED = True
    _NOT_REQUIRED = False

    # (section, ((setting, description, default, converter), ...), required)
    _SETTINGS = (
        (_INSTANCES_SECTION,
         ((_MERGE_IOU_SETTING, "merge IoU", DEFAULT_MERGE_IOU, "float"),
          (_RELATION_BASIS_SETTING, "relation basis", RelationBasis.PERSON,
           "str")),
         _NOT_REQUIRED),
        (_CATEGORIZATION_SECTION,
         ((_INCLUDE_INVISIBLE_SETTING, "include invisible", False, "bool"),
          (_INCLUDE_NO_INTERACTION_SETTING, "include no_interaction", False,
           "bool")),
         _NOT_REQUIRED),
        (_EVALUATION_SECTION,
         ((_IOU_THRESHOLD_SETTING, "IoU threshold", DEFAULT_IOU_THRESHOLD,
           "float"),
          (_STRICT_VISIBLE_SETTING, "strict visible", False, "bool")),
         _NOT_REQUIRED),
        (_ERRORS_SECTION,
         ((_THRESHOLDS_SETTING, "threshold grid", DEFAULT_THRESHOLD_GRID,
           "str"),),
         _NOT_REQUIRED),
        (_BIAS_SECTION,
         ((_TOP_K_SETTING, "top-k", DEFAULT_TOP_K, "int"),
          (_MIN_TEST_INSTANCES_SETTING, "minimum test instances",
           DEFAULT_MIN_TEST_INSTANCES, "int"),
          (_INCLUDE_NO_INTERACTION_SETTING, "include no_interaction", False,
           "bool")),
         _NOT_REQUIRED),
        (_OUTPUT_SECTION,
         ((_OUTPUT_DIR_SETTING, "output directory", u".", "str"),
          (_THREADS_SETTING, "threads", 1, "int"),
          (_MANIFEST_SETTING, "manifest", False, "bool")),
         _NOT_REQUIRED))

    def __init__(self, **settings):
        """
        Constructor parameters are the property names below, for example
        ``RunConfig(merge_iou=0.8, threads=4)``. Unset properties keep their
        defaults.

        :raise ConfigurationError: if a value is invalid
        """
        self._config = ConfigObj()
        self._config_path = None
        self._create_required_sections()
        for name, value in settings.items():
            if not hasattr(RunConfig, name) or \
                    not isinstance(getattr(RunConfig, name), property):
                raise ConfigurationError("Unknown setting: {}".format(name))
            setattr(self, name, value)
        self.validate()

    def _create_required_sections(self):
        """
        Create all of the sections in the configuration model, in table
        order.
        """
        for section_name, _, _ in self._SETTINGS:
            if section_name not in self._config:
                self._config[section_name] = {}
                if len(self._config) > 1:
                    self._config.comments[section_name].insert(0, '')

    @classmethod
    def _find_setting(cls, section_name, setting_name):
        for section, settings, _ in cls._SETTINGS:
            if section != section_name:
                continue
            for setting in settings:
                if setting[0] == setting_name:
                    return setting
        raise ValueError("Unrecognized setting: {}/{}".format(section_name,
                                                              setting_name))

    def _get_value_from_config(self, section_name, setting_name):
        """
        Get a typed value from the underlying configuration model.

        :param section_name: the section holding the setting
        :param setting_name: the setting, as named in :const:`_SETTINGS`
        :return: the converted value, or the default if the setting is unset
        :raise ConfigurationError: if the stored value cannot be converted
        """
        _, description, default, converter = self._find_setting(
            section_name, setting_name)
        section = self._config.get(section_name)
        if section is None or setting_name not in section or \
                section[setting_name] in (None, ""):
            return default
        try:
            if converter == "bool":
                return section.as_bool(setting_name)
            if converter == "int":
                return section.as_int(setting_name)
            if converter == "float":
                return section.as_float(setting_name)
            value = section[setting_name]
            # unquoted comma-separated values come back as lists
            if isinstance(value, list):
                return ",".join(value)
            return str(value)
        except (TypeError, ValueError) as ex:
            raise ConfigurationError("Invalid {} '{}': {}".format(
                description, section[setting_name], ex))

    def _set_value_to_config(self, section_name, setting_name, value):
        """
        Set the supplied value into the configuration model.

        :raise ValueError: if the setting is not defined in
            :const:`_SETTINGS`
        """
        self._find_setting(section_name, setting_name)
        if section_name not in self._config:
            self._config[section_name] = {}
        if isinstance(value, bool):
            value = "true" if value else "false"
        self._config[section_name][setting_name] = \
            None if value is None else str(value)

    @property
    def merge_iou(self):
        """
        IoU above which same-class boxes of an image merge into one instance
        (default 0.7)
        """
        return self._get_value_from_config(self._INSTANCES_SECTION,
                                           self._MERGE_IOU_SETTING)

    @merge_iou.setter
    def merge_iou(self, merge_iou):
        self._set_value_to_config(self._INSTANCES_SECTION,
                                  self._MERGE_IOU_SETTING, merge_iou)

    @property
    def relation_basis(self):
        """
        Basis used to compare the interactions of two persons, ``person`` or
        ``object``
        """
        return self._get_value_from_config(self._INSTANCES_SECTION,
                                           self._RELATION_BASIS_SETTING)

    @relation_basis.setter
    def relation_basis(self, relation_basis):
        self._set_value_to_config(self._INSTANCES_SECTION,
                                  self._RELATION_BASIS_SETTING, relation_basis)

    @property
    def include_invisible(self):
        """
        Whether invisible annotations take part in categorization
        """
        return self._get_value_from_config(self._CATEGORIZATION_SECTION,
                                           self._INCLUDE_INVISIBLE_SETTING)

    @include_invisible.setter
    def include_invisible(self, include_invisible):
        self._set_value_to_config(self._CATEGORIZATION_SECTION,
                                  self._INCLUDE_INVISIBLE_SETTING,
                                  include_invisible)

    @property
    def include_no_interaction(self):
        """
        Whether ``no_interaction`` annotations take part in categorization
        """
        return self._get_value_from_config(
            self._CATEGORIZATION_SECTION, self._INCLUDE_NO_INTERACTION_SETTING)

    @include_no_interaction.setter
    def include_no_interaction(self, include_no_interaction):
        self._set_value_to_config(self._CATEGORIZATION_SECTION,
                                  self._INCLUDE_NO_INTERACTION_SETTING,
                                  include_no_interaction)

    @property
    def iou_threshold(self):
        """
        Pair-matching IoU threshold (default 0.5)
        """
        return self._get_value_from_config(self._EVALUATION_SECTION,
                                           self._IOU_THRESHOLD_SETTING)

    @iou_threshold.setter
    def iou_threshold(self, iou_threshold):
        self._set_value_to_config(self._EVALUATION_SECTION,
                                  self._IOU_THRESHOLD_SETTING, iou_threshold)

    @property
    def strict_visible(self):
        """
        Whether invisible ground truth is left out of matching
        """
        return self._get_value_from_config(self._EVALUATION_SECTION,
                                           self._STRICT_VISIBLE_SETTING)

    @strict_visible.setter
    def strict_visible(self, strict_visible):
        self._set_value_to_config(self._EVALUATION_SECTION,
                                  self._STRICT_VISIBLE_SETTING, strict_visible)

    @property
    def thresholds(self):
        """
        Score threshold grid of error sweeps, as text
        (``start:stop:step`` or a comma-separated list)
        """
        return self._get_value_from_config(self._ERRORS_SECTION,
                                           self._THRESHOLDS_SETTING)

    @thresholds.setter
    def thresholds(self, thresholds):
        self._set_value_to_config(self._ERRORS_SECTION,
                                  self._THRESHOLDS_SETTING, thresholds)

    @property
    def top_k(self):
        """
        Rows of the top-k frequency tables
        """
        return self._get_value_from_config(self._BIAS_SECTION,
                                           self._TOP_K_SETTING)

    @top_k.setter
    def top_k(self, top_k):
        self._set_value_to_config(self._BIAS_SECTION, self._TOP_K_SETTING,
                                  top_k)

    @property
    def min_test_instances(self):
        """
        Test instances an HOI class needs to appear in object-bias tables
        """
        return self._get_value_from_config(self._BIAS_SECTION,
                                           self._MIN_TEST_INSTANCES_SETTING)

    @min_test_instances.setter
    def min_test_instances(self, min_test_instances):
        self._set_value_to_config(self._BIAS_SECTION,
                                  self._MIN_TEST_INSTANCES_SETTING,
                                  min_test_instances)

    @property
    def bias_include_no_interaction(self):
        """
        Whether ``no_interaction`` classes are counted in bias tables
        """
        return self._get_value_from_config(
            self._BIAS_SECTION, self._INCLUDE_NO_INTERACTION_SETTING)

    @bias_include_no_interaction.setter
    def bias_include_no_interaction(self, include_no_interaction):
        self._set_value_to_config(self._BIAS_SECTION,
                                  self._INCLUDE_NO_INTERACTION_SETTING,
                                  include_no_interaction)

    @property
    def output_dir(self):
        """
        Directory receiving the report files
        """
        return self._get_value_from_config(self._OUTPUT_SECTION,
                                           self._OUTPUT_DIR_SETTING)

    @output_dir.setter
    def output_dir(self, output_dir):
        self._set_value_to_config(self._OUTPUT_SECTION,
                                  self._OUTPUT_DIR_SETTING, output_dir)

    @property
    def threads(self):
        """
        Worker threads; results do not depend on it
        """
        return self._get_value_from_config(self._OUTPUT_SECTION,
                                           self._THREADS_SETTING)

    @threads.setter
    def threads(self, threads):
        self._set_value_to_config(self._OUTPUT_SECTION,
                                  self._THREADS_SETTING, threads)

    @property
    def manifest(self):
        """
        Whether reports embed a provenance manifest
        """
        return self._get_value_from_config(self._OUTPUT_SECTION,
                                           self._MANIFEST_SETTING)

    @manifest.setter
    def manifest(self, manifest):
        self._set_value_to_config(self._OUTPUT_SECTION,
                                  self._MANIFEST_SETTING, manifest)

    def validate(self):
        """
        Check every setting.

        :raise ConfigurationError: if a setting is out of range
        """
        if not 0.5 <= self.merge_iou <= 1.0:
            raise ConfigurationError(
                "MergeIou must lie in [0.5, 1.0], got {}".format(
                    self.merge_iou))
        if self.relation_basis not in RelationBasis.ALL:
            raise ConfigurationError(
                "RelationBasis must be one of {}, got '{}'".format(
                    ", ".join(RelationBasis.ALL), self.relation_basis))
        if not 0.0 < self.iou_threshold < 1.0:
            raise ConfigurationError(
                "IouThreshold must lie in (0, 1), got {}".format(
                    self.iou_threshold))
        parse_threshold_grid(self.thresholds)
        if self.top_k < 1:
            raise ConfigurationError("TopK must be positive")
        if self.min_test_instances < 0:
            raise ConfigurationError("MinTestInstances must be non-negative")
        if self.threads < 1:
            raise ConfigurationError("Threads must be positive")

    def threshold_grid(self):
        """
        Returns the parsed threshold grid
        """
        return parse_threshold_grid(self.thresholds)

    def categorization_settings(self):
        """
        Returns the :class:`hoidiag.categorizer.CategorizationSettings` of
        this configuration
        """
        return CategorizationSettings(
            merge_iou=self.merge_iou,
            include_invisible=self.include_invisible,
            include_no_interaction=self.include_no_interaction,
            relation_basis=self.relation_basis)

    def eval_settings(self):
        """
        Returns the :class:`hoidiag.evaluator.EvalSettings` of this
        configuration
        """
        return EvalSettings(iou_threshold=self.iou_threshold,
                            strict_visible=self.strict_visible)

    def to_dict(self):
        """
        The settings that determine report content, as recorded in manifests.
        The thread count and output location are left out.
        """
        return OrderedDict([
            ("merge_iou", self.merge_iou),
            ("relation_basis", self.relation_basis),
            ("include_invisible", self.include_invisible),
            ("include_no_interaction", self.include_no_interaction),
            ("iou_threshold", self.iou_threshold),
            ("strict_visible", self.strict_visible),
            ("thresholds", self.thresholds),
            ("top_k", self.top_k),
            ("min_test_instances", self.min_test_instances),
            ("bias_include_no_interaction", self.bias_include_no_interaction)])

    def _init_from_config_file(self, config_file):
        """
        Alternate constructor body for creating a :class:`RunConfig` from a
        configuration file.

        :param config_file: path to the configuration file
        :raise ConfigurationError: if the file is missing or malformed
        """
        if not path.isfile(config_file):
            raise ConfigurationError("Can't find config file: {}".format(
                config_file))
        try:
            self._config = ConfigObj(infile=config_file, raise_errors=True,
                                     file_error=True)
        except (ConfigObjError, IOError) as ex:
            raise ConfigurationError("Can't parse config file {}: {}".format(
                config_file, ex))
        self._config_path = path.dirname(config_file)
        for section_name in self._config.sections:
            if section_name not in [s[0] for s in self._SETTINGS]:
                logger.warning("Ignoring unknown section [%s] in %s",
                               section_name, config_file)
        self._create_required_sections()
        self.validate()

    @staticmethod
    def create_run_config_from_file(config_file):
        """
        This method allows creation of a :class:`RunConfig` object from a
        specified configuration file. See the class documentation for the
        file format.

        :param config_file: path to the configuration file
        :return: a :class:`RunConfig`
        :raise ConfigurationError: if the file is missing, malformed or holds
            an invalid value
        """
        inst = RunConfig.__new__(RunConfig)
        inst._init_from_config_file(config_file)
        return inst

    def apply_environment(self, environ=None):
        """
        Apply environment overrides: :data:`OUTPUT_DIR_ENV_VAR` replaces the
        output directory.

        :param environ: mapping to read, defaults to :data:`os.environ`
        """
        environ = os.environ if environ is None else environ
        output_dir = environ.get(OUTPUT_DIR_ENV_VAR)
        if output_dir:
            logger.debug("Output directory from %s: %s", OUTPUT_DIR_ENV_VAR,
                         output_dir)
            self.output_dir = output_dir

    def write(self, file_path):
        """
        Write the configuration to a file. Comments and unknown content of a
        file loaded with :meth:`create_run_config_from_file` are preserved.

        :param file_path: File at which to write the configuration. Missing
            directories in the path are created.
        """
        HoiUtils.makedirs(path.dirname(file_path))
        self._config.filename = file_path
        self._config.write()
