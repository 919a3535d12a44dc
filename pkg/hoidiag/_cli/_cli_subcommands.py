# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
###############################################################################

"""Subcommand classes and helpers for the cli"""

from __future__ import absolute_import
from __future__ import print_function
from abc import ABCMeta, abstractproperty, abstractmethod
import argparse
from collections import OrderedDict
import logging
import os

from hoidiag._hoi_utils import HoiUtils
from hoidiag._product_props import get_product_version
from hoidiag._thread_pool import WorkerPool
from hoidiag.annotation import Dataset, load_dataset, load_vocabulary, \
    parse_predictions, serialize_ground_truth, serialize_predictions
from hoidiag.bias import DEFAULT_BIAS_CATEGORIES, bias_report, \
    build_frequencies, resolve_bias_objects
from hoidiag.categorizer import SceneCategory, categorize_dataset, \
    category_statistics, consensus, dump_assignments, load_assignments, \
    parse_label_file, reconcile
from hoidiag.converters import HICO_COMMUNITY_V1, SUPPORTED_FORMATS, \
    convert_external
from hoidiag.error_decomposer import sweep
from hoidiag.evaluator import evaluate
from hoidiag.exceptions import ConfigurationError
from hoidiag.instance_resolver import RelationBasis, resolve_instances
from hoidiag.run_config import RunConfig
from hoidiag.synth import INJECTION_TYPES, SynthSpec, generate

logger = logging.getLogger(__name__)

_CATEGORIES_FILE_NAME = u"categories.json"
_STATS_FILE_NAME = u"stats.csv"
_REPORT_FILE_NAME = u"report.json"
_PER_CLASS_FILE_NAME = u"per_class.csv"
_ERRORS_CSV_FILE_NAME = u"errors.csv"
_ERRORS_JSON_FILE_NAME = u"errors.json"
_TOPK_FILE_NAME = u"topk.csv"
_BIAS_CSV_FILE_NAME = u"bias.csv"
_BIAS_JSON_FILE_NAME = u"bias.json"
_SYNTH_GT_FILE_NAME = u"gt.json"
_SYNTH_PREDICTIONS_FILE_NAME = u"predictions.json"
_SYNTH_LOG_FILE_NAME = u"truth_log.json"
_CONVERTED_FILE_NAME = u"gt.json"

_CATEGORY_CHOICES = SceneCategory.SINGLE_PERSON + SceneCategory.MULTI_PERSON

# (argparse dest, RunConfig property) pairs applied over the config file
_CONFIG_OVERRIDES = (
    ("threads", "threads"),
    ("output_dir", "output_dir"),
    ("manifest", "manifest"),
    ("merge_iou", "merge_iou"),
    ("relation_basis", "relation_basis"),
    ("include_invisible", "include_invisible"),
    ("include_no_interaction", "include_no_interaction"),
    ("iou_threshold", "iou_threshold"),
    ("strict_visible", "strict_visible"),
    ("thresholds", "thresholds"),
    ("top_k", "top_k"),
    ("min_test_instances", "min_test_instances"),
    ("bias_include_no_interaction", "bias_include_no_interaction"))


def build_run_config(args):
    """
    Build the effective :class:`hoidiag.run_config.RunConfig` of a command:
    built-in defaults, overridden by the ``--config`` file, then by the
    output directory environment variable, then by command line flags.

    :param argparse.Namespace args: the parsed arguments
    :return: the validated configuration
    :raise ConfigurationError: if a value is invalid
    """
    if args.config_file:
        config = RunConfig.create_run_config_from_file(args.config_file)
    else:
        config = RunConfig()
    config.apply_environment()
    for dest, setting in _CONFIG_OVERRIDES:
        value = getattr(args, dest, None)
        if value is not None:
            setattr(config, setting, value)
    config.validate()
    return config


def check_input_paths(paths):
    """
    Fail fast on missing or unreadable inputs, before any computation.

    :param paths: the input file paths of a command
    :raise ConfigurationError: if a path is not a readable file
    """
    for input_path in paths:
        if not os.path.isfile(input_path):
            raise ConfigurationError("Input file not found: {}".format(
                input_path))
        if not os.access(input_path, os.R_OK):
            raise ConfigurationError("Input file not readable: {}".format(
                input_path))


def _manifest(args, config, paths):
    """
    Provenance block of a report, or `None` when manifests are off. The
    thread count is left out so reports match across thread counts.
    """
    if not config.manifest:
        return None
    return OrderedDict([
        ("tool", "hoidiag"),
        ("version", get_product_version()),
        ("subcommand", args.subcommand),
        ("settings", config.to_dict()),
        ("inputs", [OrderedDict([("path", input_path),
                                 ("sha256", HoiUtils.file_digest(input_path))])
                    for input_path in paths])])


def _with_manifest(manifest, report):
    if manifest is None:
        return report
    return OrderedDict([("manifest", manifest)] + list(report.items()))


def _output_path(config, file_name):
    return os.path.join(config.output_dir, file_name)


def _format_map(value):
    return "n/a" if value is None else "{:.2f}".format(100.0 * value)


def _get_gt_argparser():
    """
    Create a :class:`argparse.ArgumentParser` with the ground truth option
    that most subcommands require.

    :return: the argparser
    :rtype: argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--gt", metavar="FILE", required=True,
                        help="canonical ground-truth file")
    return parser


def _get_matching_argparser():
    """
    Create a :class:`argparse.ArgumentParser` with the pair-matching options
    shared by subcommands which match predictions to ground truth.

    :return: the argparser
    :rtype: argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--iou-threshold", metavar="T", type=float,
                        default=None,
                        help="pair-matching IoU threshold (default: 0.5)")
    parser.add_argument("--strict-visible", action="store_true",
                        default=None,
                        help="leave invisible ground truth out of matching")
    return parser


class Subcommand(ABCMeta('ABC', (object,), {'__slots__': ()})): # compatible metaclass with Python 2 *and* 3
    """
    Abstract base class for cli subcommands
    """
    @abstractproperty
    def help(self):
        """
        Help text to display at the cli for the subcommand
        :rtype: str
        """
        pass

    @abstractproperty
    def name(self):
        """
        Name of the subcommand, used as the argument to identify the subcommand
        on the command line
        :rtype: str
        """
        pass

    @property
    def parents(self):
        """
        List of parent :class:`argparser.ArgumentParser` instances whose
        options should be included for the subcommand.

        :rtype: list(argparse.ArgumentParser) or \
            tuple(argparse.ArgumentParser) or \
            set(argparse.ArgumentParser)
        """
        return ()

    def add_parser_args(self, parser):
        """
        Method invoked with the :class:`argparser.ArgumentParser` added to the
        base parser for this subcommand. In this method call, the subcommand
        can add any extra subcommand-specific arguments to the parser before
        the cli processes them.

        :param argparse.ArgumentParser parser: the subcommand parser
        """
        pass

    def input_paths(self, args):
        """
        Input files read by the subcommand, checked before it executes and
        digested into manifests.

        :param argparse.Namespace args: arguments supplied to the subcommand
        :rtype: list(str)
        """
        return []

    @abstractmethod
    def execute(self, args, config):
        """
        Execution entry point for the subcommand. This method is called when
        the `name` of this subcommand is entered in the cli args
        :param argparse.Namespace args: arguments supplied to the subcommand
        :param hoidiag.run_config.RunConfig config: the effective settings
        """
        pass


# pylint: disable=no-init
class CategorizeSubcommand(Subcommand):
    """
    Subcommand for assigning every ground-truth image to a scene category,
    optionally overridden by a majority vote of annotator label files.
    """

    @property
    def help(self):
        return "assign ground-truth images to scene categories"

    @property
    def name(self):
        return "categorize"

    @property
    def parents(self):
        return [_get_gt_argparser()]

    def add_parser_args(self, parser):
        parser.add_argument("--labels", metavar="FILE", nargs="+",
                            default=None,
                            help="""annotator label files; the strict
                                majority label replaces the rule-based
                                category""")
        parser.add_argument("--merge-iou", metavar="T", type=float,
                            default=None,
                            help="""IoU above which boxes merge into one
                                instance (default: 0.7)""")
        parser.add_argument("--relation-basis", choices=RelationBasis.ALL,
                            default=None,
                            help="""compare interactions over each person's
                                full verb set or over shared objects
                                (default: person)""")
        parser.add_argument("--include-invisible", action="store_true",
                            default=None,
                            help="keep invisible annotations")
        parser.add_argument("--include-no-interaction", action="store_true",
                            default=None,
                            help="keep no_interaction annotations")
        parser.add_argument("--dump-scene-graphs", action="store_true",
                            help="embed the resolved scene graphs")

    def input_paths(self, args):
        return [args.gt] + list(args.labels or [])

    def execute(self, args, config):
        dataset = load_dataset(args.gt)
        settings = config.categorization_settings()
        pool = WorkerPool(config.threads)
        assignments = categorize_dataset(dataset, settings, pool)
        disagreements = []
        if args.labels:
            voted = consensus([parse_label_file(label_file)
                               for label_file in args.labels])
            assignments, disagreements = reconcile(assignments, voted)
        scene_graphs = None
        if args.dump_scene_graphs:
            scene_graphs = [resolve_instances(image, dataset.vocabulary,
                                              settings.merge_iou,
                                              settings.include_invisible,
                                              settings.include_no_interaction)
                            for image in dataset]
        output = _output_path(config, _CATEGORIES_FILE_NAME)
        dump_assignments(output, assignments, disagreements, scene_graphs,
                         _manifest(args, config, self.input_paths(args)))
        stats = category_statistics(assignments)
        print("Categorized {} images: {} single-person, {} multi-person, "
              "{} excluded, {} disagreements -> {}".format(
                  stats.total[0], stats.single_person[0],
                  stats.multi_person[0],
                  stats.count(SceneCategory.EXCLUDED)[0],
                  len(disagreements), output))


class StatsSubcommand(Subcommand):
    """
    Subcommand for printing and saving per-category image and HOI counts.
    """

    _COLUMNS = ["category", "images", "hois"]

    @property
    def help(self):
        return "print per-category image and HOI counts"

    @property
    def name(self):
        return "stats"

    def add_parser_args(self, parser):
        parser.add_argument("--categories", metavar="FILE", required=True,
                            help="categories.json written by categorize")

    def input_paths(self, args):
        return [args.categories]

    def execute(self, args, config):
        stats = category_statistics(load_assignments(args.categories))
        rows = stats.rows()
        print("{:<14}{:>10}{:>10}".format("category", "images", "hois"))
        for category, images, hois in rows:
            print("{:<14}{:>10}{:>10}".format(category, images, hois))
        output = _output_path(config, _STATS_FILE_NAME)
        HoiUtils.save_csv(output, rows, self._COLUMNS)
        print("{} images, {} single-person -> {}".format(
            stats.total[0], stats.single_person[0], output))


class EvalSubcommand(Subcommand):
    """
    Subcommand for computing per-class AP, overall mAP and per-category mAP.
    """

    _PER_CLASS_COLUMNS = ["hoi_id", "verb", "object", "gt_count", "ap"]

    @property
    def help(self):
        return "evaluate predictions with pair-matching AP/mAP"

    @property
    def name(self):
        return "eval"

    @property
    def parents(self):
        return [_get_gt_argparser(), _get_matching_argparser()]

    def add_parser_args(self, parser):
        parser.add_argument("--pred", metavar="FILE", required=True,
                            help="canonical prediction file")
        parser.add_argument("--categories", metavar="FILE", default=None,
                            help="""categories.json for per-category mAP
                                (default: overall mAP only)""")
        parser.add_argument("--per-class-csv", action="store_true",
                            help="also write {}".format(
                                _PER_CLASS_FILE_NAME))

    def input_paths(self, args):
        paths = [args.gt, args.pred]
        if args.categories:
            paths.append(args.categories)
        return paths

    def execute(self, args, config):
        dataset = load_dataset(args.gt)
        predictions = parse_predictions(args.pred, dataset.vocabulary,
                                        dataset)
        assignments = load_assignments(args.categories) \
            if args.categories else []
        report = evaluate(dataset, predictions, assignments,
                          config.eval_settings(), WorkerPool(config.threads))
        output = _output_path(config, _REPORT_FILE_NAME)
        HoiUtils.save_json(output, _with_manifest(
            _manifest(args, config, self.input_paths(args)),
            report.to_dict()))
        if args.per_class_csv:
            HoiUtils.save_csv(_output_path(config, _PER_CLASS_FILE_NAME),
                              report.per_class_rows(dataset.vocabulary),
                              self._PER_CLASS_COLUMNS)
        summary = "mAP {}".format(_format_map(report.map_overall))
        if assignments:
            summary += "; single-person {}, multi-person {}, gap {}".format(
                _format_map(report.per_group_map.get("single_person")),
                _format_map(report.per_group_map.get("multi_person")),
                _format_map(report.group_gap))
        print("{} -> {}".format(summary, output))


class ErrorsSubcommand(Subcommand):
    """
    Subcommand for decomposing false positives into error types across a
    grid of confidence thresholds.
    """

    _COLUMNS = ["category", "threshold", "flag", "count", "proportion_of_fp"]

    @property
    def help(self):
        return "decompose false positives into error types"

    @property
    def name(self):
        return "errors"

    @property
    def parents(self):
        return [_get_gt_argparser(), _get_matching_argparser()]

    def add_parser_args(self, parser):
        parser.add_argument("--pred", metavar="FILE", required=True,
                            help="canonical prediction file")
        parser.add_argument("--categories", metavar="FILE", default=None,
                            help="""categories.json for per-category rows
                                (default: overall rows only are filled)""")
        parser.add_argument("--thresholds", metavar="GRID", default=None,
                            help="""score thresholds as start:stop:step or a
                                comma-separated list (default:
                                0.0:0.9:0.1)""")

    def input_paths(self, args):
        paths = [args.gt, args.pred]
        if args.categories:
            paths.append(args.categories)
        return paths

    def execute(self, args, config):
        thresholds = config.threshold_grid()
        dataset = load_dataset(args.gt)
        predictions = parse_predictions(args.pred, dataset.vocabulary,
                                        dataset)
        assignments = load_assignments(args.categories) \
            if args.categories else []
        result = sweep(dataset, predictions, assignments, thresholds,
                       config.eval_settings(), WorkerPool(config.threads))
        output = _output_path(config, _ERRORS_CSV_FILE_NAME)
        HoiUtils.save_csv(output, result.rows(), self._COLUMNS)
        HoiUtils.save_json(
            _output_path(config, _ERRORS_JSON_FILE_NAME),
            _with_manifest(_manifest(args, config, self.input_paths(args)),
                           result.to_dict()))
        first = result.cell("OVERALL", thresholds[0])
        print("Swept {} thresholds; {} false positives at {} -> {}".format(
            len(thresholds), first.fp_count, thresholds[0], output))


class BiasSubcommand(Subcommand):
    """
    Subcommand for class-frequency and object-conditioned verb-bias tables.
    """

    @property
    def help(self):
        return "tabulate training frequency against AP"

    @property
    def name(self):
        return "bias"

    @property
    def parents(self):
        return [_get_matching_argparser()]

    def add_parser_args(self, parser):
        parser.add_argument("--train", metavar="FILE", required=True,
                            help="canonical training ground-truth file")
        parser.add_argument("--test", metavar="FILE", required=True,
                            help="canonical test ground-truth file")
        parser.add_argument("--categories", metavar="FILE", required=True,
                            help="categories.json of the test set")
        parser.add_argument("--pred", metavar="FILE", nargs="+", default=[],
                            help="""prediction files; each adds an AP column
                                named after its model""")
        parser.add_argument("--object", metavar="NAME", nargs="+",
                            default=None,
                            help="""objects of the verb-bias tables (default:
                                horse, sports_ball, skateboard, bicycle when
                                present)""")
        parser.add_argument("--category", nargs="+", default=None,
                            choices=_CATEGORY_CHOICES,
                            help="categories to tabulate (default: {})".format(
                                " ".join(DEFAULT_BIAS_CATEGORIES)))
        parser.add_argument("--top-k", metavar="K", type=int, default=None,
                            help="rows of the top-k tables (default: 10)")
        parser.add_argument("--min-test-instances", metavar="N", type=int,
                            default=None,
                            help="""test instances required in verb-bias
                                tables (default: 5)""")
        parser.add_argument("--include-no-interaction", action="store_true",
                            default=None,
                            dest="bias_include_no_interaction",
                            help="count no_interaction classes")

    def input_paths(self, args):
        return [args.train, args.test, args.categories] + list(args.pred)

    def execute(self, args, config):
        train = load_dataset(args.train)
        test = load_dataset(args.test)
        assignments = load_assignments(args.categories)
        freq = build_frequencies(train, test, assignments,
                                 config.bias_include_no_interaction)
        pool = WorkerPool(config.threads)
        reports = []
        for pred_file in args.pred:
            predictions = parse_predictions(pred_file, test.vocabulary, test)
            reports.append(evaluate(test, predictions, assignments,
                                    config.eval_settings(), pool))
        models = [report.model_name for report in reports]
        if len(set(models)) != len(models):
            raise ConfigurationError(
                "Prediction files must have distinct model names: {}".format(
                    ", ".join(models)))
        categories = args.category or list(DEFAULT_BIAS_CATEGORIES)
        object_ids = resolve_bias_objects(test.vocabulary, args.object)
        topk_rows, bias_rows, summary = bias_report(
            freq, reports, categories, object_ids, config.top_k,
            config.min_test_instances)
        ap_columns = ["ap_" + model for model in models]
        output = _output_path(config, _TOPK_FILE_NAME)
        HoiUtils.save_csv(output, topk_rows,
                          ["category", "rank", "hoi_id", "hoi",
                           "train_count", "test_count"] + ap_columns)
        HoiUtils.save_csv(_output_path(config, _BIAS_CSV_FILE_NAME),
                          bias_rows,
                          ["category", "object", "verb", "hoi_id",
                           "train_count", "share", "test_count"] + ap_columns)
        HoiUtils.save_json(
            _output_path(config, _BIAS_JSON_FILE_NAME),
            _with_manifest(_manifest(args, config, self.input_paths(args)),
                           summary))
        print("{} top-k rows, {} verb-bias rows over {} model(s) -> "
              "{}".format(len(topk_rows), len(bias_rows), len(models),
                          output))


def _parse_injection(text):
    """
    Parse a ``TYPE=COUNT`` injection argument
    """
    name, _, count = text.partition("=")
    if name not in INJECTION_TYPES:
        raise argparse.ArgumentTypeError(
            "unknown error type '{}', expected one of: {}".format(
                name, ", ".join(INJECTION_TYPES)))
    try:
        value = int(count) if count else 1
    except ValueError:
        raise argparse.ArgumentTypeError(
            "invalid count in '{}'".format(text))
    if value < 0:
        raise argparse.ArgumentTypeError(
            "negative count in '{}'".format(text))
    return name, value


class SynthSubcommand(Subcommand):
    """
    Subcommand for generating synthetic scenes with injected, labelled
    detector errors.
    """

    @property
    def help(self):
        return "generate synthetic ground truth and predictions"

    @property
    def name(self):
        return "synth"

    def add_parser_args(self, parser):
        parser.add_argument("--seed", type=int, default=0,
                            help="generator seed (default: 0)")
        parser.add_argument("--scenes", metavar="N", type=int, default=100,
                            help="number of scenes (default: 100)")
        parser.add_argument("--person-range", metavar=("MIN", "MAX"),
                            type=int, nargs=2, default=[1, 3],
                            help="""persons per multi-person scene
                                (default: 1 3)""")
        parser.add_argument("--scene-categories", metavar="CATEGORY",
                            nargs="+", choices=_CATEGORY_CHOICES,
                            default=list(_CATEGORY_CHOICES),
                            help="""categories assigned to scenes
                                round-robin (default: all eight)""")
        parser.add_argument("--inject", metavar="TYPE=COUNT", nargs="*",
                            type=_parse_injection, default=None,
                            help="""false positives injected per scene and
                                error type (default: one of each of {})""".
                            format(", ".join(INJECTION_TYPES)))

    def execute(self, args, config):
        if args.inject is None:
            injections = dict((name, 1) for name in INJECTION_TYPES)
        else:
            injections = dict(args.inject)
        spec = SynthSpec(seed=args.seed, scene_count=args.scenes,
                         person_range=args.person_range,
                         categories=args.scene_categories,
                         injections=injections)
        dataset, predictions, log = generate(spec, WorkerPool(config.threads))
        serialize_ground_truth(dataset,
                               _output_path(config, _SYNTH_GT_FILE_NAME))
        serialize_predictions(
            predictions, _output_path(config, _SYNTH_PREDICTIONS_FILE_NAME))
        output = _output_path(config, _SYNTH_LOG_FILE_NAME)
        HoiUtils.save_json(output, _with_manifest(
            _manifest(args, config, []), log.to_dict(spec)))
        print("Generated {} scenes, {} predictions, {} skipped "
              "injections -> {}".format(len(dataset), len(predictions),
                                        len(log.skipped), output))


class ConvertSubcommand(Subcommand):
    """
    Subcommand for converting an external annotation export into the
    canonical ground-truth format.
    """

    @property
    def help(self):
        return "convert an external annotation file to canonical JSON"

    @property
    def name(self):
        return "convert"

    def add_parser_args(self, parser):
        parser.add_argument("input", metavar="FILE",
                            help="external annotation file")
        parser.add_argument("--format", dest="format_tag",
                            choices=SUPPORTED_FORMATS,
                            default=HICO_COMMUNITY_V1,
                            help="format of the input (default: {})".format(
                                HICO_COMMUNITY_V1))
        parser.add_argument("--vocab", metavar="FILE", required=True,
                            help="""vocabulary file, or a canonical
                                ground-truth file holding one""")
        parser.add_argument("--out", metavar="NAME",
                            default=_CONVERTED_FILE_NAME,
                            help="""output file name within the output
                                directory (default: {})""".format(
                                    _CONVERTED_FILE_NAME))

    def input_paths(self, args):
        return [args.input, args.vocab]

    def execute(self, args, config):
        vocab = load_vocabulary(args.vocab)
        images = convert_external(args.input, args.format_tag, vocab)
        dataset = Dataset(vocab, images)
        output = _output_path(config, args.out)
        serialize_ground_truth(dataset, output)
        print("Converted {} images with {} annotations -> {}".format(
            len(dataset), sum(len(image.annotations) for image in dataset),
            output))
