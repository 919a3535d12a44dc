# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Attribution of false positives to six error types and confidence-threshold
sweeps of the resulting distributions.

For a false positive ``p`` of verb ``v`` and object class ``o``, with ``L``
the ground-truth annotations of class ``o`` whose human and object boxes
both overlap ``p`` with IoU above the threshold:

``human_box``
    no ground-truth human box of the image overlaps ``p.human_box``
``object_box``
    no ground-truth object box of the image overlaps ``p.object_box``
``object_class``
    some object box overlaps, but every overlapping object box has a class
    other than ``o``
``pairing``
    ``L`` is empty and none of the three flags above is set
``verb``
    ``L`` is non-empty and no annotation in ``L`` has verb ``v``
``duplicate``
    some annotation in ``L`` has verb ``v``; all of them were claimed by
    higher-ranked predictions

Every false positive raises at least one flag.
"""

from __future__ import absolute_import
from collections import OrderedDict
import logging
import math

from hoidiag.annotation import iou
from hoidiag.categorizer import SceneCategory
from hoidiag.evaluator import DEFAULT_IOU_THRESHOLD, EvalSettings, \
    check_prediction_images, match_all
from hoidiag.exceptions import ConfigurationError, InvariantViolationError

logger = logging.getLogger(__name__)

#: Group covering every image in a sweep
OVERALL = "OVERALL"

#: Groups reported by a sweep, in report order
SWEEP_GROUPS = (OVERALL,) + SceneCategory.SINGLE_PERSON + \
    SceneCategory.MULTI_PERSON

DEFAULT_THRESHOLD_GRID = "0.0:0.9:0.1"


class ErrorFlags(object):
    """
    The six error flags of one prediction.
    """

    FLAG_NAMES = ("human_box", "object_box", "object_class", "verb",
                  "pairing", "duplicate")

    __slots__ = FLAG_NAMES

    def __init__(self, **flags):
        unknown = set(flags) - set(self.FLAG_NAMES)
        if unknown:
            raise ValueError("unknown error flags: {}".format(
                ", ".join(sorted(unknown))))
        for name in self.FLAG_NAMES:
            setattr(self, name, bool(flags.get(name, False)))
        if self.object_box and self.object_class:
            raise InvariantViolationError(
                "object_box and object_class are mutually exclusive")

    @staticmethod
    def from_names(names):
        """
        Returns flags with exactly the named flags set
        """
        return ErrorFlags(**dict((name, True) for name in names))

    def names(self):
        """
        Returns the names of the set flags, in :data:`FLAG_NAMES` order
        """
        return [name for name in self.FLAG_NAMES if getattr(self, name)]

    def any(self):
        """
        Whether at least one flag is set
        """
        return any(getattr(self, name) for name in self.FLAG_NAMES)

    def to_dict(self):
        """
        Dictionary of flag name -> bool
        """
        return OrderedDict((name, getattr(self, name))
                           for name in self.FLAG_NAMES)

    def __eq__(self, other):
        return isinstance(other, ErrorFlags) and \
            self.names() == other.names()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(tuple(self.names()))

    def __repr__(self):
        return "ErrorFlags({})".format(", ".join(self.names()))


def decompose_fp(outcome, image, vocab, matched,
                 iou_threshold=DEFAULT_IOU_THRESHOLD, strict_visible=False):
    """
    Attribute a false positive to error types.

    :param hoidiag.evaluator.MatchOutcome outcome: the FP outcome
    :param hoidiag.GroundTruthImage image: the ground truth of its image
    :param hoidiag.Vocabulary vocab: the vocabulary
    :param matched: set of ``(image_id, annotation_index)`` claimed in the
        matching run that produced `outcome`
    :param float iou_threshold: the matching threshold
    :param bool strict_visible: whether invisible annotations were left out
        of matching
    :return: the :class:`ErrorFlags`
    :raise InvariantViolationError: if `outcome` is a true positive, or if
        an annotation the prediction should have claimed is unmatched
    """
    if outcome.is_tp:
        raise InvariantViolationError(
            "error decomposition applies to false positives only",
            "prediction {}".format(outcome.prediction_index))
    prediction = outcome.prediction
    verb_id, object_id = vocab.hoi(prediction.hoi_id)
    annotations = [(index, annotation)
                   for index, annotation in enumerate(image.annotations)
                   if not (strict_visible and annotation.invisible)]

    human_ious = [iou(prediction.human_box, a.human_box)
                  for _, a in annotations]
    object_ious = [iou(prediction.object_box, a.object_box)
                   for _, a in annotations]
    human_box = not any(value > iou_threshold for value in human_ious)
    object_box = not any(value > iou_threshold for value in object_ious)
    object_class = not object_box and all(
        vocab.object_of(a.hoi_id) != object_id
        for (_, a), value in zip(annotations, object_ious)
        if value > iou_threshold)

    localized = [(index, a) for (index, a), h_iou, o_iou
                 in zip(annotations, human_ious, object_ious)
                 if vocab.object_of(a.hoi_id) == object_id and
                 min(h_iou, o_iou) > iou_threshold]
    same_verb = [index for index, a in localized
                 if vocab.verb_of(a.hoi_id) == verb_id]
    for index in same_verb:
        if (image.image_id, index) not in matched:
            raise InvariantViolationError(
                "a false positive overlaps an unclaimed pair of its class",
                "prediction {} / annotation {}".format(
                    outcome.prediction_index, index))

    flags = ErrorFlags(
        human_box=human_box,
        object_box=object_box,
        object_class=object_class,
        pairing=not localized and not (human_box or object_box or
                                       object_class),
        verb=bool(localized) and not same_verb,
        duplicate=bool(same_verb))
    if not flags.any():
        raise InvariantViolationError("every false positive raises a flag",
                                      "prediction {}".format(
                                          outcome.prediction_index))
    return flags


def decompose_outcomes(dataset, outcomes_by_class, settings=None):
    """
    Flags for every outcome of a matching run.

    :param hoidiag.Dataset dataset: the ground truth
    :param outcomes_by_class: dictionary of hoi_id -> outcome list
    :param hoidiag.EvalSettings settings: the matching protocol used
    :return: list of ``(outcome, ErrorFlags)`` ordered by hoi id then rank;
        true positives carry clear flags
    """
    settings = settings or EvalSettings()
    matched = set(outcome.matched_gt
                  for outcomes in outcomes_by_class.values()
                  for outcome in outcomes if outcome.is_tp)
    vocab = dataset.vocabulary
    results = []
    for hoi_id in sorted(outcomes_by_class):
        for outcome in outcomes_by_class[hoi_id]:
            if outcome.is_tp:
                results.append((outcome, ErrorFlags()))
            else:
                results.append((outcome, decompose_fp(
                    outcome, dataset.image(outcome.prediction.image_id),
                    vocab, matched, settings.iou_threshold,
                    settings.strict_visible)))
    return results


def parse_threshold_grid(text):
    """
    Parse a score threshold grid: ``start:stop:step`` (``stop`` included
    within 1e-9) or a comma-separated list.

    :param str text: the grid, e.g. ``0.0:0.9:0.1``
    :return: ascending list of thresholds in ``[0, 1]``
    :raise ConfigurationError: if the grid is malformed, empty, out of
        range or not strictly ascending
    """
    text = (text or "").strip()
    try:
        if ":" in text:
            parts = [float(part) for part in text.split(":")]
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = parts
            if step <= 0:
                raise ValueError("step must be positive")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 10) for i in range(count)]
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as ex:
        raise ConfigurationError("Invalid threshold grid '{}': {}".format(
            text, ex))
    if not values:
        raise ConfigurationError("Threshold grid '{}' is empty".format(text))
    if any(not 0.0 <= value <= 1.0 for value in values):
        raise ConfigurationError(
            "Thresholds must lie in [0, 1]: '{}'".format(text))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigurationError(
            "Thresholds must be strictly ascending: '{}'".format(text))
    return values


class SweepCell(object):
    """
    False-positive statistics of one (group, threshold) cell.
    """

    def __init__(self):
        self.fp_count = 0
        self.counts = OrderedDict((name, 0) for name in ErrorFlags.FLAG_NAMES)
        self.cooccurrence = [[0] * len(ErrorFlags.FLAG_NAMES)
                             for _ in ErrorFlags.FLAG_NAMES]

    def add(self, flags):
        """
        Account one false positive
        """
        self.fp_count += 1
        raised = [getattr(flags, name) for name in ErrorFlags.FLAG_NAMES]
        for i, flag_i in enumerate(raised):
            if flag_i:
                self.counts[ErrorFlags.FLAG_NAMES[i]] += 1
                for j, flag_j in enumerate(raised):
                    if flag_j:
                        self.cooccurrence[i][j] += 1

    def proportion(self, name):
        """
        Share of the cell's false positives raising flag `name`
        """
        return self.counts[name] / self.fp_count if self.fp_count else 0.0

    def to_dict(self):
        """
        The ``errors.json`` representation of the cell
        """
        return OrderedDict([
            ("fp_count", self.fp_count),
            ("counts", self.counts),
            ("proportions", OrderedDict(
                (name, self.proportion(name))
                for name in ErrorFlags.FLAG_NAMES)),
            ("cooccurrence", self.cooccurrence)])


class ErrorSweep(object):
    """
    False-positive error distributions per threshold and category group.
    """

    def __init__(self, thresholds, cells):
        """
        Constructor parameters:

        :param thresholds: the ascending thresholds
        :param dict cells: ``(group, threshold) -> SweepCell``
        """
        self._thresholds = list(thresholds)
        self._cells = cells

    @property
    def thresholds(self):
        """
        The swept thresholds, ascending
        """
        return self._thresholds

    def cell(self, group, threshold):
        """
        Returns the :class:`SweepCell` of a group at a threshold
        """
        return self._cells[(group, threshold)]

    def rows(self):
        """
        ``errors.csv`` rows ``(category, threshold, flag, count,
        proportion_of_fp)``
        """
        rows = []
        for group in SWEEP_GROUPS:
            for threshold in self._thresholds:
                cell = self._cells[(group, threshold)]
                for name in ErrorFlags.FLAG_NAMES:
                    rows.append((group, threshold, name, cell.counts[name],
                                 cell.proportion(name)))
        return rows

    def to_dict(self):
        """
        The ``errors.json`` representation
        """
        return OrderedDict([
            ("thresholds", self._thresholds),
            ("flags", list(ErrorFlags.FLAG_NAMES)),
            ("groups", OrderedDict(
                (group, [OrderedDict([("threshold", threshold)] + list(
                    self._cells[(group, threshold)].to_dict().items()))
                         for threshold in self._thresholds])
                for group in SWEEP_GROUPS))])


def sweep(dataset, predictions, assignments, thresholds, settings=None,
          pool=None):
    """
    Decompose false positives at each confidence threshold.

    At threshold ``t`` matching is re-run on the predictions with
    ``score >= t`` and their false positives are decomposed against that
    restricted match state. Results are grouped per scene category and
    overall.

    :param hoidiag.Dataset dataset: the ground truth
    :param predictions: iterable of :class:`hoidiag.Prediction`
    :param assignments: iterable of :class:`hoidiag.CategoryAssignment`
    :param thresholds: ascending thresholds in ``[0, 1]``
    :param hoidiag.EvalSettings settings: matching protocol
    :param pool: optional :class:`hoidiag._thread_pool.WorkerPool`
    :return: the :class:`ErrorSweep`
    :raise ConfigurationError: if `thresholds` is empty or not ascending
    """
    settings = settings or EvalSettings()
    thresholds = list(thresholds)
    if not thresholds:
        raise ConfigurationError("At least one threshold is required")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ConfigurationError("Thresholds must be strictly ascending")
    predictions = list(predictions)
    check_prediction_images(dataset, predictions)
    category_of = dict((a.image_id, a.category.value) for a in assignments)

    def _sweep_threshold(threshold):
        kept = [p for p in predictions if p.score >= threshold]
        outcomes = match_all(dataset, kept, settings)
        cells = dict((group, SweepCell()) for group in SWEEP_GROUPS)
        for outcome, flags in decompose_outcomes(dataset, outcomes, settings):
            if outcome.is_tp:
                continue
            cells[OVERALL].add(flags)
            group = category_of.get(outcome.prediction.image_id)
            if group in cells:
                cells[group].add(flags)
        logger.debug("Threshold %s: %d false positives", threshold,
                     cells[OVERALL].fp_count)
        return cells

    if pool is None:
        per_threshold = [_sweep_threshold(t) for t in thresholds]
    else:
        per_threshold = pool.map_ordered(_sweep_threshold, thresholds)

    cells = {}
    previous = None
    for threshold, threshold_cells in zip(thresholds, per_threshold):
        fp_count = threshold_cells[OVERALL].fp_count
        if previous is not None and fp_count > previous:
            raise InvariantViolationError(
                "false-positive count is non-increasing in the threshold",
                "{} at {}".format(fp_count, threshold))
        previous = fp_count
        for group, cell in threshold_cells.items():
            cells[(group, threshold)] = cell
    logger.info("Swept %d thresholds over %d predictions", len(thresholds),
                len(predictions))
    return ErrorSweep(thresholds, cells)
