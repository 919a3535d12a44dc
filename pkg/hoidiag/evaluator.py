# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Pair-matching evaluation of HOI predictions: per-class average precision,
overall mAP and mAP restricted to each scene category.

A prediction of class ``c`` is a true positive when, within its image, an
unmatched ground-truth pair of class ``c`` has both its human and object box
overlapping the prediction with IoU greater than the threshold. Predictions
are processed by descending score; each ground-truth pair is claimed at most
once.
"""

from __future__ import absolute_import
from collections import OrderedDict, namedtuple
import logging

import numpy as np

from hoidiag.annotation import iou_matrix
from hoidiag.categorizer import SceneCategory
from hoidiag.exceptions import InvariantViolationError, UnknownImageError

logger = logging.getLogger(__name__)

DEFAULT_IOU_THRESHOLD = 0.5

#: Per-class result: average precision, ground-truth and prediction counts
ClassAp = namedtuple("ClassAp", ["ap", "gt_count", "prediction_count"])

#: A matchable ground-truth pair
GtPair = namedtuple("GtPair", ["image_id", "annotation_index", "human_box",
                               "object_box"])

#: Category groups reported alongside the per-category mAP
SINGLE_PERSON_GROUP = "single_person"
MULTI_PERSON_GROUP = "multi_person"
_GROUPS = OrderedDict([(SINGLE_PERSON_GROUP, SceneCategory.SINGLE_PERSON),
                       (MULTI_PERSON_GROUP, SceneCategory.MULTI_PERSON)])

#: Categories evaluated separately, in report order
EVALUATED_CATEGORIES = SceneCategory.SINGLE_PERSON + SceneCategory.MULTI_PERSON


class EvalSettings(object):
    """
    Matching protocol settings.
    """

    def __init__(self, iou_threshold=DEFAULT_IOU_THRESHOLD,
                 strict_visible=False):
        """
        Constructor parameters:

        :param float iou_threshold: minimum IoU (exclusive) for both boxes
        :param bool strict_visible: leave invisible ground-truth pairs out of
            the matchable set
        """
        self.iou_threshold = iou_threshold
        self.strict_visible = strict_visible

    def to_dict(self):
        """
        The settings as recorded in reports
        """
        return {"iou_threshold": self.iou_threshold,
                "strict_visible": self.strict_visible}


class MatchOutcome(object):
    """
    The verdict on one prediction after matching.
    """

    TP = "TP"
    FP = "FP"

    __slots__ = ("_prediction", "_verdict", "_matched_gt", "_match_iou")

    def __init__(self, prediction, verdict, matched_gt=None, match_iou=None):
        if (verdict == self.TP) != (matched_gt is not None):
            raise InvariantViolationError(
                "a prediction is TP iff it has a matched ground truth",
                "prediction {}".format(prediction.index))
        self._prediction = prediction
        self._verdict = verdict
        self._matched_gt = matched_gt
        self._match_iou = match_iou

    @property
    def prediction(self):
        """
        The :class:`hoidiag.Prediction` the verdict is about
        """
        return self._prediction

    @property
    def prediction_index(self):
        """
        The insertion index of the prediction
        """
        return self._prediction.index

    @property
    def score(self):
        """
        The score of the prediction
        """
        return self._prediction.score

    @property
    def verdict(self):
        """
        :data:`TP` or :data:`FP`
        """
        return self._verdict

    @property
    def is_tp(self):
        """
        Whether the prediction is a true positive
        """
        return self._verdict == self.TP

    @property
    def matched_gt(self):
        """
        ``(image_id, annotation_index)`` of the claimed pair, or `None`
        """
        return self._matched_gt

    @property
    def match_iou(self):
        """
        ``min(iou_h, iou_o)`` with the claimed pair, or `None`
        """
        return self._match_iou

    def __repr__(self):
        return "MatchOutcome({}, {}, {})".format(self.prediction_index,
                                                 self._verdict,
                                                 self._matched_gt)


def match_class(gt_pairs, predictions, iou_threshold=DEFAULT_IOU_THRESHOLD):
    """
    Match the predictions of one HOI class against its ground-truth pairs.

    Predictions are processed by descending score, ties broken by image id
    then insertion index. Each prediction claims, among the still unmatched
    pairs of its image with ``min(iou_h, iou_o) > iou_threshold``, the one
    maximizing ``min(iou_h, iou_o)`` (lowest annotation index on ties).

    :param gt_pairs: iterable of :class:`GtPair` of the class
    :param predictions: iterable of :class:`hoidiag.Prediction` of the class
    :param float iou_threshold: the IoU threshold
    :return: list of :class:`MatchOutcome` in processing order
    """
    by_image = {}
    for pair in gt_pairs:
        by_image.setdefault(pair.image_id, []).append(pair)
    ranked = sorted(predictions, key=lambda p: p.rank_key())
    preds_by_image = {}
    for position, prediction in enumerate(ranked):
        preds_by_image.setdefault(prediction.image_id, []).append(
            (position, prediction))

    outcomes = [None] * len(ranked)
    for image_id, image_preds in preds_by_image.items():
        pairs = sorted(by_image.get(image_id, ()),
                       key=lambda pair: pair.annotation_index)
        if not pairs:
            for position, prediction in image_preds:
                outcomes[position] = MatchOutcome(prediction, MatchOutcome.FP)
            continue
        overlap = np.minimum(
            iou_matrix([p.human_box for _, p in image_preds],
                       [pair.human_box for pair in pairs]),
            iou_matrix([p.object_box for _, p in image_preds],
                       [pair.object_box for pair in pairs]))
        claimed = np.zeros(len(pairs), dtype=bool)
        for row, (position, prediction) in enumerate(image_preds):
            candidates = np.where(claimed, -1.0, overlap[row])
            best = int(np.argmax(candidates))
            if candidates[best] > iou_threshold:
                claimed[best] = True
                pair = pairs[best]
                outcomes[position] = MatchOutcome(
                    prediction, MatchOutcome.TP,
                    (pair.image_id, pair.annotation_index),
                    float(candidates[best]))
            else:
                outcomes[position] = MatchOutcome(prediction, MatchOutcome.FP)
    return outcomes


def average_precision(outcomes, gt_count):
    """
    All-point interpolated average precision: the area under the precision
    envelope over recall.

    :param outcomes: :class:`MatchOutcome` list in processing order
    :param int gt_count: number of ground-truth pairs of the class
    :return: the AP in ``[0, 1]``
    :raise InvariantViolationError: if `gt_count` is zero or smaller than
        the number of true positives
    """
    if gt_count <= 0:
        raise InvariantViolationError(
            "average precision needs at least one ground-truth pair",
            "gt_count={}".format(gt_count))
    hits = np.array([outcome.is_tp for outcome in outcomes], dtype=np.float64)
    tp = np.cumsum(hits)
    if len(tp) and tp[-1] > gt_count:
        raise InvariantViolationError(
            "true positives cannot exceed ground-truth pairs",
            "{} > {}".format(int(tp[-1]), gt_count))
    rec = tp / gt_count
    prec = tp / np.arange(1, len(tp) + 1, dtype=np.float64)

    mrec = np.concatenate(([0.0], rec, [1.0]))
    mpre = np.concatenate(([0.0], prec, [0.0]))
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.where(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


def collect_gt_pairs(dataset, strict_visible=False):
    """
    Group the matchable ground-truth pairs of a dataset by HOI class.

    :param hoidiag.Dataset dataset: the ground truth
    :param bool strict_visible: leave invisible annotations out
    :return: dictionary of hoi_id -> list of :class:`GtPair`
    """
    pairs = {}
    for image in dataset.images:
        for index, annotation in enumerate(image.annotations):
            if strict_visible and annotation.invisible:
                continue
            pairs.setdefault(annotation.hoi_id, []).append(
                GtPair(image.image_id, index, annotation.human_box,
                       annotation.object_box))
    return pairs


def check_prediction_images(dataset, predictions):
    """
    :raise UnknownImageError: if a prediction references an image absent
        from the ground truth
    """
    for prediction in predictions:
        if prediction.image_id not in dataset:
            raise UnknownImageError(
                "prediction {} references image {!r} which is absent from the "
                "ground truth".format(prediction.index, prediction.image_id))


def match_all(dataset, predictions, settings=None, pool=None):
    """
    Match every HOI class of a prediction list.

    :return: dictionary of hoi_id -> :class:`MatchOutcome` list, for every
        class with ground truth or predictions
    """
    settings = settings or EvalSettings()
    gt_pairs = collect_gt_pairs(dataset, settings.strict_visible)
    preds = {}
    for prediction in predictions:
        preds.setdefault(prediction.hoi_id, []).append(prediction)
    classes = sorted(set(gt_pairs) | set(preds))

    def _match(hoi_id):
        logger.debug("Matching HOI class %d", hoi_id)
        return match_class(gt_pairs.get(hoi_id, ()), preds.get(hoi_id, ()),
                           settings.iou_threshold)

    if pool is None:
        results = [_match(hoi_id) for hoi_id in classes]
    else:
        results = pool.map_ordered(_match, classes)
    return dict(zip(classes, results))


def _subset_aps(outcomes_by_class, gt_pairs, image_ids=None):
    """
    Per-class AP over the images in `image_ids` (all images when `None`),
    for the classes with at least one ground-truth pair there.
    """
    aps = OrderedDict()
    for hoi_id in sorted(gt_pairs):
        gt_count = sum(1 for pair in gt_pairs[hoi_id]
                       if image_ids is None or pair.image_id in image_ids)
        if gt_count == 0:
            continue
        outcomes = [o for o in outcomes_by_class.get(hoi_id, ())
                    if image_ids is None or o.prediction.image_id in image_ids]
        aps[hoi_id] = ClassAp(average_precision(outcomes, gt_count), gt_count,
                              len(outcomes))
    return aps


def _mean_ap(aps):
    if not aps:
        return None
    return float(np.mean([entry.ap for entry in aps.values()]))


class EvalReport(object):
    """
    The evaluation of one model's predictions.
    """

    def __init__(self, model_name, per_class_ap, per_category_class_ap,
                 per_group_map, settings):
        self._model_name = model_name
        self._per_class_ap = per_class_ap
        self._per_category_class_ap = per_category_class_ap
        self._per_group_map = per_group_map
        self._settings = settings
        self._map_overall = _mean_ap(per_class_ap)
        self._per_category_map = OrderedDict(
            (category, _mean_ap(aps))
            for category, aps in per_category_class_ap.items())

    @property
    def model_name(self):
        """
        The name of the evaluated model
        """
        return self._model_name

    @property
    def settings(self):
        """
        The :class:`EvalSettings` used
        """
        return self._settings

    @property
    def per_class_ap(self):
        """
        Dictionary of hoi_id -> :class:`ClassAp` over every ground-truth
        image, for classes with at least one ground-truth pair
        """
        return self._per_class_ap

    @property
    def map_overall(self):
        """
        Mean AP over every class with ground truth, or `None` when no class
        has matchable ground truth
        """
        return self._map_overall

    @property
    def per_category_map(self):
        """
        Dictionary of category value -> mAP over that category's images,
        for categories with at least one image
        """
        return self._per_category_map

    @property
    def per_category_class_ap(self):
        """
        Dictionary of category value -> (hoi_id -> :class:`ClassAp`)
        """
        return self._per_category_class_ap

    @property
    def per_group_map(self):
        """
        Dictionary with the ``single_person`` and ``multi_person`` mAP
        (`None` when a group has no images)
        """
        return self._per_group_map

    @property
    def group_gap(self):
        """
        Single-person minus multi-person mAP, or `None` if either is missing
        """
        single = self._per_group_map.get(SINGLE_PERSON_GROUP)
        multi = self._per_group_map.get(MULTI_PERSON_GROUP)
        if single is None or multi is None:
            return None
        return single - multi

    def class_ap(self, category, hoi_id):
        """
        Returns the AP of a class within a category, or `None` when the
        class has no ground truth there
        """
        entry = self._per_category_class_ap.get(category, {}).get(hoi_id)
        return None if entry is None else entry.ap

    def per_class_rows(self, vocab):
        """
        Rows ``(hoi_id, verb, object, gt_count, ap)`` of the per-class CSV
        """
        rows = []
        for hoi_id, entry in self._per_class_ap.items():
            verb_id, object_id = vocab.hoi(hoi_id)
            rows.append((hoi_id, vocab.verb_name(verb_id),
                         vocab.object_name(object_id), entry.gt_count,
                         entry.ap))
        return rows

    def to_dict(self):
        """
        The ``report.json`` representation
        """
        def _classes(aps):
            return [{"hoi_id": hoi_id, "ap": entry.ap,
                     "gt_count": entry.gt_count,
                     "prediction_count": entry.prediction_count}
                    for hoi_id, entry in aps.items()]

        return OrderedDict([
            ("model_name", self._model_name),
            ("settings", self._settings.to_dict()),
            ("map_overall", self._map_overall),
            ("per_group_map", OrderedDict(
                list(self._per_group_map.items()) +
                [("gap", self.group_gap)])),
            ("per_category_map", self._per_category_map),
            ("per_class", _classes(self._per_class_ap)),
            ("per_category_class_ap", OrderedDict(
                (category, _classes(aps))
                for category, aps in self._per_category_class_ap.items()))
        ])


def evaluate(dataset, predictions, assignments=(), settings=None, pool=None,
             model_name=None):
    """
    Evaluate predictions against a dataset.

    Per-class AP and overall mAP use every ground-truth image. The
    per-category mAP restricts ground truth and predictions to the images of
    each category and averages over the classes with ground truth there.
    Matching is per image, so restricting the global matching to a subset of
    images gives the same verdicts as matching the subset alone.

    :param hoidiag.Dataset dataset: the ground truth
    :param predictions: :class:`hoidiag.PredictionSet` or list of
        :class:`hoidiag.Prediction`
    :param assignments: iterable of :class:`hoidiag.CategoryAssignment`
    :param EvalSettings settings: matching protocol
    :param pool: optional :class:`hoidiag._thread_pool.WorkerPool`
    :param str model_name: overrides the prediction set's model name
    :return: the :class:`EvalReport`
    :raise UnknownImageError: if a prediction's image is absent from the
        ground truth
    """
    settings = settings or EvalSettings()
    if model_name is None:
        model_name = getattr(predictions, "model_name", "model")
    predictions = list(predictions)
    check_prediction_images(dataset, predictions)

    outcomes = match_all(dataset, predictions, settings, pool)
    gt_pairs = collect_gt_pairs(dataset, settings.strict_visible)
    per_class = _subset_aps(outcomes, gt_pairs)

    images = {}
    for assignment in assignments:
        images.setdefault(assignment.category.value, set()).add(
            assignment.image_id)
    per_category = OrderedDict()
    for category in EVALUATED_CATEGORIES:
        if images.get(category):
            per_category[category] = _subset_aps(outcomes, gt_pairs,
                                                 images[category])
    per_group = OrderedDict()
    for group, categories in _GROUPS.items():
        group_images = set()
        for category in categories:
            group_images.update(images.get(category, ()))
        per_group[group] = _mean_ap(
            _subset_aps(outcomes, gt_pairs, group_images)) \
            if group_images else None

    report = EvalReport(model_name, per_class, per_category, per_group,
                        settings)
    logger.info("Evaluated %s: %d predictions, %d classes, mAP %s",
                model_name, len(predictions), len(per_class),
                report.map_overall)
    return report
