# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Training-frequency and object-conditioned verb statistics, joined with
per-class AP of one or more evaluated models.
"""

from __future__ import absolute_import
from collections import OrderedDict, namedtuple
import logging
import math

from scipy.stats import spearmanr

from hoidiag.exceptions import HoiDiagException, VocabularyError

logger = logging.getLogger(__name__)

DEFAULT_TOP_K = 10
DEFAULT_MIN_TEST_INSTANCES = 5

#: Objects whose verb distributions are tabulated when none is requested
DEFAULT_BIAS_OBJECTS = ("horse", "sports_ball", "skateboard", "bicycle")

#: Categories tabulated when none is requested
DEFAULT_BIAS_CATEGORIES = ("A", "B", "C", "D", "SPSO", "SPMO")

TopKRow = namedtuple("TopKRow", ["hoi_id", "train_count", "test_count",
                                 "ap"])
ObjectBiasRow = namedtuple("ObjectBiasRow", ["verb_id", "hoi_id",
                                             "train_count", "share",
                                             "test_count", "ap"])


class FrequencyTable(object):
    """
    Training and per-category test counts of HOI classes, and the training
    verb distribution of every object.
    """

    def __init__(self, vocabulary, train_counts, test_counts, verb_counts,
                 include_no_interaction=False):
        """
        Constructor parameters:

        :param hoidiag.Vocabulary vocabulary: the shared vocabulary
        :param dict train_counts: hoi_id -> training instances
        :param dict test_counts: category value -> (hoi_id -> test instances)
        :param dict verb_counts: object_id -> (verb_id -> training instances)
        :param bool include_no_interaction: whether ``no_interaction`` takes
            part in the verb distributions
        """
        self._vocabulary = vocabulary
        self._train_counts = train_counts
        self._test_counts = test_counts
        self._verb_counts = verb_counts
        self._include_no_interaction = include_no_interaction
        self._shares = {}
        for object_id, counts in verb_counts.items():
            total = sum(counts.values())
            if total:
                self._shares[object_id] = dict(
                    (verb_id, count / total)
                    for verb_id, count in counts.items())

    @property
    def vocabulary(self):
        """
        The shared :class:`hoidiag.Vocabulary`
        """
        return self._vocabulary

    @property
    def include_no_interaction(self):
        """
        Whether ``no_interaction`` takes part in the verb distributions
        """
        return self._include_no_interaction

    def train_count(self, hoi_id):
        """
        Training instances of an HOI class
        """
        return self._train_counts.get(hoi_id, 0)

    def test_count(self, category, hoi_id):
        """
        Test instances of an HOI class within a category
        """
        return self._test_counts.get(category, {}).get(hoi_id, 0)

    def test_counts(self, category):
        """
        Dictionary of hoi_id -> test instances within a category
        """
        return dict(self._test_counts.get(category, {}))

    def verb_counts(self, object_id):
        """
        Dictionary of verb_id -> training instances for an object
        """
        return dict(self._verb_counts.get(object_id, {}))

    def verb_shares(self, object_id):
        """
        Dictionary of verb_id -> share of the object's training instances,
        or `None` when the object has no training instance
        """
        shares = self._shares.get(object_id)
        return None if shares is None else dict(shares)

    @property
    def objects_without_training(self):
        """
        Objects whose verb distribution is undefined, ascending
        """
        return sorted(oid for oid, _ in self._vocabulary.objects
                      if oid not in self._shares)


def build_frequencies(train, test, assignments, include_no_interaction=False):
    """
    Count training instances per HOI class and per (object, verb), and test
    instances per category.

    Training counts include invisible annotations. Verb distributions leave
    ``no_interaction`` out unless `include_no_interaction` is set. Test
    counts cover every annotation of the images assigned to each category.

    :param hoidiag.Dataset train: training ground truth
    :param hoidiag.Dataset test: test ground truth
    :param assignments: iterable of :class:`hoidiag.CategoryAssignment` for
        the test images
    :param bool include_no_interaction: keep ``no_interaction`` in the verb
        distributions
    :return: the :class:`FrequencyTable`
    :raise VocabularyError: if the datasets do not share one vocabulary
    """
    vocab = train.vocabulary
    if vocab != test.vocabulary:
        raise VocabularyError(
            "training and test ground truth use different vocabularies")

    train_counts = dict((hoi_id, 0) for hoi_id, _, _ in vocab.hoi_classes)
    verb_counts = dict((object_id, {}) for object_id, _ in vocab.objects)
    for image in train.images:
        for annotation in image.annotations:
            train_counts[annotation.hoi_id] += 1
            if include_no_interaction or \
                    not vocab.is_no_interaction(annotation.hoi_id):
                verb_id, object_id = vocab.hoi(annotation.hoi_id)
                counts = verb_counts[object_id]
                counts[verb_id] = counts.get(verb_id, 0) + 1

    test_counts = {}
    for assignment in assignments:
        if assignment.category.is_excluded:
            continue
        image = test.image(assignment.image_id)
        if image is None:
            continue
        counts = test_counts.setdefault(assignment.category.value, {})
        for annotation in image.annotations:
            counts[annotation.hoi_id] = counts.get(annotation.hoi_id, 0) + 1

    table = FrequencyTable(vocab, train_counts, test_counts, verb_counts,
                           include_no_interaction)
    if table.objects_without_training:
        logger.warning("%d object(s) have no training instance; their verb "
                       "shares are undefined",
                       len(table.objects_without_training))
    logger.info("Counted %d training and %d test images", len(train),
                len(test))
    return table


def _as_reports(reports):
    if reports is None:
        return []
    if hasattr(reports, "per_category_class_ap"):
        return [reports]
    return list(reports)


def _model_aps(reports, category, hoi_id):
    return OrderedDict((report.model_name, report.class_ap(category, hoi_id))
                       for report in reports)


def top_k_table(freq, reports, category, k=DEFAULT_TOP_K):
    """
    The `k` most frequent HOI classes of a category's test images.

    :param FrequencyTable freq: the frequencies
    :param reports: one :class:`hoidiag.EvalReport`, a list of them, or
        `None`
    :param str category: the category value
    :param int k: number of rows, at least 1
    :return: list of :class:`TopKRow` ordered by test count descending then
        hoi id; ``ap`` maps model name to AP (`None` when unavailable)
    :raise ValueError: if `k` < 1
    :raise HoiDiagException: if the category has no HOI instance
    """
    if k < 1:
        raise ValueError("k must be at least 1, got {}".format(k))
    counts = dict((hoi_id, count)
                  for hoi_id, count in freq.test_counts(category).items()
                  if count > 0)
    if not counts:
        raise HoiDiagException("Category {} has no HOI instances".format(
            category))
    reports = _as_reports(reports)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]
    return [TopKRow(hoi_id, freq.train_count(hoi_id), count,
                    _model_aps(reports, category, hoi_id))
            for hoi_id, count in ranked]


def object_bias_table(freq, reports, object_id, category,
                      min_test_instances=DEFAULT_MIN_TEST_INSTANCES):
    """
    The training verb distribution of an object, restricted to the verbs
    with enough test instances in a category.

    :param FrequencyTable freq: the frequencies
    :param reports: one :class:`hoidiag.EvalReport`, a list of them, or
        `None`
    :param int object_id: the object
    :param str category: the category value
    :param int min_test_instances: test-instance floor; verbs absent from
        the category are always left out
    :return: list of :class:`ObjectBiasRow` ordered by training count
        descending then verb id
    :raise VocabularyError: if the object is not in the vocabulary
    """
    vocab = freq.vocabulary
    if not vocab.has_object(object_id):
        raise VocabularyError("Unknown object id {}".format(object_id))
    if min_test_instances < 0:
        raise ValueError("min_test_instances must be non-negative")
    floor = max(min_test_instances, 1)
    reports = _as_reports(reports)
    shares = freq.verb_shares(object_id) or {}
    verb_counts = freq.verb_counts(object_id)
    rows = []
    for hoi_id in vocab.hoi_classes_of_object(object_id):
        verb_id = vocab.verb_of(hoi_id)
        if vocab.is_no_interaction_verb(verb_id) and \
                not freq.include_no_interaction:
            continue
        test_count = freq.test_count(category, hoi_id)
        if test_count < floor:
            continue
        rows.append(ObjectBiasRow(verb_id, hoi_id,
                                  verb_counts.get(verb_id, 0),
                                  shares.get(verb_id),
                                  test_count,
                                  _model_aps(reports, category, hoi_id)))
    rows.sort(key=lambda row: (-row.train_count, row.verb_id))
    return rows


def spearman(x, y):
    """
    Spearman rank correlation of two equally long sequences.

    :return: rho, or `None` with fewer than two pairs, a constant input or
        missing values
    """
    pairs = [(a, b) for a, b in zip(x, y) if a is not None and b is not None]
    if len(pairs) < 2:
        return None
    xs, ys = zip(*pairs)
    if len(set(xs)) < 2 or len(set(ys)) < 2:
        return None
    rho = spearmanr(xs, ys)[0]
    rho = float(rho)
    return None if math.isnan(rho) else rho


def resolve_bias_objects(vocab, names=None):
    """
    Map object names to ids, defaulting to :data:`DEFAULT_BIAS_OBJECTS`
    present in the vocabulary, or every object when none of them is.

    :raise VocabularyError: if an explicitly requested name is unknown
    """
    if names:
        ids = []
        for name in names:
            object_id = vocab.object_by_name(name)
            if object_id is None:
                raise VocabularyError("Unknown object '{}'".format(name))
            ids.append(object_id)
        return ids
    ids = [vocab.object_by_name(name) for name in DEFAULT_BIAS_OBJECTS
           if vocab.object_by_name(name) is not None]
    return ids or [object_id for object_id, _ in vocab.objects]


def bias_report(freq, reports, categories, object_ids, k=DEFAULT_TOP_K,
                min_test_instances=DEFAULT_MIN_TEST_INSTANCES):
    """
    Build the ``topk.csv``, ``bias.csv`` and ``bias.json`` content.

    Categories without HOI instances are skipped with a warning.

    :return: ``(topk_rows, bias_rows, summary)`` where the row lists are
        dictionaries ready for CSV output and `summary` holds the Spearman
        rho of training count versus AP per (category, object, model)
    """
    vocab = freq.vocabulary
    reports = _as_reports(reports)
    models = [report.model_name for report in reports]
    topk_rows = []
    bias_rows = []
    correlations = []
    for category in categories:
        try:
            top = top_k_table(freq, reports, category, k)
        except HoiDiagException as ex:
            logger.warning("%s", ex)
            continue
        for rank, row in enumerate(top, 1):
            entry = OrderedDict([("category", category), ("rank", rank),
                                 ("hoi_id", row.hoi_id),
                                 ("hoi", vocab.hoi_label(row.hoi_id)),
                                 ("train_count", row.train_count),
                                 ("test_count", row.test_count)])
            for model in models:
                entry["ap_" + model] = row.ap[model]
            topk_rows.append(entry)
        for object_id in object_ids:
            rows = object_bias_table(freq, reports, object_id, category,
                                     min_test_instances)
            for row in rows:
                entry = OrderedDict([
                    ("category", category),
                    ("object", vocab.object_name(object_id)),
                    ("verb", vocab.verb_name(row.verb_id)),
                    ("hoi_id", row.hoi_id),
                    ("train_count", row.train_count),
                    ("share", row.share),
                    ("test_count", row.test_count)])
                for model in models:
                    entry["ap_" + model] = row.ap[model]
                bias_rows.append(entry)
            for model in models:
                correlations.append(OrderedDict([
                    ("category", category),
                    ("object", vocab.object_name(object_id)),
                    ("model", model),
                    ("rows", len(rows)),
                    ("spearman_rho", spearman(
                        [row.train_count for row in rows],
                        [row.ap[model] for row in rows]))]))
    summary = OrderedDict([("models", models),
                           ("categories", list(categories)),
                           ("objects", [vocab.object_name(object_id)
                                        for object_id in object_ids]),
                           ("top_k", k),
                           ("min_test_instances", min_test_instances),
                           ("correlations", correlations)])
    return topk_rows, bias_rows, summary
