# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Scene categorization: filtering of out-of-scope images, assignment of each
kept image to one diagnostic category, majority-vote merging of annotator
label files and per-category statistics.

Single-person scenes are ``SPSO`` (one object instance) or ``SPMO`` (several
object instances). Multi-person scenes cross the object relation with the
interaction relation:

==============================  ====================  =====================
object relation                 same interaction      different interaction
==============================  ====================  =====================
same object instance            ``A``                 ``B``
same label, other instances     ``C``                 ``D``
different labels                ``E``                 ``F``
==============================  ====================  =====================
"""

from __future__ import absolute_import
from collections import Counter, OrderedDict
import itertools
import logging

from hoidiag._hoi_utils import HoiUtils
from hoidiag.annotation import load_json
from hoidiag.exceptions import ConsensusError, InvariantViolationError, \
    SchemaError
from hoidiag.instance_resolver import DEFAULT_MERGE_IOU, Relation, \
    RelationBasis, interaction_relation, resolve_instances

logger = logging.getLogger(__name__)


class SceneCategory(object):
    """
    A diagnostic scene category, with an exclusion reason when the value is
    :data:`EXCLUDED`.
    """

    SPSO = "SPSO"
    SPMO = "SPMO"
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    EXCLUDED = "Excluded"

    #: Reasons for :data:`EXCLUDED`
    ONLY_NO_INTERACTION = "OnlyNoInteraction"
    ALL_INVISIBLE = "AllInvisible"
    MIXED_CONFIGURATION = "MixedConfiguration"
    NO_CONSENSUS = "NoConsensus"

    SINGLE_PERSON = (SPSO, SPMO)
    MULTI_PERSON = (A, B, C, D, E, F)
    VALUES = SINGLE_PERSON + MULTI_PERSON + (EXCLUDED,)
    REASONS = (ONLY_NO_INTERACTION, ALL_INVISIBLE, MIXED_CONFIGURATION,
               NO_CONSENSUS)

    #: Label used for excluded images in annotator label files
    EXCLUDED_LABEL = "EXCLUDED"

    __slots__ = ("_value", "_exclusion_reason")

    def __init__(self, value, exclusion_reason=None):
        if value not in self.VALUES:
            raise ValueError("unknown scene category '{}'".format(value))
        if (value == self.EXCLUDED) != (exclusion_reason is not None):
            raise ValueError("exclusion reason must be given exactly for "
                             "Excluded, got {} / {}".format(value,
                                                             exclusion_reason))
        if exclusion_reason is not None and \
                exclusion_reason not in self.REASONS:
            raise ValueError("unknown exclusion reason '{}'".format(
                exclusion_reason))
        self._value = value
        self._exclusion_reason = exclusion_reason

    @staticmethod
    def excluded(reason):
        """
        Returns the Excluded category with the given reason
        """
        return SceneCategory(SceneCategory.EXCLUDED, reason)

    @staticmethod
    def from_label(label):
        """
        Returns the category named by an annotator label file entry
        (``"A"`` ... ``"F"``, ``"SPSO"``, ``"SPMO"`` or ``"EXCLUDED"``).

        :raise ValueError: for any other label
        """
        if label == SceneCategory.EXCLUDED_LABEL:
            return SceneCategory.excluded(SceneCategory.MIXED_CONFIGURATION)
        if label in SceneCategory.SINGLE_PERSON + SceneCategory.MULTI_PERSON:
            return SceneCategory(label)
        raise ValueError("unknown category label {!r}".format(label))

    @property
    def value(self):
        """
        The category value
        """
        return self._value

    @property
    def exclusion_reason(self):
        """
        The exclusion reason, or `None` for kept images
        """
        return self._exclusion_reason

    @property
    def is_excluded(self):
        """
        Whether the image is excluded from the categorized subsets
        """
        return self._value == self.EXCLUDED

    @property
    def label(self):
        """
        The label-file spelling of the category
        """
        return self.EXCLUDED_LABEL if self.is_excluded else self._value

    def __eq__(self, other):
        return isinstance(other, SceneCategory) and \
            (self._value, self._exclusion_reason) == \
            (other._value, other._exclusion_reason)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._value, self._exclusion_reason))

    def __repr__(self):
        if self.is_excluded:
            return "SceneCategory(Excluded({}))".format(self._exclusion_reason)
        return "SceneCategory({})".format(self._value)


class AssignmentSource(object):
    """
    Where a category assignment came from
    """
    RULE_BASED = "RuleBased"
    CONSENSUS = "Consensus"


class CategoryAssignment(object):
    """
    The category assigned to one image, with the instance counts it was
    derived from.
    """

    def __init__(self, image_id, category, person_count=0,
                 object_instance_count=0, source=AssignmentSource.RULE_BASED,
                 hoi_count=0):
        """
        Constructor parameters:

        :param str image_id: the image
        :param SceneCategory category: the assigned category
        :param int person_count: interacting person instances
        :param int object_instance_count: interacted object instances
        :param str source: one of the :class:`AssignmentSource` values
        :param int hoi_count: annotations kept under the categorization
            flags
        :raise InvariantViolationError: if the person count contradicts the
            category
        """
        if not category.is_excluded:
            if person_count == 1 and \
                    category.value not in SceneCategory.SINGLE_PERSON:
                raise InvariantViolationError(
                    "single-person image must be SPSO or SPMO",
                    "{} is {}".format(image_id, category.value))
            if person_count >= 2 and \
                    category.value not in SceneCategory.MULTI_PERSON:
                raise InvariantViolationError(
                    "multi-person image must be in A-F",
                    "{} is {}".format(image_id, category.value))
        self._image_id = image_id
        self._category = category
        self._person_count = person_count
        self._object_instance_count = object_instance_count
        self._source = source
        self._hoi_count = hoi_count

    @property
    def image_id(self):
        """
        The image
        """
        return self._image_id

    @property
    def category(self):
        """
        The assigned :class:`SceneCategory`
        """
        return self._category

    @property
    def person_count(self):
        """
        Number of interacting person instances
        """
        return self._person_count

    @property
    def object_instance_count(self):
        """
        Number of interacted object instances
        """
        return self._object_instance_count

    @property
    def source(self):
        """
        One of the :class:`AssignmentSource` values
        """
        return self._source

    @property
    def hoi_count(self):
        """
        Number of annotations kept under the categorization flags
        """
        return self._hoi_count

    def to_dict(self):
        """
        The JSON representation written to ``categories.json``
        """
        return {"image_id": self._image_id,
                "category": self._category.value,
                "exclusion_reason": self._category.exclusion_reason,
                "person_count": self._person_count,
                "object_instance_count": self._object_instance_count,
                "hoi_count": self._hoi_count,
                "source": self._source}

    @staticmethod
    def from_dict(data):
        """
        Create an assignment from its ``categories.json`` representation
        """
        try:
            return CategoryAssignment(
                data["image_id"],
                SceneCategory(data["category"], data.get("exclusion_reason")),
                data.get("person_count", 0),
                data.get("object_instance_count", 0),
                data.get("source", AssignmentSource.RULE_BASED),
                data.get("hoi_count", 0))
        except (KeyError, TypeError, ValueError,
                InvariantViolationError) as ex:
            raise SchemaError("malformed category assignment {!r}: {}".format(
                data, ex))

    def __eq__(self, other):
        return isinstance(other, CategoryAssignment) and \
            self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._image_id, self._category))

    def __repr__(self):
        return "CategoryAssignment({!r}, {!r})".format(self._image_id,
                                                       self._category)


class CategorizationSettings(object):
    """
    Flags steering instance resolution for categorization.
    """

    def __init__(self, merge_iou=DEFAULT_MERGE_IOU, include_invisible=False,
                 include_no_interaction=False,
                 relation_basis=RelationBasis.PERSON):
        self.merge_iou = merge_iou
        self.include_invisible = include_invisible
        self.include_no_interaction = include_no_interaction
        self.relation_basis = relation_basis

    def to_dict(self):
        """
        The settings as recorded in report manifests
        """
        return {"merge_iou": self.merge_iou,
                "include_invisible": self.include_invisible,
                "include_no_interaction": self.include_no_interaction,
                "relation_basis": self.relation_basis}


class FilterResult(object):
    """
    Outcome of :func:`filter_image`
    """
    KEEP = "Keep"
    DROP_ONLY_NO_INTERACTION = SceneCategory.ONLY_NO_INTERACTION
    DROP_ALL_INVISIBLE = SceneCategory.ALL_INVISIBLE


def filter_image(image, vocab):
    """
    Decide whether an image is in scope. Images whose annotations are all
    ``no_interaction`` are dropped first; of the rest, images whose
    annotations are all invisible are dropped. An image without annotations
    counts as ``no_interaction`` only.

    :param hoidiag.GroundTruthImage image: the image
    :param hoidiag.Vocabulary vocab: the vocabulary
    :return: one of the :class:`FilterResult` values
    """
    annotations = image.annotations
    if all(vocab.is_no_interaction(a.hoi_id) for a in annotations):
        return FilterResult.DROP_ONLY_NO_INTERACTION
    if all(a.invisible for a in annotations):
        return FilterResult.DROP_ALL_INVISIBLE
    return FilterResult.KEEP


_CELLS = {
    ("instance", Relation.SAME): SceneCategory.A,
    ("instance", Relation.DIFFERENT): SceneCategory.B,
    ("label", Relation.SAME): SceneCategory.C,
    ("label", Relation.DIFFERENT): SceneCategory.D,
    ("different", Relation.SAME): SceneCategory.E,
    ("different", Relation.DIFFERENT): SceneCategory.F
}


def _object_relation(graph, person_ids):
    """
    Returns ``"instance"``, ``"label"``, ``"different"`` or `None` when the
    persons' object sets match no single cell.
    """
    instance_sets = [graph.objects_of(pid) for pid in person_ids]
    label_sets = [graph.labels_of(pid) for pid in person_ids]
    if len(instance_sets[0]) == 1 and \
            all(s == instance_sets[0] for s in instance_sets):
        return "instance"
    if any(a & b for a, b in itertools.combinations(instance_sets, 2)):
        return None
    if len(label_sets[0]) == 1 and all(s == label_sets[0] for s in label_sets):
        return "label"
    if all(not (a & b) for a, b in itertools.combinations(label_sets, 2)):
        return "different"
    return None


def _interaction_axis(graph, person_ids, basis):
    for person1, person2 in itertools.combinations(person_ids, 2):
        relation = interaction_relation(graph, person1, person2, basis)
        if relation == Relation.NO_SHARED_BASIS and \
                basis != RelationBasis.PERSON:
            relation = interaction_relation(graph, person1, person2,
                                            RelationBasis.PERSON)
        if relation != Relation.SAME:
            return Relation.DIFFERENT
    return Relation.SAME


def categorize(graph, relation_basis=RelationBasis.PERSON):
    """
    Assign a scene graph to its diagnostic category.

    A graph left empty by the categorization flags is excluded with the
    dominant filter reason (``no_interaction`` wins ties). Multi-person
    configurations matching no single cell, for example two persons sharing
    an instance while a third uses another label, are excluded as
    ``MixedConfiguration``.

    :param hoidiag.SceneGraph graph: the scene graph
    :param str relation_basis: basis for :func:`interaction_relation`
    :return: the rule-based :class:`CategoryAssignment`
    """
    persons = [person.instance_id for person in graph.persons]
    counts = dict(person_count=len(persons),
                  object_instance_count=len(graph.objects),
                  source=AssignmentSource.RULE_BASED,
                  hoi_count=len(graph.annotation_pairs))

    if graph.is_empty():
        reason = SceneCategory.ONLY_NO_INTERACTION \
            if graph.excluded_no_interaction >= graph.excluded_invisible \
            else SceneCategory.ALL_INVISIBLE
        return CategoryAssignment(graph.image_id,
                                  SceneCategory.excluded(reason), **counts)

    if len(persons) == 1:
        value = SceneCategory.SPSO if len(graph.objects) == 1 \
            else SceneCategory.SPMO
        return CategoryAssignment(graph.image_id, SceneCategory(value),
                                  **counts)

    object_axis = _object_relation(graph, persons)
    if object_axis is None:
        category = SceneCategory.excluded(SceneCategory.MIXED_CONFIGURATION)
    else:
        category = SceneCategory(_CELLS[(
            object_axis, _interaction_axis(graph, persons, relation_basis))])
    return CategoryAssignment(graph.image_id, category, **counts)


def categorize_image(image, vocab, settings=None):
    """
    Filter, resolve and categorize one image.

    :param hoidiag.GroundTruthImage image: the image
    :param hoidiag.Vocabulary vocab: the vocabulary
    :param CategorizationSettings settings: resolution flags
    :return: the rule-based :class:`CategoryAssignment`
    """
    settings = settings or CategorizationSettings()
    decision = filter_image(image, vocab)
    if decision != FilterResult.KEEP:
        return CategoryAssignment(image.image_id,
                                  SceneCategory.excluded(decision))
    graph = resolve_instances(image, vocab, settings.merge_iou,
                              settings.include_invisible,
                              settings.include_no_interaction)
    return categorize(graph, settings.relation_basis)


def categorize_dataset(dataset, settings=None, pool=None):
    """
    Categorize every image of a dataset.

    :param hoidiag.Dataset dataset: the dataset
    :param CategorizationSettings settings: resolution flags
    :param pool: optional :class:`hoidiag._thread_pool.WorkerPool`
    :return: list of :class:`CategoryAssignment`, in dataset order
    """
    settings = settings or CategorizationSettings()
    vocab = dataset.vocabulary

    def _categorize(image):
        return categorize_image(image, vocab, settings)

    if pool is None:
        assignments = [_categorize(image) for image in dataset.images]
    else:
        assignments = pool.map_ordered(_categorize, dataset.images)
    logger.info("Categorized %d images", len(assignments))
    return assignments


def parse_label_file(path):
    """
    Read an annotator label file mapping image ids to category labels.

    :param str path: path of the label file
    :return: ordered dictionary of image id -> :class:`SceneCategory`
    :raise ConsensusError: if the file is not a mapping or a label is
        unknown
    """
    data = load_json(path)
    if not isinstance(data, dict):
        raise ConsensusError("{}: expected an object mapping image ids to "
                             "labels".format(path))
    labels = OrderedDict()
    for image_id, label in data.items():
        try:
            labels[image_id] = SceneCategory.from_label(label)
        except ValueError as ex:
            raise ConsensusError("{}: image {}: {}".format(path, image_id, ex))
    return labels


def consensus(label_maps):
    """
    Merge annotator labels by strict majority vote.

    :param label_maps: list of mappings image id -> :class:`SceneCategory`,
        one per annotator, all covering the same images
    :return: ordered dictionary of image id -> :class:`CategoryAssignment`
        with source ``Consensus``, in the order of the first mapping.
        Instance counts are zero until :func:`reconcile` fills them.
    :raise ConsensusError: if no mapping is given or the image sets differ
    """
    if not label_maps:
        raise ConsensusError("at least one label file is required")
    image_ids = set(label_maps[0])
    for position, labels in enumerate(label_maps[1:], 1):
        if set(labels) != image_ids:
            difference = sorted(image_ids.symmetric_difference(labels))
            raise ConsensusError(
                "label file #{} covers different images than label file #0 "
                "(e.g. {})".format(position, ", ".join(difference[:5])))

    voters = len(label_maps)
    merged = OrderedDict()
    for image_id in label_maps[0]:
        votes = Counter(labels[image_id] for labels in label_maps)
        winner, count = votes.most_common(1)[0]
        if count * 2 <= voters:
            winner = SceneCategory.excluded(SceneCategory.NO_CONSENSUS)
        merged[image_id] = CategoryAssignment(
            image_id, winner, source=AssignmentSource.CONSENSUS)
    logger.info("Merged %d label files over %d images", voters, len(merged))
    return merged


def reconcile(rule_based, consensus_assignments):
    """
    Combine rule-based assignments with a consensus: the consensus category
    wins wherever one exists.

    Instance and HOI counts always come from the rule-based assignment; the
    person and object counts are kept only when they agree with the
    consensus category.

    :param rule_based: list of rule-based :class:`CategoryAssignment`
    :param consensus_assignments: mapping image id -> consensus
        :class:`CategoryAssignment`
    :return: ``(assignments, disagreements)`` where disagreements are
        ``(image_id, rule label, consensus label)`` tuples
    """
    final = []
    disagreements = []
    for assignment in rule_based:
        voted = consensus_assignments.get(assignment.image_id)
        if voted is None:
            final.append(assignment)
            continue
        if voted.category != assignment.category:
            disagreements.append((assignment.image_id,
                                  _describe(assignment.category),
                                  _describe(voted.category)))
        value = voted.category.value
        consistent = voted.category.is_excluded or \
            (assignment.person_count == 1 and
             value in SceneCategory.SINGLE_PERSON) or \
            (assignment.person_count >= 2 and
             value in SceneCategory.MULTI_PERSON)
        final.append(CategoryAssignment(
            assignment.image_id, voted.category,
            assignment.person_count if consistent else 0,
            assignment.object_instance_count if consistent else 0,
            AssignmentSource.CONSENSUS, assignment.hoi_count))
    unknown = set(consensus_assignments) - \
        set(assignment.image_id for assignment in rule_based)
    if unknown:
        logger.warning("%d labelled images are absent from the ground truth",
                       len(unknown))
    logger.info("Consensus overrides %d rule-based categories",
                len(disagreements))
    return final, disagreements


def _describe(category):
    if category.is_excluded:
        return "Excluded({})".format(category.exclusion_reason)
    return category.value


class CategoryStatistics(object):
    """
    Image and HOI counts per category, with single-person, multi-person and
    excluded subtotals.
    """

    #: Row order of the statistics table
    ORDER = SceneCategory.VALUES

    def __init__(self, assignments):
        self._rows = OrderedDict((value, [0, 0]) for value in self.ORDER)
        self._reasons = OrderedDict((reason, 0)
                                    for reason in SceneCategory.REASONS)
        for assignment in assignments:
            row = self._rows[assignment.category.value]
            row[0] += 1
            row[1] += assignment.hoi_count
            if assignment.category.is_excluded:
                self._reasons[assignment.category.exclusion_reason] += 1

    def count(self, value):
        """
        Returns ``(image count, HOI count)`` of a category value
        """
        return tuple(self._rows[value])

    def _subtotal(self, values):
        return (sum(self._rows[v][0] for v in values),
                sum(self._rows[v][1] for v in values))

    @property
    def single_person(self):
        """
        ``(image count, HOI count)`` over SPSO and SPMO
        """
        return self._subtotal(SceneCategory.SINGLE_PERSON)

    @property
    def multi_person(self):
        """
        ``(image count, HOI count)`` over categories A-F
        """
        return self._subtotal(SceneCategory.MULTI_PERSON)

    @property
    def excluded_by_reason(self):
        """
        Excluded image counts per exclusion reason
        """
        return dict(self._reasons)

    @property
    def total(self):
        """
        ``(image count, HOI count)`` over every image
        """
        return self._subtotal(self.ORDER)

    def rows(self):
        """
        Table rows ``(category, images, hois)``, categories first, then the
        ``single_person``, ``multi_person`` and ``total`` subtotals
        """
        rows = [(value, images, hois)
                for value, (images, hois) in self._rows.items()]
        rows.append(("single_person",) + self.single_person)
        rows.append(("multi_person",) + self.multi_person)
        rows.append(("total",) + self.total)
        return rows

    def to_dict(self):
        """
        The ``stats`` block of ``categories.json``
        """
        return {
            "categories": OrderedDict(
                (value, {"images": images, "hois": hois})
                for value, (images, hois) in self._rows.items()),
            "single_person": dict(zip(("images", "hois"),
                                      self.single_person)),
            "multi_person": dict(zip(("images", "hois"), self.multi_person)),
            "excluded_by_reason": self.excluded_by_reason,
            "total": dict(zip(("images", "hois"), self.total))
        }


def category_statistics(assignments):
    """
    Compute per-category image and HOI counts.

    :param assignments: iterable of :class:`CategoryAssignment`
    :return: the :class:`CategoryStatistics`
    """
    return CategoryStatistics(assignments)


def images_by_category(assignments):
    """
    Group image ids by category value.

    :param assignments: iterable of :class:`CategoryAssignment`
    :return: dictionary of category value -> set of image ids
    """
    groups = {}
    for assignment in assignments:
        groups.setdefault(assignment.category.value, set()).add(
            assignment.image_id)
    return groups


def dump_assignments(path, assignments, disagreements=(), scene_graphs=None,
                     manifest=None):
    """
    Atomically write ``categories.json``.

    :param str path: destination file
    :param assignments: list of :class:`CategoryAssignment`
    :param disagreements: ``(image_id, rule, consensus)`` tuples
    :param scene_graphs: optional list of scene graphs to embed
    :param dict manifest: optional provenance block
    """
    report = OrderedDict()
    if manifest is not None:
        report["manifest"] = manifest
    report["assignments"] = [a.to_dict() for a in assignments]
    report["stats"] = category_statistics(assignments).to_dict()
    report["disagreements"] = [
        {"image_id": image_id, "rule_based": rule, "consensus": voted}
        for image_id, rule, voted in disagreements]
    if scene_graphs is not None:
        report["scene_graphs"] = [graph.to_dict() for graph in scene_graphs]
    HoiUtils.save_json(path, report)


def load_assignments(path):
    """
    Read the assignments of a ``categories.json`` report.

    :param str path: path of the report
    :return: list of :class:`CategoryAssignment`
    """
    data = load_json(path)
    if not isinstance(data, dict) or \
            not isinstance(data.get("assignments"), list):
        raise SchemaError("{}: expected an 'assignments' list".format(path))
    return [CategoryAssignment.from_dict(entry)
            for entry in data["assignments"]]
