# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Resolution of per-HOI annotation boxes into person and object instances.

HICO-DET annotates every HOI with its own pair of boxes and carries no
instance identity, so one person doing three things appears as three human
boxes. :func:`resolve_instances` deduplicates identical boxes and clusters
the rest by single-link union-find on IoU, producing the
:class:`SceneGraph` on which scene categorization operates.
"""

from __future__ import absolute_import
import logging

from hoidiag.annotation import iou

logger = logging.getLogger(__name__)

DEFAULT_MERGE_IOU = 0.7


class Relation(object):
    """
    Outcomes of comparing the interactions of two persons
    """
    SAME = "Same"
    DIFFERENT = "Different"
    NO_SHARED_BASIS = "NoSharedBasis"


class RelationBasis(object):
    """
    What two persons' verb sets are compared over in
    :func:`interaction_relation`
    """
    #: Union of each person's verbs over all of their objects
    PERSON = "person"
    #: Verbs restricted to the object instances both persons interact with
    OBJECT = "object"

    ALL = (PERSON, OBJECT)


class _UnionFind(object):
    def __init__(self, size):
        self._parent = list(range(size))

    def find(self, i):
        while self._parent[i] != i:
            # Path halving
            self._parent[i] = self._parent[self._parent[i]]
            i = self._parent[i]
        return i

    def union(self, i, j):
        root_i, root_j = self.find(i), self.find(j)
        if root_i != root_j:
            # The lower index stays root so roots follow first appearance
            if root_j < root_i:
                root_i, root_j = root_j, root_i
            self._parent[root_j] = root_i


class PersonInstance(object):
    """
    A distinct person in an image, backed by one or more annotation boxes.
    """

    def __init__(self, instance_id, member_boxes):
        self._instance_id = instance_id
        self._member_boxes = tuple(member_boxes)

    @property
    def instance_id(self):
        """
        The instance id, assigned in first-appearance order
        """
        return self._instance_id

    @property
    def member_boxes(self):
        """
        One box per contributing annotation, in annotation order
        """
        return self._member_boxes

    @property
    def canonical_box(self):
        """
        The first member box in annotation order
        """
        return self._member_boxes[0]

    def to_dict(self):
        """
        The JSON representation used when scene graphs are dumped
        """
        return {"instance_id": self._instance_id,
                "canonical_box": self.canonical_box.to_list(),
                "member_count": len(self._member_boxes)}


class ObjectInstance(PersonInstance):
    """
    A distinct object in an image. All member boxes share one object id.
    """

    def __init__(self, instance_id, object_id, member_boxes):
        super(ObjectInstance, self).__init__(instance_id, member_boxes)
        self._object_id = object_id

    @property
    def object_id(self):
        """
        The object category of every member box
        """
        return self._object_id

    def to_dict(self):
        data = super(ObjectInstance, self).to_dict()
        data["object_id"] = self._object_id
        return data


class SceneGraph(object):
    """
    The person and object instances of one image together with the verbs
    linking each (person, object) instance pair.
    """

    def __init__(self, image_id, persons, objects, pair_verbs,
                 annotation_pairs=(), excluded_no_interaction=0,
                 excluded_invisible=0):
        """
        Constructor parameters:

        :param str image_id: the image
        :param persons: list of :class:`PersonInstance`
        :param objects: list of :class:`ObjectInstance`
        :param dict pair_verbs: ``(person_id, object_id) -> set of verb ids``
        :param annotation_pairs: ``(annotation_index, person_id, object_id)``
            for every included annotation
        :param int excluded_no_interaction: annotations left out because
            they are ``no_interaction``
        :param int excluded_invisible: annotations left out because they
            are invisible
        """
        self._image_id = image_id
        self._persons = tuple(persons)
        self._objects = tuple(objects)
        self._pair_verbs = dict((key, frozenset(verbs))
                                for key, verbs in pair_verbs.items())
        self._annotation_pairs = tuple(annotation_pairs)
        self._excluded_no_interaction = excluded_no_interaction
        self._excluded_invisible = excluded_invisible
        self._objects_by_id = dict((obj.instance_id, obj)
                                   for obj in self._objects)
        self._person_ids = set(person.instance_id for person in self._persons)

    @property
    def image_id(self):
        """
        The image the graph was resolved from
        """
        return self._image_id

    @property
    def persons(self):
        """
        Tuple of :class:`PersonInstance`, ordered by instance id
        """
        return self._persons

    @property
    def objects(self):
        """
        Tuple of :class:`ObjectInstance`, ordered by instance id
        """
        return self._objects

    @property
    def pair_verbs(self):
        """
        Dictionary of ``(person_id, object_id) -> frozenset of verb ids``
        """
        return self._pair_verbs

    @property
    def annotation_pairs(self):
        """
        Tuple of ``(annotation_index, person_id, object_id)``, one per
        included annotation
        """
        return self._annotation_pairs

    @property
    def excluded_no_interaction(self):
        """
        Number of annotations left out as ``no_interaction``
        """
        return self._excluded_no_interaction

    @property
    def excluded_invisible(self):
        """
        Number of annotations left out as invisible
        """
        return self._excluded_invisible

    def is_empty(self):
        """
        Whether no annotation contributed to the graph
        """
        return not self._pair_verbs

    def has_person(self, person_id):
        """
        Whether `person_id` names a person instance of this graph
        """
        return person_id in self._person_ids

    def object_instance(self, object_instance_id):
        """
        Returns the :class:`ObjectInstance` with the given instance id
        """
        return self._objects_by_id[object_instance_id]

    def objects_of(self, person_id):
        """
        Returns the set of object instance ids `person_id` interacts with
        """
        return frozenset(oid for (pid, oid) in self._pair_verbs
                         if pid == person_id)

    def labels_of(self, person_id):
        """
        Returns the set of object categories `person_id` interacts with
        """
        return frozenset(self._objects_by_id[oid].object_id
                         for oid in self.objects_of(person_id))

    def verbs_of(self, person_id):
        """
        Returns the union of the verbs of `person_id` over all its objects
        """
        verbs = set()
        for (pid, _), pair in self._pair_verbs.items():
            if pid == person_id:
                verbs.update(pair)
        return frozenset(verbs)

    def to_dict(self):
        """
        The JSON representation used by ``--dump-scene-graphs``
        """
        return {
            "image_id": self._image_id,
            "persons": [person.to_dict() for person in self._persons],
            "objects": [obj.to_dict() for obj in self._objects],
            "pairs": [{"person": pid, "object": oid,
                       "verbs": sorted(self._pair_verbs[(pid, oid)])}
                      for pid, oid in sorted(self._pair_verbs)]
        }


def _cluster(keys, boxes, merge_iou):
    """
    Cluster distinct boxes by single-link union-find.

    :param keys: distinct box keys, in first-appearance order
    :param boxes: the box of each key
    :param float merge_iou: merge threshold; at 1.0 only identical boxes
        (already one key) share an instance
    :return: dictionary of key -> cluster number, numbered in first-appearance
        order
    """
    union_find = _UnionFind(len(keys))
    if merge_iou < 1.0:
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                if iou(boxes[i], boxes[j]) >= merge_iou:
                    union_find.union(i, j)
    numbering = {}
    clusters = {}
    for i, key in enumerate(keys):
        root = union_find.find(i)
        if root not in numbering:
            numbering[root] = len(numbering)
        clusters[key] = numbering[root]
    return clusters


def _distinct(keys_in_order):
    seen = set()
    distinct = []
    for key in keys_in_order:
        if key not in seen:
            seen.add(key)
            distinct.append(key)
    return distinct


def resolve_instances(image, vocab, merge_iou=DEFAULT_MERGE_IOU,
                      include_invisible=False, include_no_interaction=False):
    """
    Build the :class:`SceneGraph` of an image.

    Boxes are first deduplicated by exact coordinate equality, then
    clustered by single-link union-find on ``iou >= merge_iou``: human boxes
    with human boxes, object boxes only with object boxes of the same object
    category. Instance ids are assigned in first-appearance order.

    :param hoidiag.GroundTruthImage image: the image
    :param hoidiag.Vocabulary vocab: vocabulary of the image's HOI ids
    :param float merge_iou: merge threshold in ``[0.5, 1.0]``
    :param bool include_invisible: keep annotations marked invisible
    :param bool include_no_interaction: keep ``no_interaction`` annotations
    :return: the :class:`SceneGraph`
    :raise ValueError: if `merge_iou` is out of range
    """
    if not 0.5 <= merge_iou <= 1.0:
        raise ValueError("merge_iou must lie in [0.5, 1.0], got {}".format(
            merge_iou))

    included = []
    excluded_no_interaction = 0
    excluded_invisible = 0
    for index, annotation in enumerate(image.annotations):
        if not include_no_interaction and \
                vocab.is_no_interaction(annotation.hoi_id):
            excluded_no_interaction += 1
        elif not include_invisible and annotation.invisible:
            excluded_invisible += 1
        else:
            included.append((index, annotation))

    human_keys = _distinct(annotation.human_box.as_tuple()
                           for _, annotation in included)
    human_boxes = {}
    for _, annotation in included:
        human_boxes.setdefault(annotation.human_box.as_tuple(),
                               annotation.human_box)
    human_cluster = _cluster(human_keys,
                             [human_boxes[key] for key in human_keys],
                             merge_iou)

    object_cluster = {}
    object_keys_by_class = {}
    object_boxes = {}
    for _, annotation in included:
        key = (vocab.object_of(annotation.hoi_id),
               annotation.object_box.as_tuple())
        object_boxes.setdefault(key, annotation.object_box)
        object_keys_by_class.setdefault(key[0], [])
        if key not in object_keys_by_class[key[0]]:
            object_keys_by_class[key[0]].append(key)
    for object_id, keys in object_keys_by_class.items():
        for key, cluster in _cluster(keys, [object_boxes[k] for k in keys],
                                     merge_iou).items():
            object_cluster[key] = (object_id, cluster)

    # Instance ids follow the first annotation touching each cluster
    person_ids = {}
    object_ids = {}
    person_members = []
    object_members = []
    object_classes = []
    pair_verbs = {}
    annotation_pairs = []
    for index, annotation in included:
        h_cluster = human_cluster[annotation.human_box.as_tuple()]
        if h_cluster not in person_ids:
            person_ids[h_cluster] = len(person_ids)
            person_members.append([])
        pid = person_ids[h_cluster]
        person_members[pid].append(annotation.human_box)

        object_id = vocab.object_of(annotation.hoi_id)
        o_cluster = object_cluster[(object_id,
                                    annotation.object_box.as_tuple())]
        if o_cluster not in object_ids:
            object_ids[o_cluster] = len(object_ids)
            object_members.append([])
            object_classes.append(object_id)
        oid = object_ids[o_cluster]
        object_members[oid].append(annotation.object_box)

        pair_verbs.setdefault((pid, oid), set()).add(
            vocab.verb_of(annotation.hoi_id))
        annotation_pairs.append((index, pid, oid))

    graph = SceneGraph(
        image.image_id,
        [PersonInstance(pid, members)
         for pid, members in enumerate(person_members)],
        [ObjectInstance(oid, object_classes[oid], members)
         for oid, members in enumerate(object_members)],
        pair_verbs, annotation_pairs, excluded_no_interaction,
        excluded_invisible)
    logger.debug("Resolved %s: %d persons, %d objects, %d pairs",
                 image.image_id, len(graph.persons), len(graph.objects),
                 len(graph.pair_verbs))
    return graph


def interaction_relation(graph, person1, person2, basis=RelationBasis.PERSON):
    """
    Compare the interactions of two persons of a scene graph.

    With the ``person`` basis the two persons' full verb sets (union over
    all their objects) are compared: :data:`Relation.SAME` iff they are
    equal. A strict superset is :data:`Relation.DIFFERENT`. With the
    ``object`` basis only the object instances both persons interact with
    are compared, pair by pair, and :data:`Relation.NO_SHARED_BASIS` is
    returned when they share none. A person without any pair also yields
    :data:`Relation.NO_SHARED_BASIS`.

    :param SceneGraph graph: the scene graph
    :param int person1: first person instance id
    :param int person2: second person instance id
    :param str basis: one of :data:`RelationBasis.ALL`
    :return: one of the :class:`Relation` values
    :raise ValueError: if a person id is unknown or the basis is invalid
    """
    for person_id in (person1, person2):
        if not graph.has_person(person_id):
            raise ValueError("unknown person instance {} in {}".format(
                person_id, graph.image_id))
    if basis == RelationBasis.PERSON:
        verbs1 = graph.verbs_of(person1)
        verbs2 = graph.verbs_of(person2)
        if not verbs1 or not verbs2:
            return Relation.NO_SHARED_BASIS
        return Relation.SAME if verbs1 == verbs2 else Relation.DIFFERENT
    if basis == RelationBasis.OBJECT:
        shared = graph.objects_of(person1) & graph.objects_of(person2)
        if not shared:
            return Relation.NO_SHARED_BASIS
        pair_verbs = graph.pair_verbs
        same = all(pair_verbs[(person1, oid)] == pair_verbs[(person2, oid)]
                   for oid in shared)
        return Relation.SAME if same else Relation.DIFFERENT
    raise ValueError("unknown relation basis '{}'".format(basis))
