# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
The annotation module contains the canonical data schema shared by every
diagnostic stage:

- :class:`BoundingBox`
- :class:`Vocabulary`
- :class:`HoiAnnotation`
- :class:`GroundTruthImage`
- :class:`Dataset`
- :class:`Prediction`
- :class:`PredictionSet`

Ground truth is read with :func:`load_dataset` or :func:`parse_ground_truth`
and predictions with :func:`parse_predictions`. Every value returned by the
parsers is immutable and may be shared freely across worker threads.

Canonical ground-truth JSON:

.. code-block:: json

    {"vocabulary": {"objects": [...], "verbs": [...], "hoi_classes": [...]},
     "images": [{"image_id": "HICO_test2015_00000001", "width": 640,
                 "height": 480,
                 "annotations": [{"human_box": [x1, y1, x2, y2],
                                  "object_box": [x1, y1, x2, y2],
                                  "hoi_id": 153, "invisible": false}]}]}

Canonical prediction JSON:

.. code-block:: json

    {"model_name": "my-model",
     "predictions": [{"image_id": "...", "human_box": [...],
                      "object_box": [...], "hoi_id": 153, "score": 0.93}]}
"""

from __future__ import absolute_import
import json
import logging
import math
from numbers import Real

import numpy as np

from hoidiag._hoi_utils import HoiUtils
from hoidiag.exceptions import AnnotationParseError, SchemaError, \
    UnknownImageError, VocabularyError

logger = logging.getLogger(__name__)


class InvalidBoxError(ValueError):
    """
    Exception raised when box coordinates violate the :class:`BoundingBox`
    invariants
    """


class BoundingBox(object):
    """
    An axis-aligned box in pixel coordinates with the origin at the top-left
    corner of the image. Coordinates are real-valued; every box has a
    strictly positive area and non-negative, finite coordinates.
    """

    __slots__ = ("_x1", "_y1", "_x2", "_y2")

    def __init__(self, x1, y1, x2, y2):
        """
        Constructor parameters:

        :param x1: left edge
        :param y1: top edge
        :param x2: right edge, greater than `x1`
        :param y2: bottom edge, greater than `y1`
        :raise InvalidBoxError: if the coordinates violate the invariants
        """
        coords = (x1, y1, x2, y2)
        for value in coords:
            if isinstance(value, bool) or not isinstance(value, Real):
                raise InvalidBoxError("box coordinate is not a number: "
                                      "{!r}".format(value))
        coords = tuple(float(value) for value in coords)
        if not all(math.isfinite(value) for value in coords):
            raise InvalidBoxError("box coordinates must be finite: "
                                  "{}".format(list(coords)))
        if min(coords) < 0:
            raise InvalidBoxError("box coordinates must be non-negative: "
                                  "{}".format(list(coords)))
        if not (coords[2] > coords[0] and coords[3] > coords[1]):
            raise InvalidBoxError("box has no area: {}".format(list(coords)))
        self._x1, self._y1, self._x2, self._y2 = coords

    @property
    def x1(self):
        """
        The left edge
        """
        return self._x1

    @property
    def y1(self):
        """
        The top edge
        """
        return self._y1

    @property
    def x2(self):
        """
        The right edge
        """
        return self._x2

    @property
    def y2(self):
        """
        The bottom edge
        """
        return self._y2

    @property
    def area(self):
        """
        The area of the box in square pixels
        """
        return (self._x2 - self._x1) * (self._y2 - self._y1)

    def clamped(self, width, height):
        """
        Returns a copy of the box clipped to ``[0, width] x [0, height]``.

        :raise InvalidBoxError: if the clipped box is empty
        """
        return BoundingBox(min(self._x1, width), min(self._y1, height),
                           min(self._x2, width), min(self._y2, height))

    def scaled(self, factor):
        """
        Returns a copy of the box with every coordinate multiplied by
        `factor` (> 0).
        """
        return BoundingBox(self._x1 * factor, self._y1 * factor,
                           self._x2 * factor, self._y2 * factor)

    def translated(self, dx, dy):
        """
        Returns a copy of the box shifted by (`dx`, `dy`).
        """
        return BoundingBox(self._x1 + dx, self._y1 + dy,
                           self._x2 + dx, self._y2 + dy)

    def to_list(self):
        """
        The box as ``[x1, y1, x2, y2]``
        """
        return [self._x1, self._y1, self._x2, self._y2]

    def as_tuple(self):
        """
        The box as ``(x1, y1, x2, y2)``, usable as a dictionary key
        """
        return (self._x1, self._y1, self._x2, self._y2)

    def __eq__(self, other):
        return isinstance(other, BoundingBox) and \
            self.as_tuple() == other.as_tuple()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return "BoundingBox({}, {}, {}, {})".format(*self.as_tuple())


def iou(a, b):
    """
    Intersection over union of two boxes, computed in double precision.

    :param BoundingBox a: first box
    :param BoundingBox b: second box
    :return: a value in ``[0, 1]``; ``0`` when the boxes are disjoint
    :rtype: float
    """
    inter_w = min(a.x2, b.x2) - max(a.x1, b.x1)
    inter_h = min(a.y2, b.y2) - max(a.y1, b.y1)
    if inter_w <= 0 or inter_h <= 0:
        return 0.0
    inter = inter_w * inter_h
    union = a.area + b.area - inter
    return min(1.0, inter / union)


def iou_matrix(boxes_a, boxes_b):
    """
    Pairwise IoU of two box lists, computed with the same arithmetic as
    :func:`iou` so both agree bit for bit.

    :param boxes_a: sequence of :class:`BoundingBox` (rows)
    :param boxes_b: sequence of :class:`BoundingBox` (columns)
    :return: array of shape ``(len(boxes_a), len(boxes_b))``
    :rtype: numpy.ndarray
    """
    a = np.array([box.as_tuple() for box in boxes_a],
                 dtype=np.float64).reshape(-1, 4)
    b = np.array([box.as_tuple() for box in boxes_b],
                 dtype=np.float64).reshape(-1, 4)
    inter_w = np.minimum(a[:, None, 2], b[None, :, 2]) - \
        np.maximum(a[:, None, 0], b[None, :, 0])
    inter_h = np.minimum(a[:, None, 3], b[None, :, 3]) - \
        np.maximum(a[:, None, 1], b[None, :, 1])
    overlap = (inter_w > 0) & (inter_h > 0)
    inter = np.where(overlap, inter_w * inter_h, 0.0)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    return np.where(overlap, np.minimum(1.0, inter / union), 0.0)


class Vocabulary(object):
    """
    The HOI label space: object categories, verbs and the (verb, object)
    combinations that form HOI classes. In HICO-DET this is 80 objects,
    117 verbs and 600 HOI classes, with one ``no_interaction`` class per
    object.
    """

    def __init__(self, objects, verbs, hoi_classes):
        """
        Constructor parameters:

        :param objects: sequence of ``(object_id, name)``
        :param verbs: sequence of ``(verb_id, name, is_no_interaction)``
        :param hoi_classes: sequence of ``(hoi_id, verb_id, object_id)``
        :raise VocabularyError: if ids repeat, a (verb, object) pair repeats,
            a class references an unknown verb or object, or an object has
            more than one ``no_interaction`` class
        """
        self._objects = tuple((int(oid), str(name)) for oid, name in objects)
        self._verbs = tuple((int(vid), str(name), bool(no_interaction))
                            for vid, name, no_interaction in verbs)
        self._hoi_classes = tuple((int(hid), int(vid), int(oid))
                                  for hid, vid, oid in hoi_classes)

        self._object_names = {}
        for oid, name in self._objects:
            if oid in self._object_names:
                raise VocabularyError("duplicate object id {}".format(oid))
            self._object_names[oid] = name
        self._object_ids_by_name = {}
        for oid, name in self._objects:
            if name in self._object_ids_by_name:
                raise VocabularyError("duplicate object name {}".format(name))
            self._object_ids_by_name[name] = oid

        self._verb_info = {}
        for vid, name, no_interaction in self._verbs:
            if vid in self._verb_info:
                raise VocabularyError("duplicate verb id {}".format(vid))
            self._verb_info[vid] = (name, no_interaction)

        self._hoi = {}
        self._hoi_by_pair = {}
        no_interaction_objects = set()
        for hid, vid, oid in self._hoi_classes:
            if hid in self._hoi:
                raise VocabularyError("duplicate hoi id {}".format(hid))
            if vid not in self._verb_info:
                raise VocabularyError(
                    "hoi {} references unknown verb {}".format(hid, vid))
            if oid not in self._object_names:
                raise VocabularyError(
                    "hoi {} references unknown object {}".format(hid, oid))
            if (vid, oid) in self._hoi_by_pair:
                raise VocabularyError(
                    "duplicate (verb, object) pair ({}, {}) in hoi {} "
                    "and {}".format(vid, oid, self._hoi_by_pair[(vid, oid)],
                                    hid))
            if self._verb_info[vid][1]:
                if oid in no_interaction_objects:
                    raise VocabularyError(
                        "object {} has more than one no_interaction "
                        "class".format(oid))
                no_interaction_objects.add(oid)
            self._hoi[hid] = (vid, oid)
            self._hoi_by_pair[(vid, oid)] = hid

    @property
    def objects(self):
        """
        Tuple of ``(object_id, name)``
        """
        return self._objects

    @property
    def verbs(self):
        """
        Tuple of ``(verb_id, name, is_no_interaction)``
        """
        return self._verbs

    @property
    def hoi_classes(self):
        """
        Tuple of ``(hoi_id, verb_id, object_id)``
        """
        return self._hoi_classes

    def __contains__(self, hoi_id):
        return hoi_id in self._hoi

    def hoi(self, hoi_id):
        """
        Returns the ``(verb_id, object_id)`` pair of an HOI class.

        :raise KeyError: if the class is unknown
        """
        return self._hoi[hoi_id]

    def verb_of(self, hoi_id):
        """
        Returns the verb id of an HOI class
        """
        return self._hoi[hoi_id][0]

    def object_of(self, hoi_id):
        """
        Returns the object id of an HOI class
        """
        return self._hoi[hoi_id][1]

    def find_hoi(self, verb_id, object_id):
        """
        Returns the HOI class id for a (verb, object) pair, or `None`
        """
        return self._hoi_by_pair.get((verb_id, object_id))

    def is_no_interaction(self, hoi_id):
        """
        Whether the HOI class uses the ``no_interaction`` verb
        """
        return self._verb_info[self._hoi[hoi_id][0]][1]

    def is_no_interaction_verb(self, verb_id):
        """
        Whether the verb is the ``no_interaction`` verb
        """
        return self._verb_info[verb_id][1]

    def has_object(self, object_id):
        """
        Whether the object id is part of the vocabulary
        """
        return object_id in self._object_names

    def object_name(self, object_id):
        """
        Returns the name of an object category
        """
        return self._object_names[object_id]

    def verb_name(self, verb_id):
        """
        Returns the name of a verb
        """
        return self._verb_info[verb_id][0]

    def object_by_name(self, name):
        """
        Returns the object id for a category name, or `None`
        """
        return self._object_ids_by_name.get(name)

    def hoi_classes_of_object(self, object_id):
        """
        Returns the ids of every HOI class involving `object_id`, ascending
        """
        return sorted(hid for hid, (_, oid) in self._hoi.items()
                      if oid == object_id)

    def hoi_label(self, hoi_id):
        """
        Returns a readable ``"verb object"`` label for an HOI class
        """
        vid, oid = self._hoi[hoi_id]
        return "{} {}".format(self.verb_name(vid), self.object_name(oid))

    def to_dict(self):
        """
        The canonical JSON representation of the vocabulary
        """
        return {
            "objects": [{"id": oid, "name": name}
                        for oid, name in self._objects],
            "verbs": [{"id": vid, "name": name,
                       "no_interaction": no_interaction}
                      for vid, name, no_interaction in self._verbs],
            "hoi_classes": [{"id": hid, "verb_id": vid, "object_id": oid}
                            for hid, vid, oid in self._hoi_classes]
        }

    @staticmethod
    def from_dict(data):
        """
        Create a vocabulary from its canonical JSON representation.

        :raise VocabularyError: if the structure or content is invalid
        """
        try:
            return Vocabulary(
                [(entry["id"], entry["name"]) for entry in data["objects"]],
                [(entry["id"], entry["name"],
                  entry.get("no_interaction", False))
                 for entry in data["verbs"]],
                [(entry["id"], entry["verb_id"], entry["object_id"])
                 for entry in data["hoi_classes"]])
        except (KeyError, TypeError, ValueError) as ex:
            raise VocabularyError(
                "malformed vocabulary: {}".format(_describe(ex)))

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and \
            (self._objects, self._verbs, self._hoi_classes) == \
            (other._objects, other._verbs, other._hoi_classes)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._objects, self._verbs, self._hoi_classes))


class HoiAnnotation(object):
    """
    One annotated human-object pair with its HOI class. Annotations marked
    invisible are kept and flagged rather than dropped.
    """

    __slots__ = ("_human_box", "_object_box", "_hoi_id", "_invisible")

    def __init__(self, human_box, object_box, hoi_id, invisible=False):
        self._human_box = human_box
        self._object_box = object_box
        self._hoi_id = hoi_id
        self._invisible = bool(invisible)

    @property
    def human_box(self):
        """
        The :class:`BoundingBox` of the person
        """
        return self._human_box

    @property
    def object_box(self):
        """
        The :class:`BoundingBox` of the object
        """
        return self._object_box

    @property
    def hoi_id(self):
        """
        The HOI class id
        """
        return self._hoi_id

    @property
    def invisible(self):
        """
        Whether the interaction is marked invisible
        """
        return self._invisible

    def to_dict(self):
        """
        The canonical JSON representation of the annotation
        """
        return {"human_box": self._human_box.to_list(),
                "object_box": self._object_box.to_list(),
                "hoi_id": self._hoi_id,
                "invisible": self._invisible}

    def __eq__(self, other):
        return isinstance(other, HoiAnnotation) and \
            (self._human_box, self._object_box, self._hoi_id,
             self._invisible) == (other._human_box, other._object_box,
                                  other._hoi_id, other._invisible)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._human_box, self._object_box, self._hoi_id,
                     self._invisible))

    def __repr__(self):
        return "HoiAnnotation({!r}, {!r}, {}, invisible={})".format(
            self._human_box, self._object_box, self._hoi_id, self._invisible)


class GroundTruthImage(object):
    """
    The ground truth of one test image: its size and its ordered HOI
    annotations.
    """

    __slots__ = ("_image_id", "_width", "_height", "_annotations")

    def __init__(self, image_id, width, height, annotations):
        self._image_id = image_id
        self._width = width
        self._height = height
        self._annotations = tuple(annotations)

    @property
    def image_id(self):
        """
        The image identifier, unique within a dataset
        """
        return self._image_id

    @property
    def width(self):
        """
        The image width in pixels
        """
        return self._width

    @property
    def height(self):
        """
        The image height in pixels
        """
        return self._height

    @property
    def annotations(self):
        """
        Tuple of :class:`HoiAnnotation`, in file order
        """
        return self._annotations

    def to_dict(self):
        """
        The canonical JSON representation of the image
        """
        return {"image_id": self._image_id,
                "width": self._width,
                "height": self._height,
                "annotations": [annotation.to_dict()
                                for annotation in self._annotations]}

    def __eq__(self, other):
        return isinstance(other, GroundTruthImage) and \
            (self._image_id, self._width, self._height,
             self._annotations) == (other._image_id, other._width,
                                    other._height, other._annotations)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._image_id, self._annotations))

    def __repr__(self):
        return "GroundTruthImage({!r}, {} annotations)".format(
            self._image_id, len(self._annotations))


class Dataset(object):
    """
    A vocabulary together with the ground-truth images annotated against it.
    """

    def __init__(self, vocabulary, images):
        """
        Constructor parameters:

        :param Vocabulary vocabulary: the label space
        :param images: sequence of :class:`GroundTruthImage`
        :raise SchemaError: if an image id repeats
        """
        self._vocabulary = vocabulary
        self._images = tuple(images)
        self._by_id = {}
        for image in self._images:
            if image.image_id in self._by_id:
                raise SchemaError(
                    "duplicate image_id {}".format(image.image_id))
            self._by_id[image.image_id] = image

    @property
    def vocabulary(self):
        """
        The :class:`Vocabulary` of the dataset
        """
        return self._vocabulary

    @property
    def images(self):
        """
        Tuple of :class:`GroundTruthImage`, in file order
        """
        return self._images

    def image(self, image_id):
        """
        Returns the image with the given id, or `None`
        """
        return self._by_id.get(image_id)

    def __contains__(self, image_id):
        return image_id in self._by_id

    def __len__(self):
        return len(self._images)

    def __iter__(self):
        return iter(self._images)

    def to_dict(self):
        """
        The canonical ground-truth JSON representation
        """
        return {"vocabulary": self._vocabulary.to_dict(),
                "images": [image.to_dict() for image in self._images]}


class Prediction(object):
    """
    A scored HOI triplet produced by a detector. `index` is the position of
    the prediction in its file and breaks score ties deterministically.
    """

    __slots__ = ("_image_id", "_human_box", "_object_box", "_hoi_id",
                 "_score", "_index")

    def __init__(self, image_id, human_box, object_box, hoi_id, score,
                 index=0):
        self._image_id = image_id
        self._human_box = human_box
        self._object_box = object_box
        self._hoi_id = hoi_id
        self._score = float(score)
        self._index = index

    @property
    def image_id(self):
        """
        The image the prediction belongs to
        """
        return self._image_id

    @property
    def human_box(self):
        """
        The predicted person :class:`BoundingBox`
        """
        return self._human_box

    @property
    def object_box(self):
        """
        The predicted object :class:`BoundingBox`
        """
        return self._object_box

    @property
    def hoi_id(self):
        """
        The predicted HOI class id
        """
        return self._hoi_id

    @property
    def score(self):
        """
        The confidence score in ``[0, 1]``
        """
        return self._score

    @property
    def index(self):
        """
        The insertion index of the prediction in its file
        """
        return self._index

    def rank_key(self):
        """
        Sort key giving descending score, then image id, then insertion
        index
        """
        return (-self._score, self._image_id, self._index)

    def to_dict(self):
        """
        The canonical JSON representation of the prediction
        """
        return {"image_id": self._image_id,
                "human_box": self._human_box.to_list(),
                "object_box": self._object_box.to_list(),
                "hoi_id": self._hoi_id,
                "score": self._score}

    def __eq__(self, other):
        return isinstance(other, Prediction) and \
            (self._image_id, self._human_box, self._object_box,
             self._hoi_id, self._score, self._index) == \
            (other._image_id, other._human_box, other._object_box,
             other._hoi_id, other._score, other._index)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._image_id, self._hoi_id, self._score, self._index))

    def __repr__(self):
        return "Prediction({!r}, hoi={}, score={}, index={})".format(
            self._image_id, self._hoi_id, self._score, self._index)


class PredictionSet(object):
    """
    The predictions of one model, in file order.
    """

    def __init__(self, model_name, predictions):
        self._model_name = model_name
        self._predictions = tuple(predictions)

    @property
    def model_name(self):
        """
        The name of the model which produced the predictions
        """
        return self._model_name

    @property
    def predictions(self):
        """
        Tuple of :class:`Prediction`, in file order
        """
        return self._predictions

    def __len__(self):
        return len(self._predictions)

    def __iter__(self):
        return iter(self._predictions)

    def __getitem__(self, index):
        return self._predictions[index]

    def __eq__(self, other):
        return isinstance(other, PredictionSet) and \
            (self._model_name, self._predictions) == \
            (other._model_name, other._predictions)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self._model_name, self._predictions))

    def to_dict(self):
        """
        The canonical prediction JSON representation
        """
        return {"model_name": self._model_name,
                "predictions": [prediction.to_dict()
                                for prediction in self._predictions]}


def _describe(ex):
    if isinstance(ex, KeyError):
        return "missing field {}".format(ex)
    return str(ex)


def load_json(path):
    """
    Read a JSON document, translating syntax errors into
    :class:`AnnotationParseError` with line and column information.

    :param str path: path of the file
    :return: the decoded document
    """
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        return json.loads(text)
    except ValueError as ex:
        raise AnnotationParseError(path, getattr(ex, "lineno", 0),
                                   getattr(ex, "colno", 0),
                                   getattr(ex, "msg", str(ex)))


def _raw_box(raw, where):
    """
    Validate the shape of a raw ``[x1, y1, x2, y2]`` list and return it as
    floats.
    """
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise SchemaError("{}: box must be a list of 4 numbers, got "
                          "{!r}".format(where, raw))
    values = []
    for value in raw:
        if isinstance(value, bool) or not isinstance(value, Real) or \
                not math.isfinite(value):
            raise SchemaError("{}: box coordinate is not a finite number: "
                              "{!r}".format(where, raw))
        values.append(float(value))
    return values


def _ingest_box(raw, width, height, where):
    """
    Build a :class:`BoundingBox` from a raw list, clamping it to the image
    bounds. Corners must already be ordered.

    :return: ``(box, was_clamped)``
    """
    x1, y1, x2, y2 = _raw_box(raw, where)
    if not (x2 > x1 and y2 > y1):
        raise SchemaError("{}: degenerate box {}".format(where, raw))
    upper_x = width if width is not None else max(x2, 0.0)
    upper_y = height if height is not None else max(y2, 0.0)
    clamped = [min(max(x1, 0.0), upper_x), min(max(y1, 0.0), upper_y),
               min(max(x2, 0.0), upper_x), min(max(y2, 0.0), upper_y)]
    try:
        box = BoundingBox(*clamped)
    except InvalidBoxError:
        raise SchemaError("{}: box {} is empty after clamping to the image "
                          "bounds".format(where, raw))
    return box, clamped != [x1, y1, x2, y2]


def _positive_size(value, field, image_id):
    if isinstance(value, bool) or not isinstance(value, Real) or \
            not math.isfinite(value) or value <= 0:
        raise SchemaError("image {}: {} must be a positive number, got "
                          "{!r}".format(image_id, field, value))
    return value


def images_from_dicts(raw_images, vocab, source="<memory>"):
    """
    Build ground-truth images from their canonical JSON representation.

    :param raw_images: list of image dictionaries
    :param Vocabulary vocab: vocabulary to validate HOI ids against
    :param str source: description of the input, used in log messages
    :return: list of :class:`GroundTruthImage`
    :raise SchemaError: on any schema violation
    """
    if not isinstance(raw_images, list):
        raise SchemaError("'images' must be a list")
    images = []
    seen = set()
    clamp_count = 0
    for position, raw_image in enumerate(raw_images):
        if not isinstance(raw_image, dict):
            raise SchemaError("image #{} is not an object".format(position))
        try:
            image_id = raw_image["image_id"]
            width = raw_image["width"]
            height = raw_image["height"]
            raw_annotations = raw_image.get("annotations", [])
        except KeyError as ex:
            raise SchemaError("image #{}: {}".format(position, _describe(ex)))
        if not isinstance(image_id, str) or not image_id:
            raise SchemaError("image #{}: image_id must be a non-empty "
                              "string".format(position))
        if image_id in seen:
            raise SchemaError("duplicate image_id {}".format(image_id))
        seen.add(image_id)
        width = _positive_size(width, "width", image_id)
        height = _positive_size(height, "height", image_id)
        if not isinstance(raw_annotations, list):
            raise SchemaError("image {}: annotations must be a list".format(
                image_id))

        annotations = []
        for index, raw in enumerate(raw_annotations):
            where = "image {} annotation {}".format(image_id, index)
            if not isinstance(raw, dict):
                raise SchemaError("{}: not an object".format(where))
            try:
                hoi_id = raw["hoi_id"]
                human_raw = raw["human_box"]
                object_raw = raw["object_box"]
            except KeyError as ex:
                raise SchemaError("{}: {}".format(where, _describe(ex)))
            if isinstance(hoi_id, bool) or not isinstance(hoi_id, int) or \
                    hoi_id not in vocab:
                raise SchemaError("{}: unknown hoi_id {!r}".format(
                    where, hoi_id))
            human_box, human_clamped = _ingest_box(
                human_raw, width, height, where + " human_box")
            object_box, object_clamped = _ingest_box(
                object_raw, width, height, where + " object_box")
            invisible = raw.get("invisible", False)
            if not isinstance(invisible, bool):
                raise SchemaError("{}: invisible must be true or false, got "
                                  "{!r}".format(where, invisible))
            clamp_count += int(human_clamped) + int(object_clamped)
            annotations.append(HoiAnnotation(human_box, object_box, hoi_id,
                                             invisible))
        images.append(GroundTruthImage(image_id, width, height, annotations))

    if clamp_count:
        logger.warning("%s: clamped %d box(es) to image bounds", source,
                       clamp_count)
    return images


def load_vocabulary(path):
    """
    Read a vocabulary from a standalone vocabulary file or from the
    ``vocabulary`` block of a canonical ground-truth file.

    :param str path: path of the file
    :return: the :class:`Vocabulary`
    """
    data = load_json(path)
    if isinstance(data, dict) and "vocabulary" in data:
        data = data["vocabulary"]
    if not isinstance(data, dict):
        raise VocabularyError("{}: no vocabulary found".format(path))
    return Vocabulary.from_dict(data)


def load_dataset(path):
    """
    Parse a canonical ground-truth file together with its embedded
    vocabulary.

    :param str path: path of the file
    :return: the :class:`Dataset`
    """
    data = load_json(path)
    if not isinstance(data, dict) or "vocabulary" not in data or \
            "images" not in data:
        raise SchemaError("{}: expected 'vocabulary' and 'images' at the "
                          "top level".format(path))
    vocab = Vocabulary.from_dict(data["vocabulary"])
    dataset = Dataset(vocab, images_from_dicts(data["images"], vocab, path))
    logger.info("Loaded %d images from %s", len(dataset), path)
    return dataset


def parse_ground_truth(path, vocab):
    """
    Parse the images of a canonical ground-truth file against a supplied
    vocabulary.

    Boxes overshooting the image are clamped to ``[0, width] x [0,
    height]``; a box emptied by clamping is a schema error. Annotation order
    is preserved.

    :param str path: path of the file
    :param Vocabulary vocab: vocabulary to validate HOI ids against
    :return: list of :class:`GroundTruthImage`
    :raise AnnotationParseError: if the file is not valid JSON
    :raise SchemaError: if the file violates the canonical schema
    """
    data = load_json(path)
    if not isinstance(data, dict) or "images" not in data:
        raise SchemaError("{}: expected 'images' at the top level".format(
            path))
    return images_from_dicts(data["images"], vocab, path)


def predictions_from_dicts(raw_predictions, vocab, images=None,
                           source="<memory>"):
    """
    Build predictions from their canonical JSON representation.

    :param raw_predictions: list of prediction dictionaries
    :param Vocabulary vocab: vocabulary to validate HOI ids against
    :param images: optional :class:`Dataset` (or mapping of image id to
        :class:`GroundTruthImage`). When supplied, unknown image ids are an
        error and boxes are clamped to the image size.
    :param str source: description of the input, used in messages
    :return: list of :class:`Prediction`
    """
    if not isinstance(raw_predictions, list):
        raise SchemaError("'predictions' must be a list")
    predictions = []
    clamp_count = 0
    for index, raw in enumerate(raw_predictions):
        where = "prediction {}".format(index)
        if not isinstance(raw, dict):
            raise SchemaError("{}: not an object".format(where))
        try:
            image_id = raw["image_id"]
            hoi_id = raw["hoi_id"]
            score = raw["score"]
            human_raw = raw["human_box"]
            object_raw = raw["object_box"]
        except KeyError as ex:
            raise SchemaError("{}: {}".format(where, _describe(ex)))
        where = "prediction {} (image {})".format(index, image_id)
        if isinstance(score, bool) or not isinstance(score, Real) or \
                not 0.0 <= score <= 1.0:
            raise SchemaError("{}: score {!r} outside [0, 1]".format(
                where, score))
        if isinstance(hoi_id, bool) or not isinstance(hoi_id, int) or \
                hoi_id not in vocab:
            raise SchemaError("{}: unknown hoi_id {!r}".format(where, hoi_id))
        width = height = None
        if images is not None:
            image = images.image(image_id) if isinstance(images, Dataset) \
                else images.get(image_id)
            if image is None:
                raise UnknownImageError(
                    "{}: image_id {!r} is absent from the ground "
                    "truth".format(where, image_id))
            width, height = image.width, image.height
        human_box, human_clamped = _ingest_box(human_raw, width, height,
                                               where + " human_box")
        object_box, object_clamped = _ingest_box(object_raw, width, height,
                                                 where + " object_box")
        clamp_count += int(human_clamped) + int(object_clamped)
        predictions.append(Prediction(image_id, human_box, object_box,
                                      hoi_id, score, index))
    if clamp_count:
        logger.warning("%s: clamped %d predicted box(es)", source,
                       clamp_count)
    return predictions


def parse_predictions(path, vocab, images=None):
    """
    Parse a canonical prediction file. Predictions are returned in file
    order with their insertion index recorded.

    :param str path: path of the file
    :param Vocabulary vocab: vocabulary to validate HOI ids against
    :param images: optional ground truth (see
        :func:`predictions_from_dicts`); predictions for unknown images are
        a hard error when supplied
    :return: the :class:`PredictionSet`
    :raise AnnotationParseError: if the file is not valid JSON
    :raise SchemaError: if a score is outside ``[0, 1]`` or an HOI id is
        unknown
    :raise UnknownImageError: if `images` is supplied and a prediction
        references an image absent from it
    """
    data = load_json(path)
    if not isinstance(data, dict) or "predictions" not in data:
        raise SchemaError("{}: expected 'predictions' at the top level".format(
            path))
    model_name = data.get("model_name") or "model"
    predictions = predictions_from_dicts(data["predictions"], vocab, images,
                                         path)
    logger.info("Loaded %d predictions for %s from %s", len(predictions),
                model_name, path)
    return PredictionSet(str(model_name), predictions)


def serialize_ground_truth(dataset, path):
    """
    Atomically write a dataset as canonical ground-truth JSON.

    :param Dataset dataset: the dataset
    :param str path: destination file
    """
    HoiUtils.save_json(path, dataset.to_dict())


def serialize_predictions(prediction_set, path):
    """
    Atomically write predictions as canonical prediction JSON.

    :param PredictionSet prediction_set: the predictions
    :param str path: destination file
    """
    HoiUtils.save_json(path, prediction_set.to_dict())
