# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Adapters from external HICO-DET annotation exports to the canonical schema.

Supported layouts:

``hico-community-v1``
    The community "annotation list" export: a JSON list with one entry per
    image, each holding ``file_name``, a flat ``annotations`` box list
    (``{"bbox": [x1, y1, x2, y2], "category_id": object_id}``) and the
    ``hoi_annotation`` connections (``{"subject_id", "object_id",
    "category_id", "hoi_category_id", "invis"}``) indexing into that box
    list. ``width`` and ``height`` are optional.
"""

from __future__ import absolute_import
import logging
import math
import os
from numbers import Real

from hoidiag.annotation import images_from_dicts, load_json
from hoidiag.exceptions import ExternalFormatError, SchemaError

logger = logging.getLogger(__name__)

HICO_COMMUNITY_V1 = "hico-community-v1"


def _sorted_corners(raw, where):
    if not isinstance(raw, (list, tuple)) or len(raw) != 4 or \
            any(isinstance(value, bool) or not isinstance(value, Real)
                for value in raw):
        raise ExternalFormatError("{}: bbox must be 4 numbers, got "
                                  "{!r}".format(where, raw))
    x1, y1, x2, y2 = (float(value) for value in raw)
    return [min(x1, x2), min(y1, y2), max(x1, x2), max(y1, y2)]


def _int_field(entry, field, where):
    try:
        value = entry[field]
    except (KeyError, TypeError):
        raise ExternalFormatError("{}: missing field '{}'".format(where,
                                                                  field))
    if isinstance(value, bool) or not isinstance(value, int):
        raise ExternalFormatError("{}: field '{}' must be an integer, got "
                                  "{!r}".format(where, field, value))
    return value


def _hico_community_v1_image(position, entry, vocab):
    where = "entry #{}".format(position)
    if not isinstance(entry, dict):
        raise ExternalFormatError("{}: not an object".format(where))
    file_name = entry.get("file_name")
    if not isinstance(file_name, str) or not file_name:
        raise ExternalFormatError("{}: missing 'file_name'".format(where))
    image_id = os.path.splitext(os.path.basename(file_name))[0]
    where = "image {}".format(image_id)

    raw_boxes = entry.get("annotations", [])
    connections = entry.get("hoi_annotation", [])
    if not isinstance(raw_boxes, list) or not isinstance(connections, list):
        raise ExternalFormatError("{}: 'annotations' and 'hoi_annotation' "
                                  "must be lists".format(where))
    boxes = []
    for box_index, raw_box in enumerate(raw_boxes):
        box_where = "{} box {}".format(where, box_index)
        if not isinstance(raw_box, dict):
            raise ExternalFormatError("{}: not an object".format(box_where))
        boxes.append((_sorted_corners(raw_box.get("bbox"), box_where),
                      raw_box.get("category_id")))

    annotations = []
    for index, connection in enumerate(connections):
        conn_where = "{} connection {}".format(where, index)
        subject = _int_field(connection, "subject_id", conn_where)
        obj = _int_field(connection, "object_id", conn_where)
        if not (0 <= subject < len(boxes) and 0 <= obj < len(boxes)):
            raise ExternalFormatError(
                "{}: box index out of range ({}, {}) for {} boxes".format(
                    conn_where, subject, obj, len(boxes)))
        hoi_id = connection.get("hoi_category_id")
        if hoi_id is None:
            verb_id = _int_field(connection, "category_id", conn_where)
            hoi_id = vocab.find_hoi(verb_id, boxes[obj][1])
            if hoi_id is None:
                raise ExternalFormatError(
                    "{}: no HOI class for verb {} and object {!r}".format(
                        conn_where, verb_id, boxes[obj][1]))
        annotations.append({"human_box": list(boxes[subject][0]),
                            "object_box": list(boxes[obj][0]),
                            "hoi_id": hoi_id,
                            "invisible": bool(connection.get("invis", 0))})

    width = entry.get("width")
    height = entry.get("height")
    if width is None or height is None:
        width = int(math.ceil(max([box[2] for box, _ in boxes] + [1.0])))
        height = int(math.ceil(max([box[3] for box, _ in boxes] + [1.0])))
        logger.warning("%s: no image size in export, using box extent "
                       "%dx%d", image_id, width, height)
    return {"image_id": image_id, "width": width, "height": height,
            "annotations": annotations}


def _convert_hico_community_v1(path, vocab):
    data = load_json(path)
    if not isinstance(data, list):
        raise ExternalFormatError(
            "{}: expected a list of image entries".format(path))
    raw_images = [_hico_community_v1_image(position, entry, vocab)
                  for position, entry in enumerate(data)]
    try:
        return images_from_dicts(raw_images, vocab, path)
    except SchemaError as ex:
        raise ExternalFormatError("{}: {}".format(path, ex))


_CONVERTERS = {
    HICO_COMMUNITY_V1: _convert_hico_community_v1
}

SUPPORTED_FORMATS = tuple(sorted(_CONVERTERS))


def convert_external(path, format_tag, vocab):
    """
    Convert an external annotation export into canonical ground-truth images.

    Corner order is normalized (x pair and y pair sorted) before the usual
    canonical validation and clamping. Boxes, HOI ids and the invisible flag
    are carried over unchanged.

    :param str path: path of the external export
    :param str format_tag: one of :data:`SUPPORTED_FORMATS`
    :param hoidiag.Vocabulary vocab: the vocabulary HOI ids refer to
    :return: list of :class:`hoidiag.GroundTruthImage`, in file order
    :raise ExternalFormatError: if the format is unsupported or the file is
        structurally invalid
    """
    converter = _CONVERTERS.get(format_tag)
    if converter is None:
        raise ExternalFormatError(
            "Unsupported format '{}', expected one of: {}".format(
                format_tag, ", ".join(SUPPORTED_FORMATS)))
    images = converter(path, vocab)
    logger.info("Converted %d images from %s (%s)", len(images), path,
                format_tag)
    return images
