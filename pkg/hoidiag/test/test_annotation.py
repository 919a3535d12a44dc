# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
###############################################################################

"""
Test cases for boxes, the vocabulary and the canonical readers and writers.
"""

# Run with nosetests hoidiag.test.test_annotation

from __future__ import absolute_import
import os

from hypothesis import given, strategies as st
from parameterized import parameterized

from hoidiag import AnnotationParseError, BoundingBox, SchemaError, \
    UnknownImageError, Vocabulary, VocabularyError, iou, load_dataset, \
    load_vocabulary, parse_ground_truth, parse_predictions, \
    serialize_ground_truth, serialize_predictions
from hoidiag.annotation import InvalidBoxError, iou_matrix

from .base_test import BaseHoiTest, HOLD_CUP, RIDE_HORSE, TempDir, ann, \
    box, dataset, image, predictions_from_gt, read_json, write_json

# pylint: disable=missing-docstring


def _gt_document(images, vocab):
    return {"vocabulary": vocab.to_dict(), "images": images}


def _raw_image(image_id="img", annotations=None, width=640, height=480):
    if annotations is None:
        annotations = [{"human_box": [10, 10, 50, 100],
                        "object_box": [40, 60, 120, 110],
                        "hoi_id": RIDE_HORSE}]
    return {"image_id": image_id, "width": width, "height": height,
            "annotations": annotations}


_COORDS = st.floats(min_value=0, max_value=500, allow_nan=False,
                    allow_infinity=False)


@st.composite
def _boxes(draw):
    x1, y1 = draw(_COORDS), draw(_COORDS)
    width = draw(st.floats(min_value=1, max_value=300))
    height = draw(st.floats(min_value=1, max_value=300))
    return BoundingBox(x1, y1, x1 + width, y1 + height)


@st.composite
def _grid_boxes(draw):
    x1, y1 = draw(st.integers(0, 500)), draw(st.integers(0, 500))
    return BoundingBox(x1, y1, x1 + draw(st.integers(1, 300)),
                       y1 + draw(st.integers(1, 300)))


class BoundingBoxTest(BaseHoiTest):

    @parameterized.expand([
        ("zero_width", (10, 10, 10, 20)),
        ("inverted", (20, 10, 10, 20)),
        ("negative", (-1, 0, 10, 10)),
        ("nan", (0, 0, float("nan"), 10)),
        ("infinite", (0, 0, float("inf"), 10)),
        ("not_a_number", (0, 0, "10", 10)),
    ])
    def test_invalid_boxes_are_rejected(self, _, coords):
        with self.assertRaises(InvalidBoxError):
            BoundingBox(*coords)

    def test_invalid_box_error_is_a_value_error(self):
        self.assertTrue(issubclass(InvalidBoxError, ValueError))

    def test_area_and_helpers(self):
        subject = box(10, 20, 30, 60)
        self.assertEqual(800, subject.area)
        self.assertEqual([20, 40, 60, 120], subject.scaled(2).to_list())
        self.assertEqual([15, 15, 35, 55],
                         subject.translated(5, -5).to_list())
        self.assertEqual([10, 20, 25, 50],
                         subject.clamped(25, 50).to_list())

    def test_clamping_to_empty_box_raises(self):
        with self.assertRaises(InvalidBoxError):
            box(100, 100, 200, 200).clamped(50, 50)

    def test_iou_of_identical_boxes_is_one(self):
        self.assertEqual(1.0, iou(box(0, 0, 10, 10), box(0, 0, 10, 10)))

    def test_iou_of_disjoint_and_touching_boxes_is_zero(self):
        self.assertEqual(0.0, iou(box(0, 0, 10, 10), box(20, 20, 30, 30)))
        self.assertEqual(0.0, iou(box(0, 0, 10, 10), box(10, 0, 20, 10)))

    def test_iou_of_half_overlap(self):
        self.assertAlmostEqual(1.0 / 3.0, iou(box(0, 0, 10, 10),
                                             box(5, 0, 15, 10)))

    @given(_boxes(), _boxes())
    def test_iou_is_symmetric_and_bounded(self, first, second):
        value = iou(first, second)
        self.assertEqual(value, iou(second, first))
        self.assertGreaterEqual(value, 0.0)
        self.assertLessEqual(value, 1.0)

    @given(_grid_boxes(), _grid_boxes(),
           st.integers(min_value=0, max_value=1000),
           st.integers(min_value=0, max_value=1000),
           st.sampled_from([0.37, 0.5, 1.9, 3.0, 10.0]))
    def test_iou_is_unchanged_by_translation_and_scaling(self, first, second,
                                                         dx, dy, factor):
        value = iou(first, second)
        self.assertAlmostEqual(value, iou(first.translated(dx, dy),
                                          second.translated(dx, dy)),
                               delta=1e-12)
        self.assertAlmostEqual(value, iou(first.scaled(factor),
                                          second.scaled(factor)),
                               delta=1e-12)

    @given(st.lists(_boxes(), min_size=1, max_size=5),
           st.lists(_boxes(), min_size=1, max_size=5))
    def test_iou_matrix_agrees_with_iou(self, rows, columns):
        matrix = iou_matrix(rows, columns)
        self.assertEqual((len(rows), len(columns)), matrix.shape)
        for i, row_box in enumerate(rows):
            for j, column_box in enumerate(columns):
                self.assertEqual(iou(row_box, column_box), matrix[i, j])


class VocabularyTest(BaseHoiTest):

    def test_lookups(self):
        self.assertEqual((1, 1), self.vocab.hoi(RIDE_HORSE))
        self.assertEqual(3, self.vocab.object_of(HOLD_CUP))
        self.assertEqual(RIDE_HORSE, self.vocab.find_hoi(1, 1))
        self.assertIsNone(self.vocab.find_hoi(2, 3))
        self.assertTrue(self.vocab.is_no_interaction(4))
        self.assertFalse(self.vocab.is_no_interaction(RIDE_HORSE))
        self.assertEqual(2, self.vocab.object_by_name("bicycle"))
        self.assertIsNone(self.vocab.object_by_name("zebra"))
        self.assertEqual([1, 2, 3, 4], self.vocab.hoi_classes_of_object(1))
        self.assertIn(RIDE_HORSE, self.vocab)
        self.assertNotIn(99, self.vocab)

    @parameterized.expand([
        ("duplicate_object", [(1, "a"), (1, "b")], [(1, "v", False)],
         [(1, 1, 1)]),
        ("duplicate_object_name", [(1, "a"), (2, "a")], [(1, "v", False)],
         [(1, 1, 1)]),
        ("unknown_verb", [(1, "a")], [(1, "v", False)], [(1, 2, 1)]),
        ("unknown_object", [(1, "a")], [(1, "v", False)], [(1, 1, 2)]),
        ("duplicate_pair", [(1, "a")], [(1, "v", False)],
         [(1, 1, 1), (2, 1, 1)]),
        ("two_no_interaction", [(1, "a")],
         [(1, "none", True), (2, "nothing", True)],
         [(1, 1, 1), (2, 2, 1)]),
    ])
    def test_integrity_violations_raise(self, _, objects, verbs, classes):
        with self.assertRaises(VocabularyError):
            Vocabulary(objects, verbs, classes)

    def test_round_trips_through_dict(self):
        self.assertEqual(self.vocab,
                         Vocabulary.from_dict(self.vocab.to_dict()))

    def test_malformed_dict_raises(self):
        with self.assertRaises(VocabularyError):
            Vocabulary.from_dict({"objects": []})


class GroundTruthParsingTest(BaseHoiTest):

    def test_parse_preserves_annotation_order_and_flags(self):
        annotations = [
            {"human_box": [0, 0, 10, 10], "object_box": [20, 20, 30, 30],
             "hoi_id": HOLD_CUP, "invisible": True},
            {"human_box": [1, 1, 11, 11], "object_box": [5, 5, 15, 15],
             "hoi_id": RIDE_HORSE}]
        with TempDir("gt") as tmp:
            path = write_json(tmp, "gt.json", _gt_document(
                [_raw_image(annotations=annotations)], self.vocab))
            images = parse_ground_truth(path, self.vocab)
        self.assertEqual(1, len(images))
        parsed = images[0].annotations
        self.assertEqual([HOLD_CUP, RIDE_HORSE], [a.hoi_id for a in parsed])
        self.assertTrue(parsed[0].invisible)
        self.assertFalse(parsed[1].invisible)

    def test_boxes_are_clamped_to_the_image(self):
        annotations = [{"human_box": [600, 400, 700, 500],
                        "object_box": [0, 0, 10, 10], "hoi_id": RIDE_HORSE}]
        with TempDir("gt") as tmp:
            path = write_json(tmp, "gt.json", _gt_document(
                [_raw_image(annotations=annotations)], self.vocab))
            images = parse_ground_truth(path, self.vocab)
        self.assertEqual([600, 400, 640, 480],
                         images[0].annotations[0].human_box.to_list())

    @parameterized.expand([
        ("unknown_hoi", {"human_box": [0, 0, 10, 10],
                         "object_box": [0, 0, 10, 10], "hoi_id": 99}),
        ("degenerate_box", {"human_box": [10, 10, 10, 20],
                            "object_box": [0, 0, 10, 10], "hoi_id": 1}),
        ("emptied_by_clamp", {"human_box": [700, 500, 800, 600],
                              "object_box": [0, 0, 10, 10], "hoi_id": 1}),
        ("missing_field", {"human_box": [0, 0, 10, 10], "hoi_id": 1}),
        ("short_box", {"human_box": [0, 0, 10],
                       "object_box": [0, 0, 10, 10], "hoi_id": 1}),
        ("string_invisible", {"human_box": [0, 0, 10, 10],
                              "object_box": [0, 0, 10, 10], "hoi_id": 1,
                              "invisible": "false"}),
        ("integer_invisible", {"human_box": [0, 0, 10, 10],
                               "object_box": [0, 0, 10, 10], "hoi_id": 1,
                               "invisible": 1}),
    ])
    def test_schema_violations_raise(self, _, annotation):
        with TempDir("gt") as tmp:
            path = write_json(tmp, "gt.json", _gt_document(
                [_raw_image(annotations=[annotation])], self.vocab))
            with self.assertRaises(SchemaError) as context:
                parse_ground_truth(path, self.vocab)
        self.assertIn("img", str(context.exception))

    def test_duplicate_image_id_raises(self):
        with TempDir("gt") as tmp:
            path = write_json(tmp, "gt.json", _gt_document(
                [_raw_image(), _raw_image()], self.vocab))
            with self.assertRaises(SchemaError):
                parse_ground_truth(path, self.vocab)

    def test_malformed_json_reports_position(self):
        with TempDir("gt") as tmp:
            path = os.path.join(tmp, "gt.json")
            with open(path, "w") as handle:
                handle.write('{"images": [\n  {"image_id": }\n]}')
            with self.assertRaises(AnnotationParseError) as context:
                parse_ground_truth(path, self.vocab)
        self.assertEqual(2, context.exception.lineno)
        self.assertEqual(path, context.exception.path)

    def test_image_without_annotations_is_kept(self):
        with TempDir("gt") as tmp:
            path = write_json(tmp, "gt.json", _gt_document(
                [_raw_image(annotations=[])], self.vocab))
            images = parse_ground_truth(path, self.vocab)
        self.assertEqual((), tuple(images[0].annotations))

    def test_load_vocabulary_from_standalone_and_gt_files(self):
        with TempDir("vocab") as tmp:
            standalone = write_json(tmp, "vocab.json", self.vocab.to_dict())
            embedded = write_json(tmp, "gt.json",
                                  _gt_document([], self.vocab))
            self.assertEqual(self.vocab, load_vocabulary(standalone))
            self.assertEqual(self.vocab, load_vocabulary(embedded))

    def test_serialized_ground_truth_loads_back(self):
        gt = dataset([image("x", [ann(box(1, 2, 30, 40), box(5, 6, 70, 80),
                                      RIDE_HORSE, invisible=True)],
                            width=320.5, height=200)])
        with TempDir("gt") as tmp:
            path = os.path.join(tmp, "out", "gt.json")
            serialize_ground_truth(gt, path)
            loaded = load_dataset(path)
        self.assertEqual(gt.vocabulary, loaded.vocabulary)
        self.assertEqual(list(gt.images), list(loaded.images))


class PredictionParsingTest(BaseHoiTest):

    def _write(self, tmp, predictions, model_name="m"):
        return write_json(tmp, "pred.json", {"model_name": model_name,
                                             "predictions": predictions})

    def test_parse_records_insertion_index(self):
        raw = [{"image_id": "img", "human_box": [0, 0, 10, 10],
                "object_box": [0, 0, 10, 10], "hoi_id": RIDE_HORSE,
                "score": score} for score in (0.2, 0.9)]
        with TempDir("pred") as tmp:
            parsed = parse_predictions(self._write(tmp, raw), self.vocab)
        self.assertEqual("m", parsed.model_name)
        self.assertEqual([0, 1], [p.index for p in parsed])
        self.assertEqual([0.2, 0.9], [p.score for p in parsed])

    @parameterized.expand([
        ("score_above_one", 1.5, RIDE_HORSE),
        ("negative_score", -0.1, RIDE_HORSE),
        ("unknown_hoi", 0.5, 99),
    ])
    def test_invalid_predictions_raise(self, _, score, hoi_id):
        raw = [{"image_id": "img", "human_box": [0, 0, 10, 10],
                "object_box": [0, 0, 10, 10], "hoi_id": hoi_id,
                "score": score}]
        with TempDir("pred") as tmp:
            with self.assertRaises(SchemaError):
                parse_predictions(self._write(tmp, raw), self.vocab)

    def test_unknown_image_raises_when_ground_truth_is_supplied(self):
        gt = dataset([image("known", [])])
        raw = [{"image_id": "unknown", "human_box": [0, 0, 10, 10],
                "object_box": [0, 0, 10, 10], "hoi_id": RIDE_HORSE,
                "score": 0.5}]
        with TempDir("pred") as tmp:
            path = self._write(tmp, raw)
            with self.assertRaises(UnknownImageError):
                parse_predictions(path, self.vocab, gt)
            self.assertEqual(1, len(parse_predictions(path, self.vocab)))

    def test_serialized_predictions_load_back(self):
        gt = dataset([image("x", [ann(box(1, 2, 30, 40), box(5, 6, 70, 80),
                                      RIDE_HORSE)])])
        original = predictions_from_gt(gt, score=0.75)
        with TempDir("pred") as tmp:
            path = os.path.join(tmp, "pred.json")
            serialize_predictions(original, path)
            self.assertEqual("oracle", read_json(path)["model_name"])
            loaded = parse_predictions(path, self.vocab, gt)
        self.assertEqual(list(original), list(loaded))
