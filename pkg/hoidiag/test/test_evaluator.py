# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
###############################################################################

"""
Test cases for pair matching, average precision and per-category mAP.
"""

# Run with nosetests hoidiag.test.test_evaluator

from __future__ import absolute_import

from hypothesis import assume, given, settings, strategies as st

from hoidiag import Dataset, EvalSettings, InvariantViolationError, \
    PredictionSet, UnknownImageError, average_precision, \
    categorize_dataset, evaluate, match_class
from hoidiag._thread_pool import WorkerPool
from hoidiag.evaluator import GtPair, MatchOutcome, MULTI_PERSON_GROUP, \
    SINGLE_PERSON_GROUP

from .base_test import BaseHoiTest, HOLD_CUP, RIDE_HORSE, ann, box, \
    dataset, image, pred, predictions_from_gt, scene_fixture, slot
from .naive_evaluator import naive_ap, naive_hits

# pylint: disable=missing-docstring


_COORDS = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(1, 4),
                    st.integers(1, 4)).map(
                        lambda t: (t[0] * 10, t[1] * 10, t[0] * 10 + t[2] * 10,
                                   t[1] * 10 + t[3] * 10))
_IMAGES = st.sampled_from(["i0", "i1"])
_GT = st.lists(st.tuples(_IMAGES, _COORDS, _COORDS), min_size=1, max_size=8)
_PREDICTED = st.lists(st.tuples(_IMAGES, _COORDS, _COORDS,
                                st.sampled_from([0.1, 0.3, 0.5, 0.7, 0.9])),
                      max_size=12)


def _gt_pairs(gt):
    return [GtPair(image_id, index, box(*human), box(*obj))
            for index, (image_id, human, obj) in enumerate(gt)]


def _predictions(predicted):
    return [pred(image_id, box(*human), box(*obj), RIDE_HORSE, score, index)
            for index, (image_id, human, obj, score) in enumerate(predicted)]


def _ap(gt, predicted):
    return average_precision(match_class(_gt_pairs(gt),
                                         _predictions(predicted)), len(gt))


def _pairs(*boxes):
    return [GtPair("x", index, human, obj)
            for index, (human, obj) in enumerate(boxes)]


class MatchClassTest(BaseHoiTest):

    def test_ranked_outcomes_and_average_precision(self):
        pairs = _pairs((slot(0), slot(0, 1)), (slot(1), slot(1, 1)))
        outcomes = match_class(pairs, [
            pred("x", slot(5), slot(5, 1), RIDE_HORSE, 0.8, 0),
            pred("x", slot(1), slot(1, 1), RIDE_HORSE, 0.7, 1),
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.9, 2)])
        self.assertEqual([2, 0, 1], [o.prediction_index for o in outcomes])
        self.assertEqual([True, False, True], [o.is_tp for o in outcomes])
        self.assertEqual(("x", 0), outcomes[0].matched_gt)
        self.assertAlmostEqual(0.5 * 1.0 + 0.5 * (2.0 / 3.0),
                               average_precision(outcomes, 2), places=12)

    def test_each_pair_is_claimed_once(self):
        outcomes = match_class(_pairs((slot(0), slot(0, 1))), [
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.9, 0),
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.8, 1)])
        self.assertEqual([MatchOutcome.TP, MatchOutcome.FP],
                         [o.verdict for o in outcomes])
        self.assertIsNone(outcomes[1].matched_gt)

    def test_threshold_is_exclusive(self):
        # the human boxes overlap with iou exactly 0.5
        pairs = _pairs((box(0, 0, 100, 100), slot(0, 1)))
        prediction = pred("x", box(0, 0, 100, 50), slot(0, 1), RIDE_HORSE,
                          0.9)
        self.assertFalse(match_class(pairs, [prediction], 0.5)[0].is_tp)
        outcome = match_class(pairs, [prediction], 0.4)[0]
        self.assertTrue(outcome.is_tp)
        self.assertEqual(0.5, outcome.match_iou)

    def test_ties_claim_the_lowest_annotation_index(self):
        pairs = _pairs((slot(0), slot(0, 1)), (slot(0), slot(0, 1)))
        outcomes = match_class(pairs, [
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.9)])
        self.assertEqual(("x", 0), outcomes[0].matched_gt)

    def test_pairs_of_other_images_are_never_matched(self):
        pairs = [GtPair("y", 0, slot(0), slot(0, 1))]
        outcomes = match_class(pairs, [
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.9)])
        self.assertFalse(outcomes[0].is_tp)

    def test_average_precision_invariants(self):
        with self.assertRaises(InvariantViolationError):
            average_precision([], 0)
        outcomes = match_class(_pairs((slot(0), slot(0, 1))), [
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.9)])
        with self.assertRaises(InvariantViolationError):
            average_precision(outcomes + outcomes, 1)
        self.assertEqual(0.0, average_precision([], 3))

    @given(_GT, _PREDICTED)
    @settings(max_examples=100, deadline=None)
    def test_agrees_with_plain_reference(self, gt, predicted):
        outcomes = match_class(_gt_pairs(gt), _predictions(predicted), 0.5)
        hits = naive_hits(gt, predicted, 0.5)
        self.assertEqual(hits, [o.is_tp for o in outcomes])
        self.assertAlmostEqual(naive_ap(hits, len(gt)),
                               average_precision(outcomes, len(gt)),
                               delta=1e-9)

    @given(_GT, _PREDICTED, _COORDS, _COORDS,
           st.sampled_from([0.1, 0.5, 0.9, 1.0]))
    @settings(max_examples=100, deadline=None)
    def test_false_positive_never_raises_ap(self, gt, predicted, human, obj,
                                            score):
        # no ground truth lives in image i2
        extra = predicted + [("i2", human, obj, score)]
        self.assertLessEqual(_ap(gt, extra), _ap(gt, predicted) + 1e-12)

    @given(_GT, _PREDICTED, st.data())
    @settings(max_examples=100, deadline=None)
    def test_top_ranked_true_positive_never_lowers_ap(self, gt, predicted,
                                                      data):
        outcomes = match_class(_gt_pairs(gt), _predictions(predicted))
        matched = set(o.matched_gt for o in outcomes if o.is_tp)
        unique = [index for index, entry in enumerate(gt)
                  if gt.count(entry) == 1 and
                  (entry[0], index) not in matched]
        assume(unique)
        image_id, human, obj = gt[data.draw(st.sampled_from(unique))]
        extra = predicted + [(image_id, human, obj, 1.0)]
        self.assertGreaterEqual(_ap(gt, extra), _ap(gt, predicted) - 1e-12)

    @given(_GT, _PREDICTED)
    @settings(max_examples=100, deadline=None)
    def test_raising_the_threshold_never_adds_true_positives(self, gt,
                                                             predicted):
        counts = [sum(o.is_tp for o in match_class(
            _gt_pairs(gt), _predictions(predicted), threshold))
                  for threshold in (0.1, 0.3, 0.5, 0.7, 0.9)]
        self.assertEqual(sorted(counts, reverse=True), counts)


class EvaluateTest(BaseHoiTest):

    def test_perfect_detector_scores_one(self):
        gt = scene_fixture()
        report = evaluate(gt, predictions_from_gt(gt),
                          categorize_dataset(gt))
        self.assertEqual(1.0, report.map_overall)
        self.assertEqual(1.0, report.per_group_map[SINGLE_PERSON_GROUP])
        self.assertEqual(1.0, report.per_group_map[MULTI_PERSON_GROUP])
        self.assertEqual(0.0, report.group_gap)
        self.assertEqual("oracle", report.model_name)

    def test_no_predictions_scores_zero(self):
        gt = scene_fixture()
        report = evaluate(gt, PredictionSet("empty", []))
        self.assertEqual(0.0, report.map_overall)
        self.assertIsNone(report.group_gap)
        self.assertEqual({}, dict(report.per_category_map))

    def test_no_matchable_ground_truth_has_no_map(self):
        gt = dataset([image("a", [ann(slot(0), slot(0, 1), RIDE_HORSE,
                                      invisible=True)])])
        report = evaluate(gt, predictions_from_gt(gt),
                          settings=EvalSettings(strict_visible=True))
        self.assertIsNone(report.map_overall)
        self.assertEqual({}, dict(report.per_class_ap))
        self.assertIsNone(report.to_dict()["map_overall"])

    def test_unknown_prediction_image_raises(self):
        gt = scene_fixture()
        with self.assertRaises(UnknownImageError):
            evaluate(gt, [pred("zzz", slot(0), slot(0, 1), RIDE_HORSE, 0.5)])

    def test_strict_visible_drops_invisible_pairs(self):
        gt = dataset([
            image("seen", [ann(slot(0), slot(0, 1), RIDE_HORSE)]),
            image("hidden", [ann(slot(0), slot(0, 1), RIDE_HORSE, True)])])
        predictions = [pred("seen", slot(0), slot(0, 1), RIDE_HORSE, 0.9)]
        lenient = evaluate(gt, predictions)
        strict = evaluate(gt, predictions, settings=EvalSettings(
            strict_visible=True))
        self.assertEqual(0.5, lenient.per_class_ap[RIDE_HORSE].ap)
        self.assertEqual(2, lenient.per_class_ap[RIDE_HORSE].gt_count)
        self.assertEqual(1.0, strict.per_class_ap[RIDE_HORSE].ap)
        self.assertEqual(1, strict.per_class_ap[RIDE_HORSE].gt_count)

    def test_single_person_only_detector_shows_a_gap(self):
        gt = scene_fixture()
        assignments = categorize_dataset(gt)
        oracle = predictions_from_gt(gt)
        single = PredictionSet("single", [p for p in oracle
                                          if p.image_id in ("spso", "spmo")])
        report = evaluate(gt, single, assignments)
        self.assertEqual(1.0, report.per_category_map["SPSO"])
        self.assertEqual(0.0, report.per_category_map["A"])
        self.assertEqual(1.0, report.group_gap)
        self.assertEqual(1.0, report.class_ap("SPSO", RIDE_HORSE))
        self.assertIsNone(report.class_ap("SPSO", HOLD_CUP))
        self.assertEqual(8, len(report.per_category_map))

    def test_category_subset_matches_evaluating_the_subset_alone(self):
        gt = scene_fixture()
        noisy = list(predictions_from_gt(gt, score=0.6))
        noisy.append(pred("c", slot(4), slot(4, 1), RIDE_HORSE, 0.9,
                          len(noisy)))
        noisy.append(pred("c", slot(1), slot(1, 1), RIDE_HORSE, 0.95,
                          len(noisy)))
        report = evaluate(gt, noisy, categorize_dataset(gt))
        alone = evaluate(Dataset(gt.vocabulary, [gt.image("c")]),
                         [p for p in noisy if p.image_id == "c"])
        self.assertEqual(dict(alone.per_class_ap),
                         dict(report.per_category_class_ap["C"]))

    def test_per_class_rows(self):
        gt = scene_fixture()
        report = evaluate(gt, predictions_from_gt(gt))
        rows = dict((row[0], row)
                    for row in report.per_class_rows(gt.vocabulary))
        self.assertEqual((RIDE_HORSE, "ride", "horse", 12, 1.0),
                         rows[RIDE_HORSE])

    def test_report_is_independent_of_thread_count(self):
        gt = scene_fixture()
        predictions = predictions_from_gt(gt, score=0.5)
        assignments = categorize_dataset(gt)
        inline = evaluate(gt, predictions, assignments)
        threaded = evaluate(gt, predictions, assignments,
                            pool=WorkerPool(3))
        self.assertEqual(inline.to_dict(), threaded.to_dict())
