# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
###############################################################################

"""
Test cases for false-positive attribution and threshold sweeps.
"""

# Run with nosetests hoidiag.test.test_error_decomposer

from __future__ import absolute_import

from hypothesis import given, settings, strategies as st
from parameterized import parameterized

from hoidiag import ConfigurationError, ErrorFlags, \
    InvariantViolationError, categorize_dataset, decompose_fp, \
    parse_threshold_grid, sweep
from hoidiag._thread_pool import WorkerPool
from hoidiag.error_decomposer import OVERALL, SWEEP_GROUPS, \
    decompose_outcomes
from hoidiag.evaluator import match_all

from .base_test import BaseHoiTest, FEED_HORSE, HOLD_CUP, HOLD_HORSE, \
    NONE_HORSE, RIDE_BICYCLE, RIDE_HORSE, ann, dataset, image, pred, \
    predictions_from_gt, scene_fixture, slot

# pylint: disable=missing-docstring


def _one_rider():
    return dataset([image("x", [ann(slot(0), slot(0, 1), RIDE_HORSE)])])


def _two_riders():
    return dataset([image("x", [ann(slot(0), slot(0, 1), RIDE_HORSE),
                                ann(slot(1), slot(1, 1), RIDE_HORSE)])])


def _false_positive_flags(gt, predictions):
    outcomes = match_all(gt, predictions)
    return [flags for outcome, flags in decompose_outcomes(gt, outcomes)
            if not outcome.is_tp]


class ErrorFlagsTest(BaseHoiTest):

    def test_names_follow_flag_order(self):
        flags = ErrorFlags.from_names(["duplicate", "human_box"])
        self.assertEqual(["human_box", "duplicate"], flags.names())
        self.assertTrue(flags.any())
        self.assertFalse(ErrorFlags().any())

    def test_invalid_flags(self):
        with self.assertRaises(ValueError):
            ErrorFlags(background=True)
        with self.assertRaises(InvariantViolationError):
            ErrorFlags(object_box=True, object_class=True)


class DecomposeTest(BaseHoiTest):

    @parameterized.expand([
        ("human_box", _one_rider,
         pred("x", slot(5), slot(0, 1), RIDE_HORSE, 0.9), ["human_box"]),
        ("object_box", _one_rider,
         pred("x", slot(0), slot(5, 1), RIDE_HORSE, 0.9), ["object_box"]),
        ("both_boxes", _one_rider,
         pred("x", slot(5), slot(5, 1), RIDE_HORSE, 0.9),
         ["human_box", "object_box"]),
        ("object_class", _one_rider,
         pred("x", slot(0), slot(0, 1), HOLD_CUP, 0.9), ["object_class"]),
        ("verb", _one_rider,
         pred("x", slot(0), slot(0, 1), FEED_HORSE, 0.9), ["verb"]),
        ("pairing", _two_riders,
         pred("x", slot(0), slot(1, 1), RIDE_HORSE, 0.9), ["pairing"]),
    ])
    def test_single_error(self, _, build, prediction, expected):
        self.assertEqual([expected],
                         [flags.names() for flags
                          in _false_positive_flags(build(), [prediction])])

    def test_lower_ranked_copy_is_a_duplicate(self):
        predictions = [pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.9, 0),
                       pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.4, 1)]
        self.assertEqual([["duplicate"]],
                         [flags.names() for flags in
                          _false_positive_flags(_one_rider(), predictions)])

    def test_true_positive_cannot_be_decomposed(self):
        gt = _one_rider()
        outcomes = match_all(gt, [pred("x", slot(0), slot(0, 1), RIDE_HORSE,
                                       0.9)])
        with self.assertRaises(InvariantViolationError):
            decompose_fp(outcomes[RIDE_HORSE][0], gt.image("x"),
                         gt.vocabulary, set())

    def test_true_positives_carry_clear_flags(self):
        gt = scene_fixture()
        outcomes = match_all(gt, predictions_from_gt(gt))
        results = decompose_outcomes(gt, outcomes)
        self.assertTrue(results)
        self.assertFalse(any(flags.any() for _, flags in results))

    @given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2),
                              st.sampled_from([RIDE_HORSE, FEED_HORSE,
                                               HOLD_HORSE, NONE_HORSE,
                                               RIDE_BICYCLE, HOLD_CUP]),
                              st.sampled_from([0.2, 0.5, 0.8])),
                    max_size=10))
    @settings(max_examples=100, deadline=None)
    def test_every_false_positive_raises_a_flag(self, layout):
        gt = scene_fixture()
        predictions = [pred("d", slot(h), slot(o, 1), hoi, score, index)
                       for index, (h, o, hoi, score) in enumerate(layout)]
        for flags in _false_positive_flags(gt, predictions):
            self.assertTrue(flags.any())


class ThresholdGridTest(BaseHoiTest):

    def test_range_includes_stop(self):
        self.assertEqual([0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
                         parse_threshold_grid("0.0:0.9:0.1"))

    def test_list(self):
        self.assertEqual([0.25, 0.75], parse_threshold_grid("0.25, 0.75"))

    @parameterized.expand([
        ("empty", ""),
        ("two_parts", "0:1"),
        ("zero_step", "0:1:0"),
        ("descending", "0.5,0.2"),
        ("out_of_range", "0:1.5:0.5"),
        ("not_a_number", "low,high"),
    ])
    def test_invalid_grid_raises(self, _, text):
        with self.assertRaises(ConfigurationError):
            parse_threshold_grid(text)


class SweepTest(BaseHoiTest):

    def _noisy(self, gt):
        predictions = list(predictions_from_gt(gt, score=0.95))
        for position, score in enumerate([0.05, 0.25, 0.45, 0.65, 0.85]):
            predictions.append(pred("c", slot(5 + position), slot(0, 1),
                                    RIDE_HORSE, score, len(predictions)))
            predictions.append(pred("spso", slot(0), slot(0, 1), FEED_HORSE,
                                    score, len(predictions)))
        return predictions

    def test_rows_cover_every_group_threshold_and_flag(self):
        gt = scene_fixture()
        result = sweep(gt, self._noisy(gt), categorize_dataset(gt),
                       parse_threshold_grid("0.0:0.9:0.1"))
        rows = result.rows()
        self.assertEqual(len(SWEEP_GROUPS) * 10 * 6, len(rows))
        self.assertEqual((OVERALL, 0.0, "human_box", 5, 0.5), rows[0])

    def test_false_positives_shrink_with_the_threshold(self):
        gt = scene_fixture()
        result = sweep(gt, self._noisy(gt), categorize_dataset(gt),
                       parse_threshold_grid("0.0:0.9:0.1"))
        counts = [result.cell(OVERALL, t).fp_count for t in result.thresholds]
        self.assertEqual(10, counts[0])
        self.assertEqual(sorted(counts, reverse=True), counts)
        self.assertEqual(0, counts[-1])
        self.assertEqual(5, result.cell("C", 0.0).fp_count)
        self.assertEqual(5, result.cell("SPSO", 0.0).counts["verb"])
        self.assertEqual(0, result.cell("A", 0.0).fp_count)

    def test_each_threshold_rematches_the_kept_predictions(self):
        gt = _one_rider()
        predictions = [
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.8, 0),
            pred("x", slot(0), slot(0, 1), RIDE_HORSE, 0.5, 1),
            pred("x", slot(5), slot(0, 1), RIDE_HORSE, 0.3, 2),
            pred("x", slot(0), slot(0, 1), FEED_HORSE, 0.95, 3)]
        thresholds = [0.0, 0.4, 0.6, 0.9, 1.0]
        result = sweep(gt, predictions, categorize_dataset(gt), thresholds)
        expected = {0.0: (3, 1, 1, 1), 0.4: (2, 1, 0, 1),
                    0.6: (1, 0, 0, 1), 0.9: (1, 0, 0, 1),
                    1.0: (0, 0, 0, 0)}
        for threshold in thresholds:
            cell = result.cell(OVERALL, threshold)
            self.assertEqual(expected[threshold],
                             (cell.fp_count, cell.counts["duplicate"],
                              cell.counts["human_box"], cell.counts["verb"]))
            kept = [p for p in predictions if p.score >= threshold]
            rematched = _false_positive_flags(gt, kept)
            self.assertEqual(len(rematched), cell.fp_count)
            for name in ErrorFlags.FLAG_NAMES:
                self.assertEqual(sum(getattr(f, name) for f in rematched),
                                 cell.counts[name])
        self.assertEqual(result.cell(OVERALL, 0.0).counts,
                         result.cell("SPSO", 0.0).counts)

    def test_cooccurrence_diagonal_matches_counts(self):
        gt = scene_fixture()
        cell = sweep(gt, self._noisy(gt), categorize_dataset(gt),
                     [0.0]).cell(OVERALL, 0.0)
        for position, name in enumerate(ErrorFlags.FLAG_NAMES):
            self.assertEqual(cell.counts[name],
                             cell.cooccurrence[position][position])

    def test_result_is_independent_of_thread_count(self):
        gt = scene_fixture()
        assignments = categorize_dataset(gt)
        grid = parse_threshold_grid("0.0:0.9:0.1")
        inline = sweep(gt, self._noisy(gt), assignments, grid)
        threaded = sweep(gt, self._noisy(gt), assignments, grid,
                         pool=WorkerPool(4))
        self.assertEqual(inline.to_dict(), threaded.to_dict())

    @parameterized.expand([([],), ([0.5, 0.5],), ([0.6, 0.2],)])
    def test_invalid_thresholds_raise(self, thresholds):
        gt = scene_fixture()
        with self.assertRaises(ConfigurationError):
            sweep(gt, [], (), thresholds)
