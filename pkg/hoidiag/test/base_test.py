""" Fixtures and builders shared by the hoidiag tests. """

from __future__ import absolute_import
import json
import os
import shutil
import tempfile
from unittest import TestCase

from hypothesis import strategies as st

from hoidiag import BoundingBox, Dataset, GroundTruthImage, HoiAnnotation, \
    Prediction, PredictionSet, Vocabulary

# pylint: disable=missing-docstring, no-self-use

# Object ids
HORSE = 1
BICYCLE = 2
CUP = 3

# Verb ids
RIDE = 1
FEED = 2
HOLD = 3
NO_INTERACTION = 4

# HOI class ids
RIDE_HORSE = 1
FEED_HORSE = 2
HOLD_HORSE = 3
NONE_HORSE = 4
RIDE_BICYCLE = 5
HOLD_BICYCLE = 6
NONE_BICYCLE = 7
HOLD_CUP = 8
NONE_CUP = 9


def tiny_vocabulary():
    return Vocabulary(
        [(HORSE, "horse"), (BICYCLE, "bicycle"), (CUP, "cup")],
        [(RIDE, "ride", False), (FEED, "feed", False), (HOLD, "hold", False),
         (NO_INTERACTION, "no_interaction", True)],
        [(RIDE_HORSE, RIDE, HORSE), (FEED_HORSE, FEED, HORSE),
         (HOLD_HORSE, HOLD, HORSE), (NONE_HORSE, NO_INTERACTION, HORSE),
         (RIDE_BICYCLE, RIDE, BICYCLE), (HOLD_BICYCLE, HOLD, BICYCLE),
         (NONE_BICYCLE, NO_INTERACTION, BICYCLE),
         (HOLD_CUP, HOLD, CUP), (NONE_CUP, NO_INTERACTION, CUP)])


def box(x1, y1, x2, y2):
    return BoundingBox(x1, y1, x2, y2)


def slot(column, row=0, size=100):
    """A 60x60 box inside grid slot (column, row); distinct slots never
    overlap"""
    return BoundingBox(column * size + 20, row * size + 20,
                       column * size + 80, row * size + 80)


def jittered_box(column, jitter, row=0):
    """A 100x100 box in a 60 pixel column shifted right by `jitter`. At the
    default merge threshold boxes of one column merge when their jitter
    differs by 10 (iou 9/11) and stay apart at 20 (iou 2/3). Different
    columns never merge."""
    return BoundingBox(column * 60 + jitter, row * 300,
                       column * 60 + jitter + 100, row * 300 + 100)


#: Lists of (person column, person jitter, object column, object jitter,
#: hoi_id) drawing overlapping and chained instances
JITTERED_LAYOUTS = st.lists(
    st.tuples(st.integers(0, 3), st.sampled_from([0, 10, 20]),
              st.integers(0, 3), st.sampled_from([0, 10, 20]),
              st.sampled_from([RIDE_HORSE, FEED_HORSE, HOLD_HORSE,
                               RIDE_BICYCLE, HOLD_CUP])),
    min_size=1, max_size=8)


def jittered_annotations(layout, factor=1):
    return [ann(jittered_box(h, hj).scaled(factor),
                jittered_box(o, oj, 1).scaled(factor), hoi_id)
            for h, hj, o, oj, hoi_id in layout]


def ann(human_box, object_box, hoi_id, invisible=False):
    return HoiAnnotation(human_box, object_box, hoi_id, invisible)


def image(image_id, annotations, width=1000, height=1000):
    return GroundTruthImage(image_id, width, height, annotations)


def dataset(images, vocab=None):
    return Dataset(vocab or tiny_vocabulary(), images)


def pred(image_id, human_box, object_box, hoi_id, score, index=0):
    return Prediction(image_id, human_box, object_box, hoi_id, score, index)


def predictions_from_gt(gt, score=1.0, model_name="oracle"):
    """Every ground-truth annotation fed back as a prediction"""
    predictions = []
    for gt_image in gt.images:
        for annotation in gt_image.annotations:
            predictions.append(pred(gt_image.image_id, annotation.human_box,
                                    annotation.object_box, annotation.hoi_id,
                                    score, len(predictions)))
    return PredictionSet(model_name, predictions)


def write_json(directory, file_name, data):
    file_path = os.path.join(directory, file_name)
    with open(file_path, "w") as handle:
        json.dump(data, handle)
    return file_path


def read_json(file_path):
    with open(file_path) as handle:
        return json.load(handle)


def read_text(file_path):
    with open(file_path) as handle:
        return handle.read()


class TempDir(object):
    def __init__(self, prefix, delete_on_exit=True):
        self.prefix = prefix
        self.dir = None
        self.delete_on_exit = delete_on_exit

    def __enter__(self):
        self.dir = tempfile.mkdtemp(prefix="{}_".format(self.prefix))
        return self.dir

    def __exit__(self, exception_type, exception_value, traceback):
        if self.delete_on_exit and self.dir:
            shutil.rmtree(self.dir)


def scene_fixture():
    """
    One image per scene category, built on disjoint grid slots:

    - ``spso``: one person riding one horse
    - ``spmo``: one person holding a cup and riding a bicycle
    - ``a``: two persons riding one shared horse
    - ``b``: two persons on one shared horse, one also feeding it
    - ``c``: two persons each riding their own horse
    - ``d``: two persons on their own horses, one also feeding it
    - ``e``: one person rides a horse, the other rides a bicycle
    - ``f``: one person rides a horse, the other holds a cup
    - ``none``: only no_interaction
    - ``hidden``: only invisible annotations
    """
    h0, h1 = slot(0), slot(1)
    o0, o1 = slot(0, 1), slot(1, 1)
    return dataset([
        image("spso", [ann(h0, o0, RIDE_HORSE)]),
        image("spmo", [ann(h0, o0, HOLD_CUP), ann(h0, o1, RIDE_BICYCLE)]),
        image("a", [ann(h0, o0, RIDE_HORSE), ann(h1, o0, RIDE_HORSE)]),
        image("b", [ann(h0, o0, RIDE_HORSE), ann(h0, o0, FEED_HORSE),
                    ann(h1, o0, RIDE_HORSE)]),
        image("c", [ann(h0, o0, RIDE_HORSE), ann(h1, o1, RIDE_HORSE)]),
        image("d", [ann(h0, o0, RIDE_HORSE), ann(h0, o0, FEED_HORSE),
                    ann(h1, o1, RIDE_HORSE)]),
        image("e", [ann(h0, o0, RIDE_HORSE), ann(h1, o1, RIDE_BICYCLE)]),
        image("f", [ann(h0, o0, RIDE_HORSE), ann(h1, o1, HOLD_CUP)]),
        image("none", [ann(h0, o0, NONE_HORSE)]),
        image("hidden", [ann(h0, o0, RIDE_HORSE, invisible=True)]),
    ])


class BaseHoiTest(TestCase):
    def setUp(self):
        self.vocab = tiny_vocabulary()
