# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Synthetic scenes with known instance structure, and detector outputs with
injected, labelled errors.

Layout: each scene is a grid of square slots. Persons occupy the upper row,
object instances the lower row, and the last column is an empty "decoy"
column hosting mislocalized boxes. Boxes in different slots never overlap,
and injected predictions reuse exact ground-truth boxes (IoU 1) or decoy
boxes (IoU 0), so every injected error fires far from the IoU threshold.

Randomness comes from :class:`Xorshift64Star` seeded through SplitMix64, so
a given :class:`SynthSpec` produces the same bytes on every platform.
"""

from __future__ import absolute_import
from collections import OrderedDict
import logging

from hoidiag.annotation import BoundingBox, Dataset, GroundTruthImage, \
    HoiAnnotation, Prediction, PredictionSet, Vocabulary
from hoidiag.categorizer import SceneCategory
from hoidiag.error_decomposer import ErrorFlags
from hoidiag.exceptions import SynthSpecError

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def splitmix64(value):
    """
    One SplitMix64 step: returns the mixed 64-bit output for `value`.
    """
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Xorshift64Star(object):
    """
    The xorshift64* generator. The seed passes through one SplitMix64 step;
    a zero state is replaced by the SplitMix64 increment.

    State update ``s ^= s >> 12; s ^= s << 25; s ^= s >> 27`` (mod 2**64),
    output ``s * 0x2545F4914F6CDD1D`` (mod 2**64).
    """

    def __init__(self, seed):
        self._state = splitmix64(seed & _MASK64) or 0x9E3779B97F4A7C15

    def next_u64(self):
        """
        Returns the next 64-bit output
        """
        s = self._state
        s ^= s >> 12
        s ^= (s << 25) & _MASK64
        s ^= s >> 27
        self._state = s
        return (s * 0x2545F4914F6CDD1D) & _MASK64

    def random(self):
        """
        Returns a float in ``[0, 1)`` built from the top 53 bits
        """
        return (self.next_u64() >> 11) / float(1 << 53)

    def uniform(self, low, high):
        """
        Returns a float in ``[low, high)``
        """
        return low + (high - low) * self.random()

    def randint(self, low, high):
        """
        Returns an integer in ``[low, high]``
        """
        return low + int(self.random() * (high - low + 1))

    def choice(self, seq):
        """
        Returns one element of a non-empty sequence
        """
        return seq[self.randint(0, len(seq) - 1)]

    def sample(self, seq, count):
        """
        Returns `count` distinct elements of `seq`, by a partial
        Fisher-Yates shuffle
        """
        pool = list(seq)
        for i in range(count):
            j = self.randint(i, len(pool) - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:count]


_OBJECTS = ("horse", "wine_glass", "bicycle", "sports_ball")
_VERBS = ("hold", "ride", "feed", "toast", "kick", "throw", "carry")
_NO_INTERACTION = "no_interaction"


def synthetic_vocabulary():
    """
    The vocabulary of synthetic scenes: 4 objects, 7 verbs and
    ``no_interaction``, every verb combined with every object (32 HOI
    classes, ``hoi_id = (object_id - 1) * 8 + verb_id``).
    """
    objects = [(i + 1, name) for i, name in enumerate(_OBJECTS)]
    verbs = [(i + 1, name, False) for i, name in enumerate(_VERBS)]
    verbs.append((len(_VERBS) + 1, _NO_INTERACTION, True))
    hoi_classes = [((oid - 1) * len(verbs) + vid, vid, oid)
                   for oid, _ in objects for vid, _, _ in verbs]
    return Vocabulary(objects, verbs, hoi_classes)


_INTERACTIVE_VERBS = tuple(range(1, len(_VERBS) + 1))
_OBJECT_IDS = tuple(range(1, len(_OBJECTS) + 1))

#: Error types an injection plan may request, in flag order
INJECTION_TYPES = ErrorFlags.FLAG_NAMES

#: Categories able to host a pairing error (two persons on disjoint
#: instances)
_PAIRING_HOSTS = (SceneCategory.C, SceneCategory.D, SceneCategory.E,
                  SceneCategory.F)


class SynthSpec(object):
    """
    A request for synthetic scenes.
    """

    def __init__(self, seed=0, scene_count=100, person_range=(1, 3),
                 categories=SceneCategory.SINGLE_PERSON +
                 SceneCategory.MULTI_PERSON,
                 injections=None, slot_size=200.0, margin=10.0,
                 min_box=40.0):
        """
        Constructor parameters:

        :param int seed: generator seed
        :param int scene_count: number of scenes
        :param person_range: ``(min, max)`` persons per multi-person scene;
            single-person categories require ``min == 1``
        :param categories: category values assigned to scenes round-robin
            (repeat a value to weight it)
        :param dict injections: error type -> injected predictions per scene
        :param float slot_size: side of one layout slot in pixels
        :param float margin: minimum gap between a box and its slot border
        :param float min_box: minimum box side
        """
        self.seed = seed
        self.scene_count = scene_count
        self.person_range = tuple(person_range)
        self.categories = tuple(categories)
        self.injections = OrderedDict(
            (name, int((injections or {}).get(name, 0)))
            for name in INJECTION_TYPES)
        self._unknown_injections = sorted(set(injections or {}) -
                                          set(INJECTION_TYPES))
        self.slot_size = float(slot_size)
        self.margin = float(margin)
        self.min_box = float(min_box)

    def validate(self):
        """
        Check that every requested category and injection type can be
        constructed.

        :raise SynthSpecError: if the request is unconstructible
        """
        if self._unknown_injections:
            raise SynthSpecError("Unknown injection type(s): {}".format(
                ", ".join(self._unknown_injections)))
        if self.scene_count < 0:
            raise SynthSpecError("scene_count must be non-negative")
        if not self.categories:
            raise SynthSpecError("At least one category is required")
        low, high = self.person_range
        if low < 1 or high < low:
            raise SynthSpecError("Invalid person range {}".format(
                self.person_range))
        if self.slot_size < 2 * self.margin + self.min_box or \
                self.min_box <= 0 or self.margin < 0:
            raise SynthSpecError(
                "Slot size {} cannot hold a box of {} with margin {}".format(
                    self.slot_size, self.min_box, self.margin))
        for category in self.categories:
            if category in SceneCategory.SINGLE_PERSON:
                if low != 1:
                    raise SynthSpecError(
                        "Category {} needs one person but the person range "
                        "is {}".format(category, self.person_range))
            elif category in SceneCategory.MULTI_PERSON:
                if high < 2:
                    raise SynthSpecError(
                        "Category {} needs at least two persons but the "
                        "person range is {}".format(category,
                                                    self.person_range))
                if category in (SceneCategory.E, SceneCategory.F) and \
                        max(low, 2) > len(_OBJECT_IDS):
                    raise SynthSpecError(
                        "Category {} needs one object label per person; at "
                        "most {} persons are possible".format(
                            category, len(_OBJECT_IDS)))
            else:
                raise SynthSpecError("Category {} cannot be generated".format(
                    category))
        for name, count in self.injections.items():
            if count < 0:
                raise SynthSpecError("Negative injection count for {}".format(
                    name))
        if self.injections["pairing"] and \
                not any(c in _PAIRING_HOSTS for c in self.categories):
            raise SynthSpecError(
                "Pairing errors need a scene of category C, D, E or F")

    def to_dict(self):
        """
        The request as recorded in ``truth_log.json``
        """
        return OrderedDict([("seed", self.seed),
                            ("scene_count", self.scene_count),
                            ("person_range", list(self.person_range)),
                            ("categories", list(self.categories)),
                            ("injections", self.injections),
                            ("slot_size", self.slot_size),
                            ("margin", self.margin),
                            ("min_box", self.min_box)])


class InjectionEntry(object):
    """
    The intended verdict and flags of one generated prediction.
    """

    __slots__ = ("prediction_index", "image_id", "verdict", "flags")

    def __init__(self, prediction_index, image_id, verdict, flags):
        self.prediction_index = prediction_index
        self.image_id = image_id
        self.verdict = verdict
        self.flags = flags

    def to_dict(self):
        """
        The ``truth_log.json`` representation
        """
        return OrderedDict([("prediction_index", self.prediction_index),
                            ("image_id", self.image_id),
                            ("verdict", self.verdict),
                            ("flags", self.flags.names())])


class InjectionLog(object):
    """
    The ground truth about generated predictions and scenes: one
    :class:`InjectionEntry` per prediction, the injections a scene could not
    host, and the category each scene was built for.
    """

    def __init__(self, entries, skipped, scene_categories):
        self._entries = tuple(entries)
        self._skipped = tuple(skipped)
        self._scene_categories = OrderedDict(scene_categories)

    @property
    def entries(self):
        """
        Tuple of :class:`InjectionEntry`, in prediction order
        """
        return self._entries

    @property
    def skipped(self):
        """
        Tuple of ``(image_id, error type)`` injections that were skipped
        """
        return self._skipped

    @property
    def scene_categories(self):
        """
        Ordered dictionary of image id -> requested category value
        """
        return self._scene_categories

    def flag_counts(self):
        """
        Injected false positives per error type
        """
        counts = OrderedDict((name, 0) for name in ErrorFlags.FLAG_NAMES)
        for entry in self._entries:
            for name in entry.flags.names():
                counts[name] += 1
        return counts

    def to_dict(self, spec=None):
        """
        The ``truth_log.json`` representation
        """
        data = OrderedDict()
        if spec is not None:
            data["spec"] = spec.to_dict()
        data["scene_categories"] = self._scene_categories
        data["flag_counts"] = self.flag_counts()
        data["skipped"] = [{"image_id": image_id, "type": name}
                           for image_id, name in self._skipped]
        data["entries"] = [entry.to_dict() for entry in self._entries]
        return data


class _Scene(object):
    """
    Builder for the persons, object instances and interactions of one scene
    """

    def __init__(self, rng, spec):
        self.rng = rng
        self.spec = spec
        self.person_verbs = []
        self.object_labels = []

    def add_object(self, label):
        self.object_labels.append(label)
        return len(self.object_labels) - 1

    def add_person(self, pairs):
        """`pairs` maps object instance index -> verb set"""
        self.person_verbs.append(OrderedDict(pairs))

    def verbs(self, count, exclude=()):
        choices = [v for v in _INTERACTIVE_VERBS if v not in exclude]
        return sorted(self.rng.sample(choices, count))


def _person_count(rng, spec, category):
    if category in SceneCategory.SINGLE_PERSON:
        return 1
    low, high = spec.person_range
    if category in (SceneCategory.E, SceneCategory.F):
        high = min(high, len(_OBJECT_IDS))
    return rng.randint(max(low, 2), high)


def _build_scene(rng, spec, category):
    scene = _Scene(rng, spec)
    persons = _person_count(rng, spec, category)
    if category == SceneCategory.SPSO:
        obj = scene.add_object(rng.choice(_OBJECT_IDS))
        scene.add_person({obj: scene.verbs(rng.randint(1, 2))})
    elif category == SceneCategory.SPMO:
        objs = [scene.add_object(rng.choice(_OBJECT_IDS))
                for _ in range(rng.randint(2, 3))]
        scene.add_person((obj, scene.verbs(rng.randint(1, 2)))
                         for obj in objs)
    else:
        base = scene.verbs(rng.randint(1, 2))
        extra = scene.verbs(1, exclude=base)
        different = category in (SceneCategory.B, SceneCategory.D,
                                 SceneCategory.F)
        if category in (SceneCategory.A, SceneCategory.B):
            targets = [scene.add_object(rng.choice(_OBJECT_IDS))] * persons
        elif category in (SceneCategory.C, SceneCategory.D):
            label = rng.choice(_OBJECT_IDS)
            targets = [scene.add_object(label) for _ in range(persons)]
        else:
            targets = [scene.add_object(label)
                       for label in rng.sample(_OBJECT_IDS, persons)]
        for person, obj in enumerate(targets):
            verbs = sorted(base + extra) if different and person == 0 \
                else list(base)
            scene.add_person({obj: verbs})
    return scene


def _slot_box(rng, spec, column, row):
    """A random box inside the slot at (`column`, `row`)"""
    inner = spec.slot_size - 2 * spec.margin
    width = rng.uniform(spec.min_box, inner)
    height = rng.uniform(spec.min_box, inner)
    x1 = column * spec.slot_size + spec.margin + \
        rng.uniform(0.0, inner - width)
    y1 = row * spec.slot_size + spec.margin + \
        rng.uniform(0.0, inner - height)
    return BoundingBox(x1, y1, x1 + width, y1 + height)


def _hoi(vocab, verb_id, object_id):
    return vocab.find_hoi(verb_id, object_id)


def _generate_scene(spec, vocab, index):
    """
    Build one scene: its ground-truth image and its predictions as
    ``(human_box, object_box, hoi_id, score, verdict, flags)`` tuples.
    """
    rng = Xorshift64Star(splitmix64((spec.seed + index) & _MASK64))
    category = spec.categories[index % len(spec.categories)]
    image_id = "synth_{}_{:06d}".format(spec.seed, index)
    scene = _build_scene(rng, spec, category)

    columns = max(len(scene.person_verbs), len(scene.object_labels)) + 1
    human_boxes = [_slot_box(rng, spec, column, 0)
                   for column in range(len(scene.person_verbs))]
    object_boxes = [_slot_box(rng, spec, column, 1)
                    for column in range(len(scene.object_labels))]
    decoy_human = _slot_box(rng, spec, columns - 1, 0)
    decoy_object = _slot_box(rng, spec, columns - 1, 1)

    annotations = []
    pairs = []
    for person, objects in enumerate(scene.person_verbs):
        for obj, verbs in objects.items():
            pairs.append((person, obj, verbs))
            for verb in verbs:
                annotations.append(HoiAnnotation(
                    human_boxes[person], object_boxes[obj],
                    _hoi(vocab, verb, scene.object_labels[obj])))
    image = GroundTruthImage(image_id, columns * spec.slot_size,
                             2 * spec.slot_size, annotations)

    predictions = []
    tp_scores = []
    for annotation in annotations:
        score = rng.uniform(0.6, 1.0)
        tp_scores.append(score)
        predictions.append((annotation.human_box, annotation.object_box,
                            annotation.hoi_id, score, "TP", ErrorFlags()))

    skipped = []
    for name, count in spec.injections.items():
        for _ in range(count):
            injected = _inject(rng, scene, name, pairs, annotations,
                               tp_scores, human_boxes, object_boxes,
                               decoy_human, decoy_object, vocab)
            if injected is None:
                skipped.append((image_id, name))
            else:
                predictions.append(injected + (
                    "FP", ErrorFlags.from_names([name])))
    return image, category, predictions, skipped


def _inject(rng, scene, name, pairs, annotations, tp_scores, human_boxes,
            object_boxes, decoy_human, decoy_object, vocab):
    """
    Build one false positive raising exactly the flag `name`, or return
    `None` when the scene cannot host it.
    """
    labels = scene.object_labels
    score = rng.uniform(0.05, 0.95)
    person, obj, verbs = rng.choice(pairs)
    verb = rng.choice(_INTERACTIVE_VERBS)
    if name == "human_box":
        return (decoy_human, object_boxes[obj],
                _hoi(vocab, verb, labels[obj]), score)
    if name == "object_box":
        return (human_boxes[person], decoy_object,
                _hoi(vocab, verb, rng.choice(_OBJECT_IDS)), score)
    if name == "object_class":
        other = rng.choice([o for o in _OBJECT_IDS if o != labels[obj]])
        return (human_boxes[person], object_boxes[obj],
                _hoi(vocab, verb, other), score)
    if name == "verb":
        unused = [v for v in _INTERACTIVE_VERBS if v not in verbs]
        return (human_boxes[person], object_boxes[obj],
                _hoi(vocab, rng.choice(unused), labels[obj]), score)
    if name == "pairing":
        options = [(p, o) for p in range(len(scene.person_verbs))
                   for o in range(len(labels))
                   if o not in scene.person_verbs[p]]
        if not options:
            return None
        person, obj = rng.choice(options)
        return (human_boxes[person], object_boxes[obj],
                _hoi(vocab, verb, labels[obj]), score)
    # duplicate: a copy of a ground-truth pair scored below its TP copy
    target = rng.randint(0, len(annotations) - 1)
    annotation = annotations[target]
    return (annotation.human_box, annotation.object_box, annotation.hoi_id,
            tp_scores[target] * rng.uniform(0.5, 0.9))


def generate(spec, pool=None):
    """
    Generate synthetic ground truth, predictions and the injection log.

    Each scene draws from its own generator seeded with
    ``splitmix64(seed + scene_index)``, so scenes can be generated in
    parallel and the output is fixed by the :class:`SynthSpec` alone.
    Every ground-truth annotation gets a true-positive copy scored in
    ``[0.6, 1.0)``; injected false positives raise exactly the flag they were
    injected for.

    :param SynthSpec spec: the request
    :param pool: optional :class:`hoidiag._thread_pool.WorkerPool`
    :return: ``(Dataset, PredictionSet, InjectionLog)``
    :raise SynthSpecError: if the request is unconstructible
    """
    spec.validate()
    vocab = synthetic_vocabulary()

    def _scene(index):
        return _generate_scene(spec, vocab, index)

    indexes = range(spec.scene_count)
    if pool is None:
        scenes = [_scene(index) for index in indexes]
    else:
        scenes = pool.map_ordered(_scene, indexes)

    images = []
    predictions = []
    entries = []
    skipped = []
    scene_categories = []
    for image, category, scene_predictions, scene_skipped in scenes:
        images.append(image)
        scene_categories.append((image.image_id, category))
        skipped.extend(scene_skipped)
        for human_box, object_box, hoi_id, score, verdict, flags \
                in scene_predictions:
            index = len(predictions)
            predictions.append(Prediction(image.image_id, human_box,
                                          object_box, hoi_id, score, index))
            entries.append(InjectionEntry(index, image.image_id, verdict,
                                          flags))
    if skipped:
        logger.warning("Skipped %d injection(s) that their scenes could not "
                       "host", len(skipped))
    logger.info("Generated %d scenes with %d predictions", len(images),
                len(predictions))
    return (Dataset(vocab, images),
            PredictionSet("synthetic-seed-{}".format(spec.seed), predictions),
            InjectionLog(entries, skipped, scene_categories))
