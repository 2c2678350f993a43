"""Training-set augmentation: 50% copy probability, uniform transform choice.

Output layout is all originals in input order, then the transformed copies
in the same relative order. Copy decisions derive from
derive_seed(seed, example_id, "augment"), so membership of the copy set
never depends on file order and reruns are bit-identical.
"""

from __future__ import annotations

import random

from .corpus import NliExample, example_id
from .transforms import TRANSFORM_NAMES, TransformEngine, derive_seed

COPY_PROBABILITY = 0.5


def augment_dataset(examples: list[NliExample], seed: int,
                    transform_engine: TransformEngine) -> list[NliExample]:
    copies: list[NliExample] = []
    for ex in examples:
        rng = random.Random(derive_seed(seed, ex.id, "augment"))
        if rng.random() >= COPY_PROBABILITY:
            continue
        transform = rng.choice(TRANSFORM_NAMES)
        transformed, _ = transform_engine.transform_example(ex, transform, seed)
        copies.append(NliExample(
            id=example_id(transformed.premise, transformed.hypothesis, ex.gold_label),
            premise=transformed.premise,
            hypothesis=transformed.hypothesis,
            gold_label=ex.gold_label,
            source_id=ex.id,
            transform=transform,
        ))
    return list(examples) + copies
