"""Toolkit for stress-testing NLI models against informal text.

Generates meaning-preserving informal rewrites of premise/hypothesis corpora
(slang, emoji, noise, combined), measures the tokenizer-level damage they
cause, applies inverse-preprocessing and augmentation mitigations, and runs
paired significance comparisons over model prediction files.
"""

__version__ = "0.1.0"

from .corpus import LABELS, NliExample, VariantManifest, example_id, load_dataset
from .lexicons import Lexicons, load_lexicons
from .transforms import TransformEngine, derive_seed

__all__ = [
    "LABELS",
    "NliExample",
    "VariantManifest",
    "example_id",
    "load_dataset",
    "Lexicons",
    "load_lexicons",
    "TransformEngine",
    "derive_seed",
]
