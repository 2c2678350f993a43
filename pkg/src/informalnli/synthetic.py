"""Synthetic corpora, simulated predictions, and desk-scale vocabularies.

Everything here exists to exercise the pipeline without GPUs, API keys, or
dataset downloads: template-generated NLI examples whose vocabulary overlaps
the transform lexicons at realistic rates, prediction files with controlled
accuracy, and small tokenizer vocabularies built from a corpus at hand. The
vocab builders are stand-ins for published 30K/50K files, not replacements.
"""

from __future__ import annotations

import random
import string
from collections import Counter

from .corpus import LABELS, NliExample
from .errors import EmptyInput
from .tokenization import (_BPE_SPLIT, _BYTE_TO_UNIT, BpeVocab, WordPieceVocab,
                           pretokenize)

# subject: (premise form, entailed generalization)
_SUBJECTS = [
    ("A man", "A person"), ("A woman", "A person"), ("A boy", "A child"),
    ("A girl", "A child"), ("An old man", "A person"), ("A young woman", "A person"),
    ("The friend", "A person"), ("A police officer", "A worker"),
    ("A dog", "An animal"), ("Two dogs", "Some animals"), ("A cat", "An animal"),
    ("A horse", "An animal"), ("A bird", "An animal"), ("A monkey", "An animal"),
    ("A child", "A person"), ("Three children", "Some people"),
    ("A worker", "A person"), ("A dancer", "A person"), ("A runner", "A person"),
    ("A swimmer", "A person"), ("An elephant", "An animal"),
    ("A lion", "An animal"), ("A family", "A group"), ("Two women", "Some people"),
]

# activity: (premise form, entailed form, contradicting form)
_ACTIVITIES = [
    ("is running", "is moving", "is sleeping"),
    ("is walking", "is moving", "is sitting still"),
    ("is swimming", "is in the water", "is far from any water"),
    ("is dancing", "is moving", "is standing still"),
    ("is climbing", "is moving", "is lying down"),
    ("is eating an apple", "is eating", "is eating nothing"),
    ("is eating pizza", "is eating", "is eating nothing"),
    ("is drinking coffee", "is drinking", "is drinking nothing"),
    ("is reading a book", "is reading", "is reading nothing"),
    ("is taking a picture", "is holding a camera", "is holding nothing"),
    ("is going to take a picture", "is holding a camera", "is holding nothing"),
    ("is trying to catch a ball", "is playing", "is ignoring the ball"),
    ("wants to buy a gift", "is shopping", "is selling everything"),
    ("is riding a bicycle", "is riding", "is on foot"),
    ("is driving a car", "is driving", "is on foot"),
    ("is playing a guitar", "is making music", "is silent"),
    ("is playing basketball", "is playing a sport", "is playing no sport"),
    ("is flying a plane", "is traveling", "is staying home"),
]

_PLACES = [
    "in the park", "at the beach", "near the ocean", "on the mountain",
    "by the tree", "outside the house", "on the bridge", "near the fire",
    "in the rain", "under the sun", "by the door", "at the house",
    "near the train", "by the flowers",
]

_PREMISE_EXTRAS = ["", " quietly", " quickly", " with a friend", " with a smile",
                   " in the morning", " at noon", " after work", " alone"]

_NEUTRAL_EXTRAS = [" for a contest", " before lunch", " for the first time",
                   " to win a prize", " with great skill", " on a dare",
                   " for a famous photographer", " while humming"]


def make_corpus(n: int, seed: int) -> list[NliExample]:
    """Deterministic template corpus with unique contents and rich transform targets."""
    if n < 1:
        raise EmptyInput("corpus size must be positive")
    rng = random.Random(seed)
    out: list[NliExample] = []
    seen: set[tuple[str, str, str]] = set()
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 200 * n:
            raise RuntimeError(f"template space exhausted after {attempts} draws")
        subject, general = rng.choice(_SUBJECTS)
        activity, entailed, contradicted = rng.choice(_ACTIVITIES)
        place = rng.choice(_PLACES)
        extra = rng.choice(_PREMISE_EXTRAS)
        premise = f"{subject} {activity} {place}{extra}."
        label = rng.choice(LABELS)
        if label == "entailment":
            hypothesis = f"{general} {entailed}."
        elif label == "contradiction":
            hypothesis = f"{subject} {contradicted} {place}."
        else:
            hypothesis = f"{subject} {activity}{rng.choice(_NEUTRAL_EXTRAS)}."
        key = (premise, hypothesis, label)
        if key in seen:
            continue
        seen.add(key)
        out.append(NliExample.create(premise, hypothesis, label))
    return out


def simulate_predictions(gold: list[NliExample], accuracy: float, seed: int,
                         model_name: str = "sim", variant_name: str = ""):
    """IID predictions: correct with the given probability, else a wrong label."""
    from .stats import PredictionFile

    rng = random.Random(seed)
    records = []
    for ex in gold:
        if rng.random() < accuracy:
            records.append((ex.id, ex.gold_label))
        else:
            wrong = [l for l in LABELS if l != ex.gold_label]
            records.append((ex.id, rng.choice(wrong)))
    return PredictionFile(model_name, variant_name, records)


def simulate_predictions_exact(gold: list[NliExample], n_correct: int, seed: int,
                               model_name: str = "sim", variant_name: str = ""):
    """Predictions with exactly n_correct right answers at rng-chosen positions."""
    from .stats import PredictionFile

    if not 0 <= n_correct <= len(gold):
        raise ValueError("n_correct out of range")
    rng = random.Random(seed)
    correct_idx = set(rng.sample(range(len(gold)), n_correct))
    records = []
    for i, ex in enumerate(gold):
        if i in correct_idx:
            records.append((ex.id, ex.gold_label))
        else:
            wrong = [l for l in LABELS if l != ex.gold_label]
            records.append((ex.id, rng.choice(wrong)))
    return PredictionFile(model_name, variant_name, records)


_WP_SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")


def build_wordpiece_vocab(datasets: list[list[NliExample]], target_size: int = 30000,
                          lowercase: bool = True) -> WordPieceVocab:
    """Corpus-shaped stand-in for a published 30K WordPiece vocabulary.

    Covers every ASCII letter/digit/punctuation character (initial and ##
    continuation form), so ASCII words never hit [UNK]; emoji codepoints are
    deliberately absent, as in standard vocabularies. Padded with [unusedN]
    entries up to the target size.
    """
    chars = string.ascii_lowercase + ("" if lowercase else string.ascii_uppercase)
    chars += string.digits + string.punctuation
    tokens: list[str] = list(_WP_SPECIALS)
    tokens += list(chars)
    tokens += ["##" + c for c in chars]
    words = Counter()
    for dataset in datasets:
        for ex in dataset:
            for text in (ex.premise, ex.hypothesis):
                words.update(w for w in pretokenize(text, lowercase) if w.isascii())
    for word, _ in words.most_common():
        if word not in tokens and len(word) > 1:
            tokens.append(word)
    for i in range(target_size - len(tokens)):
        tokens.append(f"[unused{i}]")
    return WordPieceVocab(tuple(tokens[:max(target_size, len(tokens))]),
                          lowercase=lowercase)


def train_bpe(texts: list[str], num_merges: int = 1000) -> BpeVocab:
    """Classic frequency-greedy BPE over byte units, deterministic tie-break.

    Trained on clean corpus text, unseen surface forms (emoji bytes, filler
    tokens) stay fragmented, which is exactly the diagnostic the stats need.
    """
    pretoken_counts: Counter = Counter()
    for text in texts:
        for pretoken in _BPE_SPLIT.findall(text):
            units = tuple(_BYTE_TO_UNIT[b] for b in pretoken.encode("utf-8"))
            pretoken_counts[units] += 1

    merges: list[tuple[str, str]] = []
    symbols: dict[tuple[str, ...], int] = dict(pretoken_counts)
    for _ in range(num_merges):
        pair_counts: Counter = Counter()
        for parts, count in symbols.items():
            for pair in zip(parts, parts[1:]):
                pair_counts[pair] += count
        if not pair_counts:
            break
        best_count = max(pair_counts.values())
        if best_count < 2:
            break
        best = min(p for p, c in pair_counts.items() if c == best_count)
        merges.append(best)
        merged_symbols: dict[tuple[str, ...], int] = {}
        for parts, count in symbols.items():
            out = []
            i = 0
            while i < len(parts):
                if i < len(parts) - 1 and (parts[i], parts[i + 1]) == best:
                    out.append(parts[i] + parts[i + 1])
                    i += 2
                else:
                    out.append(parts[i])
                    i += 1
            merged_symbols[tuple(out)] = merged_symbols.get(tuple(out), 0) + count
        symbols = merged_symbols

    token_to_id: dict[str, int] = {}
    for unit in _BYTE_TO_UNIT.values():
        token_to_id[unit] = len(token_to_id)
    for a, b in merges:
        token = a + b
        if token not in token_to_id:
            token_to_id[token] = len(token_to_id)
    return BpeVocab(token_to_id, tuple(merges))
