"""The four meaning-preserving surface transforms: slang, emoji, noise, combined.

Every transform is a pure function of (text, lexicons, derived seed). Noise is
the only randomized transform: it draws one filler token per example from an
RNG seeded by derive_seed(dataset_seed, example_id, variant_name), so results
never depend on file order or thread schedule.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .corpus import NliExample
from .lexicons import Lexicons

TRANSFORM_NAMES = ("slang", "emoji", "noise", "combined")

_MASK64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    # SplitMix64 finalizer: full avalanche over 64 bits
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(dataset_seed: int, example_id: str, variant_name: str) -> int:
    """Per-(example, variant) seed; pure, position-independent, 64-bit."""
    h = _mix64(dataset_seed)
    for chunk in (example_id.encode("utf-8"), variant_name.encode("utf-8")):
        for i in range(0, len(chunk), 8):
            h = _mix64(h ^ int.from_bytes(chunk[i:i + 8], "little"))
        h = _mix64(h ^ len(chunk))
    return h


@dataclass(frozen=True)
class Replacement:
    field: str            # premise | hypothesis
    span_start: int       # offsets into the text this replacement's stage read
    span_end: int
    original_text: str
    replacement_text: str
    kind: str             # slang | emoji | noise


@dataclass
class TransformTrace:
    example_id: str
    variant_name: str
    replacements: list[Replacement]
    words_replaced_count: int

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "variant_name": self.variant_name,
            "words_replaced_count": self.words_replaced_count,
            "replacements": [vars(r) for r in self.replacements],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TransformTrace":
        return cls(
            example_id=raw["example_id"],
            variant_name=raw["variant_name"],
            replacements=[Replacement(**r) for r in raw["replacements"]],
            words_replaced_count=raw["words_replaced_count"],
        )


def load_traces(path: str | Path) -> list[TransformTrace]:
    traces = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                traces.append(TransformTrace.from_dict(json.loads(line)))
    return traces


@lru_cache(maxsize=32)
def _phrase_pattern(phrases: tuple[str, ...]) -> re.Pattern:
    """Alternation regex over phrases, longest-first so multi-word entries win."""
    ordered = sorted(phrases, key=lambda p: (-len(p.split()), -len(p)))
    body = "|".join(re.escape(p) for p in ordered)
    return re.compile(rf"\b(?:{body})\b", re.IGNORECASE)


def _match_case(matched: str, replacement: str) -> str:
    if matched[:1].isupper() and replacement:
        return replacement[0].upper() + replacement[1:]
    return replacement


def _substitute(text: str, pattern: re.Pattern, lookup, kind: str,
                field_name: str) -> tuple[str, list[Replacement]]:
    replacements = []

    def repl(m: re.Match) -> str:
        out = _match_case(m.group(0), lookup(m.group(0).lower()))
        replacements.append(Replacement(field_name, m.start(), m.end(),
                                        m.group(0), out, kind))
        return out

    return pattern.sub(repl, text), replacements


def apply_slang(text: str, lexicon, field_name: str = "text") -> tuple[str, list[Replacement]]:
    """Replace every formal phrase (word-boundary, longest-first) by its informal form."""
    mapping = {f.lower(): i for f, i in lexicon.entries}
    pattern = _phrase_pattern(tuple(mapping))
    return _substitute(text, pattern, mapping.__getitem__, "slang", field_name)


def apply_emoji(text: str, lexicon, field_name: str = "text") -> tuple[str, list[Replacement]]:
    """Replace every mapped whole word by its emoji codepoint."""
    pattern = _phrase_pattern(tuple(lexicon.word_to_emoji))
    # emoji substitutions never take case adjustments
    replacements = []

    def repl(m: re.Match) -> str:
        out = lexicon.word_to_emoji[m.group(0).lower()]
        replacements.append(Replacement(field_name, m.start(), m.end(),
                                        m.group(0), out, "emoji"))
        return out

    return pattern.sub(repl, text), replacements


_TRAILING_PUNCT = re.compile(r"([.!?]+)\s*$")


def apply_noise(premise: str, hypothesis: str, lexicon,
                rng: random.Random) -> tuple[str, str, Replacement]:
    """Append one uniformly drawn filler token to the hypothesis.

    The token lands before trailing sentence punctuation when present,
    otherwise at the end after a single space. The premise is untouched.
    """
    token = rng.choice(lexicon.tokens)
    m = _TRAILING_PUNCT.search(hypothesis)
    if m:
        prefix = hypothesis[:m.start(1)].rstrip()
        body = f"{prefix} {token}" if prefix else token
        new_hyp = body + m.group(1)
    else:
        prefix = hypothesis.rstrip()
        new_hyp = f"{prefix} {token}" if prefix else token
    start = len(new_hyp) - len(token) - (len(m.group(1)) if m else 0)
    rep = Replacement("hypothesis", start, start + len(token), "", token, "noise")
    return premise, new_hyp, rep


@dataclass(frozen=True)
class TransformEngine:
    """Applies a named transform to a full example, producing a trace.

    Trace spans are recorded in the coordinates of the text each stage read,
    so in the combined pipeline emoji spans index the post-slang text.
    """

    lexicons: Lexicons

    def transform_example(self, example: NliExample, variant_name: str,
                          dataset_seed: int) -> tuple[NliExample, TransformTrace]:
        if variant_name == "original":
            return example, TransformTrace(example.id, variant_name, [], 0)
        if variant_name not in TRANSFORM_NAMES:
            raise ValueError(f"unknown transform {variant_name!r}")

        premise, hypothesis = example.premise, example.hypothesis
        replacements: list[Replacement] = []

        if variant_name in ("slang", "combined"):
            premise, reps_p = apply_slang(premise, self.lexicons.slang, "premise")
            hypothesis, reps_h = apply_slang(hypothesis, self.lexicons.slang, "hypothesis")
            replacements += reps_p + reps_h
        if variant_name in ("emoji", "combined"):
            premise, reps_p = apply_emoji(premise, self.lexicons.emoji, "premise")
            hypothesis, reps_h = apply_emoji(hypothesis, self.lexicons.emoji, "hypothesis")
            replacements += reps_p + reps_h
        words_replaced = len(replacements)
        if variant_name in ("noise", "combined"):
            rng = random.Random(derive_seed(dataset_seed, example.id, variant_name))
            premise, hypothesis, rep = apply_noise(premise, hypothesis,
                                                   self.lexicons.noise, rng)
            replacements.append(rep)

        trace = TransformTrace(example.id, variant_name, replacements, words_replaced)
        return example.with_text(premise, hypothesis), trace


def apply_combined(example: NliExample, lexicons: Lexicons,
                   rng: random.Random) -> tuple[NliExample, TransformTrace]:
    """Slang, then emoji, then noise; ordered so emoji cannot break slang phrases.

    The rng draws only the noise token; slang and emoji are deterministic.
    """
    premise, reps1 = apply_slang(example.premise, lexicons.slang, "premise")
    hypothesis, reps2 = apply_slang(example.hypothesis, lexicons.slang, "hypothesis")
    premise, reps3 = apply_emoji(premise, lexicons.emoji, "premise")
    hypothesis, reps4 = apply_emoji(hypothesis, lexicons.emoji, "hypothesis")
    words_replaced = len(reps1) + len(reps2) + len(reps3) + len(reps4)
    premise, hypothesis, noise_rep = apply_noise(premise, hypothesis,
                                                 lexicons.noise, rng)
    trace = TransformTrace(example.id, "combined",
                           reps1 + reps2 + reps3 + reps4 + [noise_rep],
                           words_replaced)
    return example.with_text(premise, hypothesis), trace
