"""Inference-time preprocessing: undo each transform before tokenization.

The composition runs strip_noise, then invert_emoji, then invert_slang.
Noise stripping is exact (the filter list equals the injection list), slang
inversion is exact wherever the lexicon is bijective, and emoji inversion is
lossy by construction: many source words map to one emoji, which comes back
as its single canonical label.
"""

from __future__ import annotations

import logging
import re
from functools import lru_cache

from .corpus import NliExample, check_alignment
from .errors import LengthMismatch
from .lexicons import EmojiLexicon, Lexicons, NoiseLexicon, SlangLexicon
from .transforms import TransformTrace, _match_case, _phrase_pattern

log = logging.getLogger(__name__)

# cleanup after token deletion: collapse runs, re-attach punctuation
_SPACE_RUN = re.compile(r"\s{2,}")
_SPACE_BEFORE_PUNCT = re.compile(r"\s+([.!?,;:])")


def invert_slang(text: str, lexicon: SlangLexicon) -> str:
    """Expand each informal phrase to its canonical formal source."""
    pattern = _phrase_pattern(tuple(lexicon.inverse))
    return pattern.sub(
        lambda m: _match_case(m.group(0), lexicon.inverse[m.group(0).lower()]),
        text,
    )


@lru_cache(maxsize=8)
def _emoji_pattern(emoji: tuple[str, ...]) -> re.Pattern:
    ordered = sorted(emoji, key=len, reverse=True)
    return re.compile("|".join(re.escape(e) for e in ordered))


def invert_emoji(text: str, lexicon: EmojiLexicon) -> str:
    """Replace each known emoji by its canonical label; unknown emoji pass through."""
    pattern = _emoji_pattern(tuple(lexicon.emoji_to_label))
    return pattern.sub(lambda m: lexicon.emoji_to_label[m.group(0)], text)


def find_unknown_emoji(text: str, lexicon: EmojiLexicon) -> list[str]:
    """Symbol codepoints that look like emoji but have no lexicon entry."""
    import unicodedata

    return [ch for ch in text
            if unicodedata.category(ch) == "So" and ch not in lexicon.emoji_to_label]


def strip_noise(hypothesis: str, lexicon: NoiseLexicon) -> str:
    """Delete every filler-token occurrence and tidy the spacing left behind."""
    pattern = _phrase_pattern(tuple(lexicon.tokens))
    out = pattern.sub("", hypothesis)
    out = _SPACE_RUN.sub(" ", out)
    out = _SPACE_BEFORE_PUNCT.sub(r"\1", out)
    return out.strip()


def preprocess(example: NliExample, lexicons: Lexicons) -> NliExample:
    """strip_noise (hypothesis only), then invert_emoji, then invert_slang.

    Idempotent: output contains no noise tokens, known emoji, or informal
    phrases, so a second pass is the identity. Unknown emoji are left in
    place and logged rather than erroring.
    """
    hyp = strip_noise(example.hypothesis, lexicons.noise)
    if not hyp:
        # a hypothesis that was pure filler cannot become empty
        hyp = example.hypothesis
    prem = example.premise
    unknown = find_unknown_emoji(prem, lexicons.emoji) + find_unknown_emoji(hyp, lexicons.emoji)
    if unknown:
        log.debug("example %s: %d unknown emoji passed through", example.id, len(unknown))
    prem = invert_emoji(prem, lexicons.emoji)
    hyp = invert_emoji(hyp, lexicons.emoji)
    prem = invert_slang(prem, lexicons.slang)
    hyp = invert_slang(hyp, lexicons.slang)
    return example.with_text(prem, hyp)


def preprocess_dataset(examples: list[NliExample], lexicons: Lexicons) -> tuple[list[NliExample], dict]:
    out = []
    changed = 0
    unknown = 0
    for ex in examples:
        unknown += len(find_unknown_emoji(ex.premise, lexicons.emoji))
        unknown += len(find_unknown_emoji(ex.hypothesis, lexicons.emoji))
        clean = preprocess(ex, lexicons)
        if (clean.premise, clean.hypothesis) != (ex.premise, ex.hypothesis):
            changed += 1
        out.append(clean)
    return out, {"n_examples": len(out), "n_changed": changed,
                 "unknown_emoji": unknown}


def roundtrip_metrics(
    original_dataset: list[NliExample],
    variant_dataset: list[NliExample],
    traces: list[TransformTrace],
    lexicons: Lexicons,
) -> dict:
    """Recovery quality of preprocess over a transformed variant.

    slang_exact: among examples with >=1 slang replacement, the fraction whose
    preprocessed text equals the original exactly (both fields).
    emoji_exact: among emoji replacements, the fraction whose source word is
    the emoji's canonical label (the only case inversion can restore).
    noise_recall: among injected noise tokens, the fraction absent after
    strip_noise. Empty denominators report 1.0 and set a *_vacuous flag.
    """
    check_alignment(original_dataset, variant_dataset)
    if len(traces) != len(variant_dataset):
        raise LengthMismatch(f"{len(traces)} traces for {len(variant_dataset)} examples")
    for ex, trace in zip(variant_dataset, traces):
        if trace.example_id != ex.id:
            raise LengthMismatch(f"trace id {trace.example_id} != example id {ex.id}")

    slang_hits = slang_total = 0
    emoji_hits = emoji_total = 0
    noise_hits = noise_total = 0
    noise_pattern = _phrase_pattern(tuple(lexicons.noise.tokens))

    for orig, var, trace in zip(original_dataset, variant_dataset, traces):
        kinds = {r.kind for r in trace.replacements}
        if "slang" in kinds:
            slang_total += 1
            clean = preprocess(var, lexicons)
            if (clean.premise, clean.hypothesis) == (orig.premise, orig.hypothesis):
                slang_hits += 1
        for rep in trace.replacements:
            if rep.kind == "emoji":
                emoji_total += 1
                label = lexicons.emoji.emoji_to_label.get(rep.replacement_text)
                if label is not None and rep.original_text.lower() == label:
                    emoji_hits += 1
            elif rep.kind == "noise":
                noise_total += 1
                stripped = strip_noise(var.hypothesis, lexicons.noise)
                if not noise_pattern.search(stripped):
                    noise_hits += 1

    def rate(hits: int, total: int) -> float:
        return hits / total if total else 1.0

    return {
        "slang_exact": rate(slang_hits, slang_total),
        "emoji_exact": rate(emoji_hits, emoji_total),
        "noise_recall": rate(noise_hits, noise_total),
        "slang_vacuous": slang_total == 0,
        "emoji_vacuous": emoji_total == 0,
        "noise_vacuous": noise_total == 0,
        "n_examples": len(original_dataset),
    }
