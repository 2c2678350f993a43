"""Lexicon data types and loaders for the three transform vocabularies.

Bundled defaults live under ``informalnli/data/``:
  slang.tsv   two tab-separated columns, formal phrase then informal phrase
  emoji.json  {"word_to_emoji": {...}, "emoji_to_label": {...}}
  noise.txt   one token per line (the fixed nine-token filler list)

Loaders validate cross-lexicon safety: an informal slang form must never be
an emoji-mapped word or a noise token, and no emoji label may be an informal
form. Those rules are what make preprocessing idempotent.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

NOISE_TOKENS = ("deadass", "lowkey", "no cap", "tbh", "highkey",
                "on god", "frfr", "real talk", "bet")


def _data_text(name: str) -> str:
    return resources.files("informalnli").joinpath("data", name).read_text("utf-8")


@dataclass(frozen=True)
class SlangLexicon:
    """Ordered (formal_phrase, informal_phrase) pairs, matched longest-first."""

    entries: tuple[tuple[str, str], ...]
    # informal -> canonical formal; first listed formal wins on collision
    inverse: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        seen = set()
        for formal, informal in self.entries:
            key = formal.lower()
            if key in seen:
                raise ValueError(f"duplicate formal phrase {formal!r}")
            seen.add(key)
            self.inverse.setdefault(informal.lower(), formal)
        # an informal form that is itself a formal key would break idempotence
        for informal in self.inverse:
            if informal in seen:
                raise ValueError(f"informal form {informal!r} is also a formal key")

    @property
    def formal_phrases(self) -> list[str]:
        return [f for f, _ in self.entries]

    def informal_of(self, formal: str) -> str:
        for f, i in self.entries:
            if f.lower() == formal.lower():
                return i
        raise KeyError(formal)


@dataclass(frozen=True)
class EmojiLexicon:
    """Many-to-one word→emoji map plus one canonical label per emoji."""

    word_to_emoji: dict[str, str]
    emoji_to_label: dict[str, str]

    def __post_init__(self):
        for word, emoji in self.word_to_emoji.items():
            if emoji not in self.emoji_to_label:
                raise ValueError(f"emoji for {word!r} has no canonical label")
        for emoji in self.emoji_to_label:
            if len(emoji) != 1:
                raise ValueError(f"emoji {emoji!r} is not a single codepoint")
            if unicodedata.category(emoji) != "So":
                raise ValueError(f"emoji {emoji!r} is not a symbol codepoint")

    @property
    def category_count(self) -> int:
        return len(set(self.word_to_emoji.values()))


@dataclass(frozen=True)
class NoiseLexicon:
    tokens: tuple[str, ...] = NOISE_TOKENS

    def __post_init__(self):
        if tuple(sorted(self.tokens)) != tuple(sorted(NOISE_TOKENS)):
            raise ValueError(f"noise list must be exactly {NOISE_TOKENS}")
        if any(t != t.lower() for t in self.tokens):
            raise ValueError("noise tokens must be lowercase")


@dataclass(frozen=True)
class Lexicons:
    slang: SlangLexicon
    emoji: EmojiLexicon
    noise: NoiseLexicon


def load_slang_lexicon(path: str | Path | None = None) -> SlangLexicon:
    text = Path(path).read_text("utf-8") if path else _data_text("slang.tsv")
    entries = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"slang.tsv line {line_no}: expected 'formal<TAB>informal'")
        entries.append((parts[0].strip(), parts[1].strip()))
    return SlangLexicon(tuple(entries))


def load_emoji_lexicon(path: str | Path | None = None) -> EmojiLexicon:
    text = Path(path).read_text("utf-8") if path else _data_text("emoji.json")
    raw = json.loads(text)
    return EmojiLexicon(word_to_emoji=dict(raw["word_to_emoji"]),
                        emoji_to_label=dict(raw["emoji_to_label"]))


def load_noise_lexicon(path: str | Path | None = None) -> NoiseLexicon:
    text = Path(path).read_text("utf-8") if path else _data_text("noise.txt")
    tokens = tuple(t.strip() for t in text.splitlines() if t.strip())
    return NoiseLexicon(tokens)


def load_lexicons(data_dir: str | Path | None = None) -> Lexicons:
    """Load all three lexicons, from a directory override or the bundled data."""
    if data_dir is None:
        lex = Lexicons(load_slang_lexicon(), load_emoji_lexicon(), load_noise_lexicon())
    else:
        d = Path(data_dir)
        lex = Lexicons(load_slang_lexicon(d / "slang.tsv"),
                       load_emoji_lexicon(d / "emoji.json"),
                       load_noise_lexicon(d / "noise.txt"))
    check_cross_lexicon_safety(lex)
    return lex


def check_cross_lexicon_safety(lex: Lexicons) -> None:
    """Reject lexicon combinations that would break preprocessing idempotence."""
    informal = {i.lower() for _, i in lex.slang.entries}
    emoji_words = {w.lower() for w in lex.emoji.word_to_emoji}
    noise = set(lex.noise.tokens)
    bad = informal & emoji_words
    if bad:
        raise ValueError(f"informal slang forms are emoji-mapped words: {sorted(bad)}")
    bad = informal & noise
    if bad:
        raise ValueError(f"informal slang forms are noise tokens: {sorted(bad)}")
    labels = {v.lower() for v in lex.emoji.emoji_to_label.values()}
    bad = labels & informal
    if bad:
        raise ValueError(f"emoji labels are informal slang forms: {sorted(bad)}")
    bad = labels & noise
    if bad:
        raise ValueError(f"emoji labels are noise tokens: {sorted(bad)}")
