"""WordPiece and byte-level BPE tokenizers plus the two failure diagnostics.

Both tokenizers load standard published file formats: a one-token-per-line
vocab for WordPiece, and vocab.json + merges.txt for byte-level BPE. The
diagnostics they feed are the mechanism numbers behind informal-text failure:
[UNK] counts for WordPiece (emoji fall outside a 30K vocabulary entirely)
and subwords-per-word fragmentation for BPE (emoji survive as byte runs,
unseen filler tokens split into several pieces).
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

import regex

from .corpus import NliExample
from .errors import EmptyInput

UNK = "[UNK]"

# contraction suffixes, then letter runs, number runs, other runs, spaces;
# a leading space attaches to the following run
_BPE_SPLIT = regex.compile(
    r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)


@dataclass(frozen=True)
class WordPieceVocab:
    tokens: tuple[str, ...]
    lowercase: bool = True
    max_word_chars: int = 100
    token_set: frozenset = field(init=False, compare=False)

    def __post_init__(self):
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("vocabulary contains duplicate tokens")
        if UNK not in self.tokens:
            raise ValueError(f"vocabulary must contain {UNK}")
        object.__setattr__(self, "token_set", frozenset(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)


def load_wordpiece_vocab(path: str | Path, lowercase: bool = True,
                         max_word_chars: int = 100) -> WordPieceVocab:
    tokens = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            token = line.rstrip("\n")
            if token:
                tokens.append(token)
    return WordPieceVocab(tuple(tokens), lowercase, max_word_chars)


def _is_standalone_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    if cat.startswith("P") or cat.startswith("S"):
        return True
    cp = ord(ch)
    # CJK unified ideographs tokenize one codepoint per word
    return 0x4E00 <= cp <= 0x9FFF or 0x3400 <= cp <= 0x4DBF


def pretokenize(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace split with punctuation/symbol/CJK codepoints isolated."""
    if lowercase:
        text = text.lower()
    words: list[str] = []
    current: list[str] = []

    def flush():
        if current:
            words.append("".join(current))
            current.clear()

    for ch in text:
        if ch.isspace():
            flush()
        elif _is_standalone_char(ch):
            flush()
            words.append(ch)
        else:
            current.append(ch)
    flush()
    return words


def wordpiece_tokenize(word: str, vocab: WordPieceVocab) -> list[str]:
    """Greedy longest-prefix match; any dead end collapses the word to [UNK]."""
    if not word:
        raise ValueError("word is empty")
    if len(word) > vocab.max_word_chars:
        return [UNK]
    pieces: list[str] = []
    start = 0
    while start < len(word):
        end = len(word)
        piece = None
        while start < end:
            candidate = word[start:end]
            if start > 0:
                candidate = "##" + candidate
            if candidate in vocab.token_set:
                piece = candidate
                break
            end -= 1
        if piece is None:
            return [UNK]
        pieces.append(piece)
        start = end
    return pieces


def _bytes_to_units() -> dict[int, str]:
    """The standard byte-to-printable-unicode table used by GPT-2 style BPE."""
    bs = (list(range(ord("!"), ord("~") + 1))
          + list(range(0xA1, 0xAD)) + list(range(0xAE, 0x100)))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, (chr(c) for c in cs)))


_BYTE_TO_UNIT = _bytes_to_units()
_UNIT_TO_BYTE = {v: k for k, v in _BYTE_TO_UNIT.items()}


@dataclass(frozen=True)
class BpeVocab:
    token_to_id: dict[str, int]
    merges: tuple[tuple[str, str], ...]
    ranks: dict[tuple[str, str], int] = field(init=False, compare=False)

    def __post_init__(self):
        if UNK in self.token_to_id:
            raise ValueError(f"byte-level BPE has no {UNK}; vocabulary must not define one")
        derivable = set(_BYTE_TO_UNIT.values())
        for i, (a, b) in enumerate(self.merges):
            if not (set(a) <= derivable and set(b) <= derivable):
                raise ValueError(f"merge {i} ({a!r}, {b!r}) uses underivable symbols")
            derivable.add(a + b)
        object.__setattr__(self, "ranks", {pair: i for i, pair in enumerate(self.merges)})

    def __len__(self) -> int:
        return len(self.token_to_id)


def load_bpe_vocab(vocab_path: str | Path, merges_path: str | Path) -> BpeVocab:
    token_to_id = json.loads(Path(vocab_path).read_text("utf-8"))
    merges = []
    with open(merges_path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            a, b = line.split(" ")
            merges.append((a, b))
    return BpeVocab(token_to_id, tuple(merges))


def _merge_pretoken(units: str, vocab: BpeVocab) -> list[str]:
    parts = list(units)
    while len(parts) > 1:
        best = None
        best_rank = None
        for pair in zip(parts, parts[1:]):
            rank = vocab.ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best, best_rank = pair, rank
        if best is None:
            break
        merged = []
        i = 0
        while i < len(parts):
            if i < len(parts) - 1 and (parts[i], parts[i + 1]) == best:
                merged.append(parts[i] + parts[i + 1])
                i += 2
            else:
                merged.append(parts[i])
                i += 1
        parts = merged
    return parts


def bpe_tokenize(text: str, vocab: BpeVocab) -> list[str]:
    """Byte-level BPE encode: total (never an unknown token), lossless."""
    tokens: list[str] = []
    for pretoken in _BPE_SPLIT.findall(text):
        units = "".join(_BYTE_TO_UNIT[b] for b in pretoken.encode("utf-8"))
        tokens.extend(_merge_pretoken(units, vocab))
    return tokens


def bpe_decode(tokens: list[str]) -> str:
    data = bytes(_UNIT_TO_BYTE[u] for token in tokens for u in token)
    return data.decode("utf-8")


@dataclass
class TokenizationStats:
    variant_name: str
    mean_unk_per_example: float
    pct_examples_with_unk: float
    mean_subwords_per_word: float
    n_examples: int

    def __post_init__(self):
        if not 0.0 <= self.pct_examples_with_unk <= 100.0:
            raise ValueError("pct_examples_with_unk out of [0, 100]")

    def to_dict(self) -> dict:
        return vars(self).copy()


def unk_stats(dataset: list[NliExample], vocab: WordPieceVocab,
              variant_name: str = "") -> TokenizationStats:
    """Per-example [UNK] diagnostics, premise and hypothesis counted jointly."""
    if not dataset:
        raise EmptyInput("unk_stats needs a non-empty dataset")
    total_unks = 0
    examples_with_unk = 0
    ratio_sum = 0.0
    for ex in dataset:
        words = pretokenize(ex.premise, vocab.lowercase) + \
            pretokenize(ex.hypothesis, vocab.lowercase)
        unks = 0
        subwords = 0
        for word in words:
            pieces = wordpiece_tokenize(word, vocab)
            subwords += len(pieces)
            unks += pieces.count(UNK)
        total_unks += unks
        if unks:
            examples_with_unk += 1
        ratio_sum += subwords / len(words) if words else 1.0
    n = len(dataset)
    return TokenizationStats(
        variant_name=variant_name,
        mean_unk_per_example=total_unks / n,
        pct_examples_with_unk=100.0 * examples_with_unk / n,
        mean_subwords_per_word=ratio_sum / n,
        n_examples=n,
    )


def fragmentation_stats(dataset: list[NliExample], vocab: BpeVocab,
                        variant_name: str = "") -> TokenizationStats:
    """Mean BPE subwords per pretokenized word; BPE itself never emits [UNK].

    The denominator is the pretokenize() word count (punctuation isolated,
    case kept), not the BPE split count, so ratios are comparable with the
    WordPiece side.
    """
    if not dataset:
        raise EmptyInput("fragmentation_stats needs a non-empty dataset")
    ratio_sum = 0.0
    for ex in dataset:
        words = len(pretokenize(ex.premise, lowercase=False)) + \
            len(pretokenize(ex.hypothesis, lowercase=False))
        subwords = len(bpe_tokenize(ex.premise, vocab)) + \
            len(bpe_tokenize(ex.hypothesis, vocab))
        ratio_sum += subwords / words if words else 1.0
    n = len(dataset)
    return TokenizationStats(
        variant_name=variant_name,
        mean_unk_per_example=0.0,
        pct_examples_with_unk=0.0,
        mean_subwords_per_word=ratio_sum / n,
        n_examples=n,
    )
