import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from informalnli.corpus import NliExample
from informalnli.errors import EmptyInput
from informalnli.tokenization import (UNK, BpeVocab, TokenizationStats,
                                      WordPieceVocab, bpe_decode, bpe_tokenize,
                                      fragmentation_stats, load_bpe_vocab,
                                      load_wordpiece_vocab, pretokenize,
                                      unk_stats, wordpiece_tokenize)

RUNNER = "\U0001F3C3"


def tiny_vocab(*tokens):
    return WordPieceVocab((UNK,) + tokens)


class TestPretokenize:
    def test_punctuation_isolated(self):
        assert pretokenize("Hello, world!") == ["hello", ",", "world", "!"]

    def test_lowercase_flag(self):
        assert pretokenize("Hello", lowercase=False) == ["Hello"]

    def test_emoji_are_standalone(self):
        assert pretokenize(f"Go {RUNNER} now.") == ["go", RUNNER, "now", "."]
        assert pretokenize(f"go{RUNNER}now") == ["go", RUNNER, "now"]

    def test_cjk_single_codepoint_words(self):
        assert pretokenize("他跑") == ["他", "跑"]

    def test_whitespace_runs(self):
        assert pretokenize("a  b\tc\nd") == ["a", "b", "c", "d"]


class TestWordPiece:
    def test_classic_segmentation(self):
        vocab = tiny_vocab("un", "##aff", "##able")
        assert wordpiece_tokenize("unaffable", vocab) == ["un", "##aff", "##able"]

    def test_whole_word_match_wins(self):
        vocab = tiny_vocab("unaffable", "un", "##aff", "##able")
        assert wordpiece_tokenize("unaffable", vocab) == ["unaffable"]

    def test_dead_end_collapses_to_unk(self):
        vocab = tiny_vocab("un", "##aff", "##able")
        assert wordpiece_tokenize("unaffordable", vocab) == [UNK]

    def test_unknown_word_is_single_unk(self):
        assert wordpiece_tokenize(RUNNER, tiny_vocab("a")) == [UNK]

    def test_overlong_word_is_unk(self):
        vocab = tiny_vocab("a", "##a")
        assert wordpiece_tokenize("a" * 100, vocab) == ["a"] + ["##a"] * 99
        assert wordpiece_tokenize("a" * 101, vocab) == [UNK]

    def test_greedy_takes_longest_prefix(self):
        vocab = tiny_vocab("ab", "a", "##b", "##bb")
        assert wordpiece_tokenize("abbb", vocab) == ["ab", "##bb"]

    def test_empty_word_rejected(self):
        with pytest.raises(ValueError):
            wordpiece_tokenize("", tiny_vocab("a"))

    def test_vocab_requires_unk(self):
        with pytest.raises(ValueError, match=r"\[UNK\]"):
            WordPieceVocab(("a", "b"))

    def test_vocab_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            WordPieceVocab((UNK, "a", "a"))

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text(f"[PAD]\n{UNK}\nthe\n##e\n\n", encoding="utf-8")
        vocab = load_wordpiece_vocab(path)
        assert vocab.tokens == ("[PAD]", UNK, "the", "##e")
        assert len(vocab) == 4


def micro_bpe(merges):
    return BpeVocab({}, tuple(merges))


class TestBpe:
    def test_merges_apply_in_rank_order(self):
        vocab = micro_bpe([("h", "e"), ("he", "l"), ("l", "l"),
                           ("hel", "l"), ("hell", "o")])
        assert bpe_tokenize("hello", vocab) == ["hello"]

    def test_lowest_rank_wins_over_position(self):
        vocab = micro_bpe([("l", "l"), ("e", "l")])
        assert bpe_tokenize("ell", vocab) == ["e", "ll"]

    def test_equal_pairs_merge_left_to_right(self):
        vocab = micro_bpe([("l", "l")])
        assert bpe_tokenize("llll", vocab) == ["ll", "ll"]

    def test_no_merges_yields_byte_units(self):
        assert bpe_tokenize("ab cd", micro_bpe([])) == ["a", "b", "Ġ", "c", "d"]

    def test_contractions_split_as_pretokens(self):
        tokens = bpe_tokenize("don't", micro_bpe([("d", "o"), ("'", "t")]))
        assert tokens == ["do", "n", "'t"]

    def test_pretoken_boundary_blocks_merges(self):
        # the space belongs to the next pretoken, so (o, Ġ) can never pair
        vocab = micro_bpe([("o", "Ġ")])
        assert bpe_tokenize("go on", vocab) == ["g", "o", "Ġ", "o", "n"]

    def test_emoji_survive_as_byte_runs(self):
        tokens = bpe_tokenize(RUNNER, micro_bpe([]))
        assert len(tokens) == 4  # one unit per UTF-8 byte
        assert UNK not in tokens
        assert bpe_decode(tokens) == RUNNER

    def test_vocab_rejects_unk_entry(self):
        with pytest.raises(ValueError, match="must not"):
            BpeVocab({UNK: 0}, ())

    def test_vocab_rejects_underivable_merge(self):
        with pytest.raises(ValueError, match="underivable"):
            BpeVocab({}, (("\x00", "a"),))

    def test_load_from_files(self, tmp_path):
        (tmp_path / "vocab.json").write_text(
            json.dumps({"a": 0, "b": 1, "ab": 2}), encoding="utf-8")
        (tmp_path / "merges.txt").write_text(
            "#version: 0.2\na b\n\n", encoding="utf-8")
        vocab = load_bpe_vocab(tmp_path / "vocab.json", tmp_path / "merges.txt")
        assert vocab.merges == (("a", "b"),)
        assert len(vocab) == 3
        assert bpe_tokenize("abba", vocab) == ["ab", "b", "a"]

    @given(text=st.text(max_size=80))
    @settings(max_examples=300)
    def test_decode_inverts_encode(self, bpe_vocab, text):
        assert bpe_decode(bpe_tokenize(text, bpe_vocab)) == text

    @given(text=st.text(min_size=1, max_size=40))
    @settings(max_examples=150)
    def test_encode_is_total(self, bpe_vocab, text):
        assert UNK not in bpe_tokenize(text, bpe_vocab)


class TestDiagnostics:
    def test_stats_validation(self):
        with pytest.raises(ValueError):
            TokenizationStats("x", 0.0, 101.0, 1.0, 1)
        stats = TokenizationStats("emoji", 2.0, 80.0, 1.5, 10)
        assert stats.to_dict()["variant_name"] == "emoji"

    def test_empty_dataset_rejected(self, wp_vocab, bpe_vocab):
        with pytest.raises(EmptyInput):
            unk_stats([], wp_vocab)
        with pytest.raises(EmptyInput):
            fragmentation_stats([], bpe_vocab)

    def test_clean_text_has_zero_unks(self, wp_vocab, corpus, variants):
        for name in ("original", "slang", "noise"):
            stats = unk_stats(variants[name], wp_vocab, name)
            assert stats.mean_unk_per_example == 0.0
            assert stats.pct_examples_with_unk == 0.0
            assert stats.n_examples == len(corpus)

    def test_emoji_text_floods_unks(self, wp_vocab, variants):
        stats = unk_stats(variants["emoji"], wp_vocab, "emoji")
        assert stats.mean_unk_per_example >= 1.0
        assert stats.pct_examples_with_unk >= 80.0

    def test_unk_counts_recount(self, wp_vocab, small_corpus, engine):
        # independent recount of the emoji-variant numerators
        total = with_unk = 0
        transformed = [engine.transform_example(ex, "emoji", 42)[0]
                       for ex in small_corpus]
        for ex in transformed:
            words = pretokenize(ex.premise) + pretokenize(ex.hypothesis)
            unks = sum(wordpiece_tokenize(w, wp_vocab) == [UNK] for w in words)
            total += unks
            with_unk += unks > 0
        stats = unk_stats(transformed, wp_vocab, "emoji")
        assert stats.mean_unk_per_example == pytest.approx(total / len(transformed))
        assert stats.pct_examples_with_unk == pytest.approx(
            100.0 * with_unk / len(transformed))

    def test_fragmentation_ordering(self, bpe_vocab, variants):
        ratios = {name: fragmentation_stats(variants[name], bpe_vocab, name)
                  .mean_subwords_per_word
                  for name in ("original", "noise", "emoji")}
        assert ratios["emoji"] > ratios["noise"] > ratios["original"]

    def test_fragmentation_reports_no_unks(self, bpe_vocab, small_corpus):
        stats = fragmentation_stats(small_corpus, bpe_vocab)
        assert stats.mean_unk_per_example == 0.0
        assert stats.pct_examples_with_unk == 0.0
        assert stats.mean_subwords_per_word >= 1.0
