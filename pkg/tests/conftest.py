"""Shared fixtures: one synthetic corpus, its variants, and small vocabularies.

Everything expensive is session-scoped so the suite builds the corpus and
trains the toy tokenizer vocabularies exactly once.
"""

from __future__ import annotations

import pytest

from informalnli.corpus import VARIANT_NAMES, build_eval_variants, load_dataset
from informalnli.lexicons import load_lexicons
from informalnli.synthetic import build_wordpiece_vocab, make_corpus, train_bpe
from informalnli.transforms import TransformEngine, load_traces

CORPUS_SEED = 2024
DATASET_SEED = 42


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicons()


@pytest.fixture(scope="session")
def engine(lexicons):
    return TransformEngine(lexicons)


@pytest.fixture(scope="session")
def corpus(lexicons):
    return make_corpus(1000, seed=CORPUS_SEED)


@pytest.fixture(scope="session")
def small_corpus(corpus):
    return corpus[:100]


@pytest.fixture(scope="session")
def variants_dir(tmp_path_factory, corpus, engine):
    out = tmp_path_factory.mktemp("variants")
    build_eval_variants(corpus, DATASET_SEED, engine, out, "synth")
    return out


@pytest.fixture(scope="session")
def variants(variants_dir, corpus):
    data = {name: load_dataset(variants_dir / f"synth.{name}.jsonl")
            for name in VARIANT_NAMES}
    return data


@pytest.fixture(scope="session")
def traces(variants_dir):
    return {name: load_traces(variants_dir / f"synth.{name}.traces.jsonl")
            for name in VARIANT_NAMES if name != "original"}


@pytest.fixture(scope="session")
def wp_vocab(corpus):
    return build_wordpiece_vocab([corpus], target_size=30000)


@pytest.fixture(scope="session")
def bpe_vocab(corpus):
    texts = [f"{ex.premise} {ex.hypothesis}" for ex in corpus]
    return train_bpe(texts, num_merges=800)


@pytest.fixture()
def stub():
    import stubserver

    server, thread = stubserver.start()
    yield server
    stubserver.stop(server, thread)


@pytest.fixture()
def api_key(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "test-key")
