import json

import pytest

from informalnli.cli import run
from informalnli.corpus import (LABELS, VARIANT_NAMES, load_dataset,
                                write_dataset)
from informalnli.stats import PredictionFile, load_predictions, write_predictions

NOISE_LINES = "deadass\nlowkey\nno cap\ntbh\nhighkey\non god\nfrfr\nreal talk\nbet\n"


def rotate(label):
    return LABELS[(LABELS.index(label) + 1) % 3]


def write_preds(path, gold, wrong_at=(), name="m", variant=""):
    records = [(ex.id, rotate(ex.gold_label) if i in wrong_at else ex.gold_label)
               for i, ex in enumerate(gold)]
    write_predictions(PredictionFile(name, variant, records), path)


@pytest.fixture()
def dataset_file(tmp_path, small_corpus):
    path = tmp_path / "dev.jsonl"
    write_dataset(small_corpus, path)
    return path


class TestUsageErrors:
    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run(["variants"])
        assert exc.value.code == 2

    def test_bad_transform_choice_exits_2(self, dataset_file, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(["transform", "--in", str(dataset_file),
                 "--out", str(tmp_path / "o.jsonl"), "--transform", "shuffle"])
        assert exc.value.code == 2

    def test_missing_input_file_exits_1(self, tmp_path, capsys):
        rc = run(["transform", "--in", str(tmp_path / "absent.jsonl"),
                  "--out", str(tmp_path / "o.jsonl"), "--transform", "slang"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestVariants:
    def test_writes_five_variants_and_manifest(self, dataset_file, tmp_path,
                                               small_corpus, capsys):
        out = tmp_path / "variants"
        rc = run(["variants", "--in", str(dataset_file), "--out-dir", str(out),
                  "--seed", "42", "--name", "dev", "--json"])
        assert rc == 0
        manifest = json.loads(capsys.readouterr().out)
        assert {v["variant_name"] for v in manifest["variants"]} == set(VARIANT_NAMES)
        for name in VARIANT_NAMES:
            data = load_dataset(out / f"dev.{name}.jsonl")
            assert len(data) == len(small_corpus)
            assert [ex.id for ex in data] == [ex.id for ex in small_corpus]

    def test_reruns_are_bit_identical(self, dataset_file, tmp_path):
        outs = []
        for sub in ("v1", "v2"):
            out = tmp_path / sub
            assert run(["variants", "--in", str(dataset_file),
                        "--out-dir", str(out), "--seed", "42",
                        "--name", "dev"]) == 0
            outs.append(out)
        for name in VARIANT_NAMES:
            assert (outs[0] / f"dev.{name}.jsonl").read_bytes() == \
                (outs[1] / f"dev.{name}.jsonl").read_bytes()

    def test_seed_flag_changes_noise_draws(self, dataset_file, tmp_path):
        for seed, sub in (("42", "a"), ("43", "b")):
            assert run(["variants", "--in", str(dataset_file),
                        "--out-dir", str(tmp_path / sub), "--seed", seed,
                        "--name", "dev"]) == 0

        def read(sub, name):
            return (tmp_path / sub / f"dev.{name}.jsonl").read_bytes()

        assert read("a", "noise") != read("b", "noise")
        assert read("a", "slang") == read("b", "slang")


class TestConfig:
    def test_toml_config_supplies_seed(self, dataset_file, tmp_path):
        config = tmp_path / "run.toml"
        config.write_text("seed = 7\n", encoding="utf-8")
        assert run(["variants", "--in", str(dataset_file),
                    "--out-dir", str(tmp_path / "cfg"), "--config", str(config),
                    "--name", "dev"]) == 0
        assert run(["variants", "--in", str(dataset_file),
                    "--out-dir", str(tmp_path / "flag"), "--seed", "7",
                    "--name", "dev"]) == 0
        assert (tmp_path / "cfg" / "dev.noise.jsonl").read_bytes() == \
            (tmp_path / "flag" / "dev.noise.jsonl").read_bytes()

    def test_flag_beats_config(self, dataset_file, tmp_path):
        config = tmp_path / "run.toml"
        config.write_text("seed = 7\n", encoding="utf-8")
        assert run(["variants", "--in", str(dataset_file),
                    "--out-dir", str(tmp_path / "both"), "--config", str(config),
                    "--seed", "42", "--name", "dev"]) == 0
        assert run(["variants", "--in", str(dataset_file),
                    "--out-dir", str(tmp_path / "flag"), "--seed", "42",
                    "--name", "dev"]) == 0
        assert (tmp_path / "both" / "dev.noise.jsonl").read_bytes() == \
            (tmp_path / "flag" / "dev.noise.jsonl").read_bytes()

    def test_json_config_fills_string_flags(self, dataset_file, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"name": "fromcfg", "seed": 42}),
                          encoding="utf-8")
        assert run(["variants", "--in", str(dataset_file),
                    "--out-dir", str(tmp_path / "out"),
                    "--config", str(config)]) == 0
        assert (tmp_path / "out" / "fromcfg.original.jsonl").exists()


class TestTransformPreprocessAugment:
    def test_transform_writes_dataset_and_traces(self, dataset_file, tmp_path,
                                                 small_corpus, capsys):
        out = tmp_path / "slang.jsonl"
        traces = tmp_path / "slang.traces.jsonl"
        rc = run(["transform", "--in", str(dataset_file), "--out", str(out),
                  "--transform", "slang", "--traces", str(traces), "--json"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n_examples"] == len(small_corpus)
        assert payload["words_replaced_total"] > 0
        assert len(load_dataset(out)) == len(small_corpus)
        assert len(traces.read_text(encoding="utf-8").splitlines()) == \
            len(small_corpus)

    def test_preprocess_inverts_noise_variant(self, dataset_file, tmp_path,
                                              small_corpus, capsys):
        noisy = tmp_path / "noise.jsonl"
        assert run(["transform", "--in", str(dataset_file), "--out", str(noisy),
                    "--transform", "noise", "--seed", "42"]) == 0
        capsys.readouterr()
        clean = tmp_path / "clean.jsonl"
        assert run(["preprocess", "--in", str(noisy), "--out", str(clean)]) == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["n_changed"] == len(small_corpus)
        restored = load_dataset(clean)
        assert [(ex.premise, ex.hypothesis) for ex in restored] == \
            [(ex.premise, ex.hypothesis) for ex in small_corpus]

    def test_augment_reports_counts(self, dataset_file, tmp_path, small_corpus,
                                    capsys):
        out = tmp_path / "train.jsonl"
        rc = run(["augment", "--in", str(dataset_file), "--out", str(out),
                  "--seed", "42", "--json"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n_in"] == len(small_corpus)
        assert payload["n_out"] == payload["n_in"] + payload["n_copies"]
        assert len(load_dataset(out)) == payload["n_out"]

    def test_data_dir_override_is_used(self, tmp_path, small_corpus, capsys):
        data_dir = tmp_path / "lex"
        data_dir.mkdir()
        (data_dir / "slang.tsv").write_text("picture\tpic\n", encoding="utf-8")
        (data_dir / "emoji.json").write_text(
            json.dumps({"word_to_emoji": {"man": "\U0001F468"},
                        "emoji_to_label": {"\U0001F468": "man"}}),
            encoding="utf-8")
        (data_dir / "noise.txt").write_text(NOISE_LINES, encoding="utf-8")
        src = tmp_path / "in.jsonl"
        write_dataset(small_corpus, src)
        out = tmp_path / "out.jsonl"
        rc = run(["transform", "--in", str(src), "--out", str(out),
                  "--transform", "slang", "--data-dir", str(data_dir)])
        assert rc == 0
        # the one-entry lexicon must leave every other formal phrase alone
        for ex in load_dataset(out):
            assert "gonna" not in ex.premise and "gonna" not in ex.hypothesis


class TestTokenstats:
    def test_wordpiece_and_bpe_blocks(self, tmp_path, variants_dir, wp_vocab,
                                      bpe_vocab, capsys):
        wp_path = tmp_path / "vocab.txt"
        wp_path.write_text("\n".join(wp_vocab.tokens) + "\n", encoding="utf-8")
        vocab_json = tmp_path / "vocab.json"
        vocab_json.write_text(json.dumps(bpe_vocab.token_to_id), encoding="utf-8")
        merges_txt = tmp_path / "merges.txt"
        merges_txt.write_text(
            "#version: toy\n" + "\n".join(f"{a} {b}" for a, b in bpe_vocab.merges)
            + "\n", encoding="utf-8")
        rc = run(["tokenstats",
                  "--in", str(variants_dir / "synth.original.jsonl"),
                  "--in", str(variants_dir / "synth.emoji.jsonl"),
                  "--vocab-wordpiece", str(wp_path),
                  "--vocab-bpe", f"{vocab_json},{merges_txt}"])
        assert rc == 0
        lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        by_variant = {rec["variant_name"]: rec for rec in lines}
        assert by_variant["original"]["wordpiece"]["mean_unk_per_example"] == 0.0
        assert by_variant["emoji"]["wordpiece"]["mean_unk_per_example"] >= 1.0
        assert by_variant["emoji"]["bpe"]["mean_subwords_per_word"] > \
            by_variant["original"]["bpe"]["mean_subwords_per_word"]

    def test_requires_some_vocab(self, dataset_file, capsys):
        rc = run(["tokenstats", "--in", str(dataset_file)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_bpe_spec(self, dataset_file, capsys):
        rc = run(["tokenstats", "--in", str(dataset_file),
                  "--vocab-bpe", "only-one-path"])
        assert rc == 1
        assert "vocab.json,merges.txt" in capsys.readouterr().err


class TestCompare:
    def make_files(self, tmp_path, small_corpus):
        gold_path = tmp_path / "gold.jsonl"
        write_dataset(small_corpus[:30], gold_path)
        a_path = tmp_path / "modela.jsonl"
        b_path = tmp_path / "modelb.jsonl"
        write_preds(a_path, small_corpus[:30], name="modela")
        write_preds(b_path, small_corpus[:30], wrong_at=set(range(10)),
                    name="modelb")
        return gold_path, a_path, b_path

    def test_mcnemar_and_family_threshold(self, tmp_path, small_corpus, capsys):
        gold_path, a_path, b_path = self.make_files(tmp_path, small_corpus)
        rc = run(["compare", "--gold", str(gold_path), "--a", str(a_path),
                  "--b", str(b_path), "--m", "30"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["a"]["accuracy"] == 1.0
        assert payload["b"]["accuracy"] == pytest.approx(20 / 30)
        assert payload["mcnemar"]["b"] == 10 and payload["mcnemar"]["c"] == 0
        assert payload["mcnemar"]["statistic"] == pytest.approx(8.1)
        assert payload["mcnemar"]["p_value"] == pytest.approx(0.00442653, rel=1e-4)
        assert payload["threshold"] == pytest.approx(0.0016667, abs=5e-8)
        assert payload["significant"] is False
        assert payload["a"]["ci"]["rng_algorithm"] == "numpy-pcg64"

    def test_unadjusted_family_is_significant(self, tmp_path, small_corpus,
                                              capsys):
        gold_path, a_path, b_path = self.make_files(tmp_path, small_corpus)
        rc = run(["compare", "--gold", str(gold_path), "--a", str(a_path),
                  "--b", str(b_path)])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["m"] == 1
        assert payload["significant"] is True

    def test_misaligned_predictions_exit_1(self, tmp_path, small_corpus, capsys):
        gold_path, a_path, b_path = self.make_files(tmp_path, small_corpus)
        write_preds(a_path, small_corpus[:29], name="modela")
        rc = run(["compare", "--gold", str(gold_path), "--a", str(a_path),
                  "--b", str(b_path)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


ERRORS_BY_VARIANT = {
    "baseline": {"original": 2, "slang": 10, "emoji": 30, "noise": 12,
                 "combined": 35},
    "preproc": {"original": 2, "slang": 3, "emoji": 15, "noise": 3,
                "combined": 16},
}


class TestReport:
    @pytest.fixture()
    def preds_dir(self, tmp_path, corpus):
        d = tmp_path / "preds"
        d.mkdir()
        for approach, per_variant in ERRORS_BY_VARIANT.items():
            for variant, k in per_variant.items():
                write_preds(d / f"{approach}.{variant}.jsonl", corpus,
                            wrong_at=set(range(k)), name=approach,
                            variant=variant)
        return d

    def test_artifacts_written(self, variants_dir, preds_dir, tmp_path, capsys):
        out = tmp_path / "report"
        rc = run(["report", "--gold-dir", str(variants_dir),
                  "--preds-dir", str(preds_dir), "--out-dir", str(out),
                  "--margins", "--baseline", "baseline",
                  "--mitigated", "preproc", "--json"])
        assert rc == 0
        assert (out / "accuracy.csv").exists()
        assert "±" in (out / "accuracy.txt").read_text(encoding="utf-8")
        confusion_files = sorted(p.name for p in (out / "confusion").glob("*.csv"))
        assert len(confusion_files) == 10
        analysis = json.loads((out / "analysis.json").read_text(encoding="utf-8"))
        assert analysis["accuracy"]["baseline/emoji"] == pytest.approx(0.97)
        assert analysis["recovery"]["emoji"]["recovered"] == 15
        assert analysis["recovery"]["emoji"]["regressed"] == 0
        assert analysis["recovery"]["emoji"]["ratio_undefined"] is True
        stdout_payload = json.loads(capsys.readouterr().out)
        assert stdout_payload["accuracy"] == analysis["accuracy"]

    def test_missing_prediction_cell_exits_1(self, variants_dir, preds_dir,
                                             tmp_path, capsys):
        (preds_dir / "preproc.emoji.jsonl").unlink()
        rc = run(["report", "--gold-dir", str(variants_dir),
                  "--preds-dir", str(preds_dir), "--out-dir",
                  str(tmp_path / "r")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_requires_exactly_one_manifest(self, tmp_path, preds_dir, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        rc = run(["report", "--gold-dir", str(empty),
                  "--preds-dir", str(preds_dir)])
        assert rc == 1
        assert "manifest" in capsys.readouterr().err


class TestLlmEvalAndRoundtrip:
    def test_llm_eval_then_cached_offline_rerun(self, tmp_path, small_corpus,
                                                stub, api_key, monkeypatch,
                                                capsys):
        src = tmp_path / "eval.jsonl"
        write_dataset(small_corpus[:8], src)
        cache = tmp_path / "cache.jsonl"
        out = tmp_path / "preds.jsonl"
        rc = run(["llm-eval", "--model", "stub-model", "--in", str(src),
                  "--cache", str(cache), "--out", str(out),
                  "--base-url", stub.url, "--json"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["network_calls"] == 8
        first = out.read_bytes()
        assert len(load_predictions(out).records) == 8

        monkeypatch.delenv("OPENAI_API_KEY", raising=False)
        out2 = tmp_path / "preds2.jsonl"
        rc = run(["llm-eval", "--model", "stub-model", "--in", str(src),
                  "--cache", str(cache), "--out", str(out2),
                  "--base-url", "http://127.0.0.1:1", "--json"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["cache_hits"] == 8 and payload["network_calls"] == 0
        assert out2.read_bytes() == first
        assert len(stub.requests) == 8

    def test_roundtrip_noise_metrics(self, variants_dir, capsys):
        rc = run(["roundtrip",
                  "--original", str(variants_dir / "synth.original.jsonl"),
                  "--variant", str(variants_dir / "synth.noise.jsonl"),
                  "--traces", str(variants_dir / "synth.noise.traces.jsonl")])
        assert rc == 0
        metrics = json.loads(capsys.readouterr().out)
        assert metrics["noise_recall"] == 1.0
        assert metrics["noise_vacuous"] is False
