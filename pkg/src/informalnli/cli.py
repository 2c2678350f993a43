"""Command-line interface: one binary, one subcommand per pipeline stage.

Exit codes: 0 ok, 1 operational error, 2 usage error. All randomness flows
from --seed through derive_seed; there is no ambient entropy. --config
accepts a TOML or JSON file whose keys mirror the long flag names and fill
in any flag not given on the command line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import augment as augment_mod
from . import inverse, report, stats, tokenization
from .corpus import (VARIANT_NAMES, build_eval_variants, load_dataset,
                     write_dataset)
from .errors import ToolkitError
from .lexicons import load_lexicons
from .llmclient import ResponseCache, classify_batch
from .stats import (BonferroniFamily, accuracy, align, bootstrap_ci,
                    compare_family, load_predictions, mcnemar,
                    write_predictions)
from .transforms import TRANSFORM_NAMES, TransformEngine, load_traces

DEFAULT_SEED = 42


def _load_config(path: str) -> dict:
    text = Path(path).read_text("utf-8")
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    for key, value in _load_config(args.config).items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def _emit(args: argparse.Namespace, payload: dict, human: str | None = None) -> None:
    if args.json or human is None:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(human)


def _variant_of(path: Path) -> str:
    parts = path.stem.rsplit(".", 1)
    return parts[-1] if len(parts) == 2 else path.stem


def cmd_variants(args) -> int:
    examples = load_dataset(args.in_)
    engine = TransformEngine(load_lexicons(args.data_dir))
    name = args.name or Path(args.in_).stem.split(".")[0]
    manifest = build_eval_variants(examples, args.seed, engine, args.out_dir, name)
    _emit(args, json.loads(manifest.to_json()),
          f"wrote {len(manifest.variants)} variants x {len(examples)} examples "
          f"to {args.out_dir}")
    return 0


def cmd_transform(args) -> int:
    examples = load_dataset(args.in_)
    engine = TransformEngine(load_lexicons(args.data_dir))
    transformed, traces = [], []
    for ex in examples:
        new_ex, trace = engine.transform_example(ex, args.transform, args.seed)
        transformed.append(new_ex)
        traces.append(trace)
    write_dataset(transformed, args.out)
    if args.traces:
        with open(args.traces, "w", encoding="utf-8", newline="\n") as f:
            for trace in traces:
                f.write(json.dumps(trace.to_dict(), ensure_ascii=False) + "\n")
    total = sum(t.words_replaced_count for t in traces)
    _emit(args, {"n_examples": len(examples), "transform": args.transform,
                 "words_replaced_total": total},
          f"transformed {len(examples)} examples ({args.transform}), "
          f"{total} words replaced")
    return 0


def cmd_preprocess(args) -> int:
    examples = load_dataset(args.in_)
    lexicons = load_lexicons(args.data_dir)
    cleaned, metrics = inverse.preprocess_dataset(examples, lexicons)
    write_dataset(cleaned, args.out)
    print(json.dumps(metrics, ensure_ascii=False))
    return 0


def cmd_augment(args) -> int:
    examples = load_dataset(args.in_)
    engine = TransformEngine(load_lexicons(args.data_dir))
    out = augment_mod.augment_dataset(examples, args.seed, engine)
    write_dataset(out, args.out)
    _emit(args, {"n_in": len(examples), "n_out": len(out),
                 "n_copies": len(out) - len(examples)},
          f"augmented {len(examples)} -> {len(out)} examples "
          f"({len(out) - len(examples)} copies)")
    return 0


def cmd_tokenstats(args) -> int:
    if not args.vocab_wordpiece and not args.vocab_bpe:
        raise ToolkitError("need --vocab-wordpiece and/or --vocab-bpe")
    wp_vocab = (tokenization.load_wordpiece_vocab(args.vocab_wordpiece)
                if args.vocab_wordpiece else None)
    bpe_vocab = None
    if args.vocab_bpe:
        try:
            vocab_path, merges_path = args.vocab_bpe.split(",")
        except ValueError:
            raise ToolkitError("--vocab-bpe expects 'vocab.json,merges.txt'") from None
        bpe_vocab = tokenization.load_bpe_vocab(vocab_path, merges_path)
    for path in args.in_:
        dataset = load_dataset(path)
        variant = args.variant_name or _variant_of(Path(path))
        record: dict = {"file": str(path), "variant_name": variant,
                        "n_examples": len(dataset)}
        if wp_vocab:
            record["wordpiece"] = tokenization.unk_stats(dataset, wp_vocab,
                                                         variant).to_dict()
        if bpe_vocab:
            record["bpe"] = tokenization.fragmentation_stats(dataset, bpe_vocab,
                                                             variant).to_dict()
        print(json.dumps(record, ensure_ascii=False))
    return 0


def cmd_llm_eval(args) -> int:
    examples = load_dataset(args.in_)
    cache = ResponseCache.open(args.cache)
    pred = classify_batch(examples, args.model, cache,
                          base_url=args.base_url, rate_limit=args.rate_limit,
                          jobs=args.jobs, variant_name=args.variant_name or "")
    write_predictions(pred, args.out)
    _emit(args, {"n_examples": len(examples), **pred.metadata},
          f"wrote {len(examples)} predictions to {args.out} "
          f"({pred.metadata['cache_hits']} cached, "
          f"{pred.metadata['network_calls']} fetched, "
          f"{pred.metadata['invalid_count']} invalid)")
    return 0


def cmd_compare(args) -> int:
    gold = load_dataset(args.gold)
    pred_a = load_predictions(args.a)
    pred_b = load_predictions(args.b)
    correct_a, correct_b = align(pred_a, pred_b, gold)
    result = mcnemar(correct_a, correct_b)
    family = BonferroniFamily(args.family, args.m, args.alpha)
    verdict = compare_family([(f"{pred_a.model_name} vs {pred_b.model_name}",
                               result)], family)
    payload = {
        "a": {"model_name": pred_a.model_name, "accuracy": accuracy(correct_a),
              "ci": bootstrap_ci(correct_a).to_dict()},
        "b": {"model_name": pred_b.model_name, "accuracy": accuracy(correct_b),
              "ci": bootstrap_ci(correct_b).to_dict()},
        "mcnemar": result.to_dict(),
        "family_name": family.family_name,
        "m": family.m,
        "alpha": family.alpha,
        "threshold": family.threshold,
        "significant": verdict["tests"][0]["significant"],
    }
    print(json.dumps(payload, indent=2, ensure_ascii=False))
    return 0


def cmd_report(args) -> int:
    gold_dir = Path(args.gold_dir)
    manifests = sorted(gold_dir.glob("*.manifest.json"))
    if len(manifests) != 1:
        raise ToolkitError(f"expected exactly one manifest in {gold_dir}, "
                           f"found {len(manifests)}")
    from .corpus import VariantManifest
    manifest = VariantManifest.from_json(manifests[0].read_text("utf-8"))
    gold_variants = {
        entry.variant_name: load_dataset(gold_dir / entry.file_path)
        for entry in manifest.variants
    }
    preds = {}
    for path in sorted(Path(args.preds_dir).glob("*.jsonl")):
        parts = path.stem.rsplit(".", 1)
        if len(parts) != 2 or parts[1] not in VARIANT_NAMES:
            continue
        approach, variant = parts
        preds[(approach, variant)] = load_predictions(path, model_name=approach,
                                                      variant_name=variant)
    out_dir = Path(args.out_dir or Path(args.preds_dir) / "report")
    out_dir.mkdir(parents=True, exist_ok=True)
    table = report.accuracy_table(gold_variants, preds, with_margins=args.margins)
    (out_dir / "accuracy.csv").write_text(table.to_csv(), encoding="utf-8")
    (out_dir / "accuracy.txt").write_text(table.to_text() + "\n", encoding="utf-8")
    analysis: dict = {"accuracy": {f"{a}/{v}": acc for (a, v), acc
                                   in sorted(table.cells.items())}}
    confusion_dir = out_dir / "confusion"
    confusion_dir.mkdir(exist_ok=True)
    collapse = {}
    for (approach, variant), pred in sorted(preds.items()):
        gold = gold_variants[variant]
        table_cv = report.confusion(gold, pred)
        (confusion_dir / f"{approach}.{variant}.csv").write_text(
            table_cv.to_csv(), encoding="utf-8")
        collapse[f"{approach}/{variant}"] = report.label_collapse_share(gold, pred)
    analysis["label_collapse_share"] = collapse
    if args.baseline and args.mitigated:
        recov = {}
        for variant in gold_variants:
            key_b, key_m = (args.baseline, variant), (args.mitigated, variant)
            if key_b in preds and key_m in preds:
                r = report.recovery(gold_variants[variant], preds[key_b],
                                    preds[key_m])
                recov[variant] = r.to_dict()
        analysis["recovery"] = recov
    (out_dir / "analysis.json").write_text(
        json.dumps(analysis, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    _emit(args, analysis, f"report written to {out_dir}")
    return 0


def cmd_roundtrip(args) -> int:
    original = load_dataset(args.original)
    variant = load_dataset(args.variant)
    traces = load_traces(args.traces)
    lexicons = load_lexicons(args.data_dir)
    metrics = inverse.roundtrip_metrics(original, variant, traces, lexicons)
    print(json.dumps(metrics, ensure_ascii=False))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"dataset seed (default {DEFAULT_SEED})")
    common.add_argument("--config", default=None,
                        help="TOML/JSON file providing defaults for flags")
    common.add_argument("--data-dir", default=None,
                        help="directory with slang.tsv/emoji.json/noise.txt "
                             "(default: bundled lexicons)")
    common.add_argument("--json", action="store_true",
                        help="machine-readable JSON on stdout")

    parser = argparse.ArgumentParser(
        prog="informalnli",
        description="Informal-text robustness toolkit for NLI models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("variants", parents=[common],
                       help="write the five fixed evaluation variants")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--name", default=None, help="dataset name for output files")
    p.set_defaults(func=cmd_variants)

    p = sub.add_parser("transform", parents=[common],
                       help="apply one transform to a dataset")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--transform", required=True, choices=TRANSFORM_NAMES)
    p.add_argument("--traces", default=None, help="also write a trace JSONL")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("preprocess", parents=[common],
                       help="inverse-transform a variant back toward clean text")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("augment", parents=[common],
                       help="augment a training set (50%% copies, uniform transform)")
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("tokenstats", parents=[common],
                       help="tokenizer diagnostics for one or more variants")
    p.add_argument("--in", dest="in_", required=True, action="append")
    p.add_argument("--vocab-wordpiece", default=None)
    p.add_argument("--vocab-bpe", default=None,
                   help="comma-separated 'vocab.json,merges.txt'")
    p.add_argument("--variant-name", default=None)
    p.set_defaults(func=cmd_tokenstats)

    p = sub.add_parser("llm-eval", parents=[common],
                       help="zero-shot chat-completion predictions with caching")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="in_", required=True)
    p.add_argument("--cache", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--base-url", default="https://api.openai.com/v1")
    p.add_argument("--rate-limit", type=float, default=0.0,
                   help="max requests per second (0 = unlimited)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--variant-name", default=None)
    p.set_defaults(func=cmd_llm_eval)

    p = sub.add_parser("compare", parents=[common],
                       help="paired McNemar comparison of two prediction files")
    p.add_argument("--gold", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--family", default="default")
    p.add_argument("--m", type=int, default=1, help="tests in the Bonferroni family")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", parents=[common],
                       help="accuracy/confusion/recovery artifacts from prediction files")
    p.add_argument("--gold-dir", required=True,
                   help="directory with variant files and their manifest")
    p.add_argument("--preds-dir", required=True,
                   help="directory of {approach}.{variant}.jsonl prediction files")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--margins", action="store_true",
                   help="add bootstrap CI half-widths to the accuracy table")
    p.add_argument("--baseline", default=None)
    p.add_argument("--mitigated", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("roundtrip", parents=[common],
                       help="recovery metrics for a variant against its source")
    p.add_argument("--original", required=True)
    p.add_argument("--variant", required=True)
    p.add_argument("--traces", required=True)
    p.set_defaults(func=cmd_roundtrip)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args)
    if getattr(args, "seed", None) is None:
        args.seed = DEFAULT_SEED
    try:
        return args.func(args)
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
