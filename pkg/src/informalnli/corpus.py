"""NLI dataset loading, validation, identification, and variant file management.

Datasets are JSONL (UTF-8, LF endings), one record per line with fields
``premise``, ``hypothesis``, ``label`` and an optional ``id``. When ``id``
is absent it is recomputed from content, so plain third-party NLI files
load directly; files written by this package persist their IDs so that
transformed variants stay keyed by the source example (the pairing that
paired significance tests require).
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Protocol

from .errors import AlignmentError, EmptyInput, MalformedRecord, UnknownLabel

log = logging.getLogger(__name__)

LABELS = ("entailment", "neutral", "contradiction")
UNANNOTATED = "-"

VARIANT_NAMES = ("original", "slang", "emoji", "noise", "combined")

_SEP = b"\x1f"


def example_id(premise: str, hypothesis: str, gold_label: str) -> str:
    """Stable content ID: first 16 bytes of SHA-256 over the 0x1F-joined fields.

    The separator byte cannot occur in field text boundaries ambiguously, so
    the encoding is injective: swapping premise and hypothesis changes the ID.
    """
    h = hashlib.sha256()
    h.update(premise.encode("utf-8"))
    h.update(_SEP)
    h.update(hypothesis.encode("utf-8"))
    h.update(_SEP)
    h.update(gold_label.encode("utf-8"))
    return h.hexdigest()[:32]


@dataclass(frozen=True)
class NliExample:
    """One premise/hypothesis/label record.

    ``id`` is content-derived for freshly created examples. Transformed
    variant records deliberately keep their source example's ID so that the
    five evaluation variants share an ID sequence; augmented copies get a
    fresh content ID plus ``source_id`` provenance.
    """

    id: str
    premise: str
    hypothesis: str
    gold_label: str
    source_id: str | None = None
    transform: str | None = None

    def __post_init__(self):
        if self.gold_label not in LABELS:
            raise ValueError(f"gold_label must be one of {LABELS}, got {self.gold_label!r}")
        if not self.premise.strip():
            raise ValueError("premise is empty")
        if not self.hypothesis.strip():
            raise ValueError("hypothesis is empty")

    @classmethod
    def create(cls, premise: str, hypothesis: str, gold_label: str) -> "NliExample":
        return cls(example_id(premise, hypothesis, gold_label), premise, hypothesis, gold_label)

    def with_text(self, premise: str, hypothesis: str) -> "NliExample":
        """Copy with rewritten text, same ID and label (used by transforms)."""
        return replace(self, premise=premise, hypothesis=hypothesis)


def _record_to_dict(ex: NliExample) -> dict:
    rec = {"id": ex.id, "premise": ex.premise, "hypothesis": ex.hypothesis,
           "label": ex.gold_label}
    if ex.source_id is not None:
        rec["source_id"] = ex.source_id
    if ex.transform is not None:
        rec["transform"] = ex.transform
    return rec


def serialize_dataset(examples: Iterable[NliExample]) -> bytes:
    lines = [json.dumps(_record_to_dict(ex), ensure_ascii=False) for ex in examples]
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


def dataset_digest(examples: Iterable[NliExample]) -> str:
    return hashlib.sha256(serialize_dataset(examples)).hexdigest()


def write_dataset(examples: list[NliExample], path: str | Path) -> str:
    """Write JSONL and return the SHA-256 digest of the bytes written."""
    data = serialize_dataset(examples)
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def load_dataset(path: str | Path, format: str = "jsonl") -> list[NliExample]:
    """Load an ordered dataset, dropping (and logging) unannotated '-' records.

    Accepts ``label`` or SNLI's ``gold_label`` field name. Raises
    MalformedRecord / UnknownLabel with the 1-based line number on bad input.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported format {format!r}")
    examples: list[NliExample] = []
    dropped = 0
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecord(line_no, f"invalid JSON ({e.msg})") from e
            if not isinstance(rec, dict):
                raise MalformedRecord(line_no, "record is not an object")
            label = rec.get("label", rec.get("gold_label"))
            premise = rec.get("premise")
            hypothesis = rec.get("hypothesis")
            if premise is None or hypothesis is None or label is None:
                raise MalformedRecord(line_no, "missing premise/hypothesis/label field")
            if label == UNANNOTATED:
                dropped += 1
                continue
            if label not in LABELS:
                raise UnknownLabel(line_no, label)
            try:
                ex = NliExample(
                    id=rec.get("id") or example_id(premise, hypothesis, label),
                    premise=premise,
                    hypothesis=hypothesis,
                    gold_label=label,
                    source_id=rec.get("source_id"),
                    transform=rec.get("transform"),
                )
            except ValueError as e:
                raise MalformedRecord(line_no, str(e)) from e
            examples.append(ex)
    if dropped:
        log.info("dropped %d unannotated '-' records from %s", dropped, path)
    return examples


class TransformEngineLike(Protocol):
    """What build_eval_variants needs from the transforms module."""

    def transform_example(self, example: NliExample, variant_name: str,
                          dataset_seed: int): ...


@dataclass
class VariantEntry:
    variant_name: str
    file_path: str
    example_count: int
    content_digest: str


@dataclass
class VariantManifest:
    source_dataset: str
    seed: int
    variants: list[VariantEntry] = field(default_factory=list)

    def validate(self) -> None:
        names = [v.variant_name for v in self.variants]
        if sorted(names) != sorted(VARIANT_NAMES):
            raise ValueError(f"manifest must list each of {VARIANT_NAMES} exactly once, got {names}")
        counts = {v.example_count for v in self.variants}
        if len(counts) != 1:
            raise ValueError(f"variants disagree on example_count: {counts}")

    def entry(self, variant_name: str) -> VariantEntry:
        for v in self.variants:
            if v.variant_name == variant_name:
                return v
        raise KeyError(variant_name)

    def to_json(self) -> str:
        return json.dumps(
            {
                "source_dataset": self.source_dataset,
                "seed": self.seed,
                "variants": [vars(v) for v in self.variants],
            },
            indent=2,
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "VariantManifest":
        raw = json.loads(text)
        m = cls(source_dataset=raw["source_dataset"], seed=raw["seed"],
                variants=[VariantEntry(**v) for v in raw["variants"]])
        m.validate()
        return m


def build_eval_variants(
    examples: list[NliExample],
    seed: int,
    transform_engine: TransformEngineLike,
    out_dir: str | Path,
    dataset_name: str = "dataset",
) -> VariantManifest:
    """Write the five fixed evaluation variants plus per-variant trace files.

    The original variant is the input re-serialized verbatim; the four
    transformed variants keep the source ID sequence, which makes any two
    variant files zip-able by position. Deterministic for fixed
    (examples, seed).
    """
    if not examples:
        raise EmptyInput("cannot build variants from an empty dataset")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = VariantManifest(source_dataset=dataset_name, seed=seed)
    for variant in VARIANT_NAMES:
        file_path = out / f"{dataset_name}.{variant}.jsonl"
        if variant == "original":
            digest = write_dataset(examples, file_path)
            count = len(examples)
        else:
            transformed = []
            traces = []
            for ex in examples:
                new_ex, trace = transform_engine.transform_example(ex, variant, seed)
                transformed.append(new_ex)
                traces.append(trace)
            digest = write_dataset(transformed, file_path)
            count = len(transformed)
            trace_path = out / f"{dataset_name}.{variant}.traces.jsonl"
            with open(trace_path, "w", encoding="utf-8", newline="\n") as f:
                for trace in traces:
                    f.write(json.dumps(trace.to_dict(), ensure_ascii=False) + "\n")
        manifest.variants.append(
            VariantEntry(variant, file_path.name, count, digest)
        )
    manifest.validate()
    (out / f"{dataset_name}.manifest.json").write_text(manifest.to_json() + "\n",
                                                       encoding="utf-8")
    return manifest


def check_alignment(a: list[NliExample], b: list[NliExample]) -> None:
    """Raise AlignmentError unless the two datasets share the ordered ID sequence."""
    ids_a = [ex.id for ex in a]
    ids_b = [ex.id for ex in b]
    if ids_a == ids_b:
        return
    missing = sorted(set(ids_a) - set(ids_b))
    extra = sorted(set(ids_b) - set(ids_a))
    if missing or extra:
        raise AlignmentError(
            f"ID sets differ ({len(missing)} missing, {len(extra)} extra)",
            missing=missing, extra=extra,
        )
    raise AlignmentError("ID sets match but order differs")
