"""Paired statistical comparison of prediction files.

Accuracy, percentile bootstrap CIs (2,000 replicates, seed 42, pinned RNG),
McNemar's test with continuity correction, and Bonferroni-adjusted verdicts.
Alignment is strict: prediction files must cover exactly the gold IDs, and
mismatches raise instead of silently intersecting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import LABELS, NliExample
from .errors import (AlignmentError, DuplicateIdError, EmptyInput,
                     LengthMismatch, MalformedRecord, UnknownLabel)

INVALID = "invalid"
RNG_ALGORITHM = "numpy-pcg64"


@dataclass
class PredictionFile:
    model_name: str
    variant_name: str
    records: list[tuple[str, str]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [i for i, _ in self.records]
        if len(set(ids)) != len(ids):
            seen, dupes = set(), []
            for i in ids:
                if i in seen:
                    dupes.append(i)
                seen.add(i)
            raise DuplicateIdError(dupes)
        for i, label in self.records:
            if label not in LABELS and label != INVALID:
                raise ValueError(f"prediction {i}: label {label!r} not allowed")

    def labels_by_id(self) -> dict[str, str]:
        return dict(self.records)


def load_predictions(path: str | Path, model_name: str = "",
                     variant_name: str = "") -> PredictionFile:
    records = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecord(line_no, f"invalid JSON ({e.msg})") from e
            if "id" not in rec or "label" not in rec:
                raise MalformedRecord(line_no, "missing id/label field")
            if rec["label"] not in LABELS and rec["label"] != INVALID:
                raise UnknownLabel(line_no, rec["label"])
            records.append((rec["id"], rec["label"]))
    return PredictionFile(model_name or Path(path).stem, variant_name, records)


def write_predictions(pred: PredictionFile, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for ex_id, label in pred.records:
            f.write(json.dumps({"id": ex_id, "label": label}) + "\n")


def _correctness(pred: PredictionFile, gold: list[NliExample]) -> list[bool]:
    by_id = pred.labels_by_id()
    gold_ids = {ex.id for ex in gold}
    missing = sorted(gold_ids - by_id.keys())
    extra = sorted(by_id.keys() - gold_ids)
    if missing or extra:
        raise AlignmentError(
            f"predictions for {pred.model_name!r} do not match the gold IDs",
            missing=missing, extra=extra,
        )
    return [by_id[ex.id] == ex.gold_label for ex in gold]


def align(pred_a: PredictionFile, pred_b: PredictionFile,
          gold: list[NliExample]) -> tuple[list[bool], list[bool]]:
    """Paired correctness vectors in gold order; invalid labels score False."""
    correct_a = _correctness(pred_a, gold)
    correct_b = _correctness(pred_b, gold)
    for pred in (pred_a, pred_b):
        n_invalid = sum(1 for _, label in pred.records if label == INVALID)
        if n_invalid:
            pred.metadata["invalid_count"] = n_invalid
    return correct_a, correct_b


def accuracy(correct: list[bool]) -> float:
    if not correct:
        raise EmptyInput("accuracy of an empty vector")
    return sum(correct) / len(correct)


@dataclass(frozen=True)
class McNemarResult:
    b: int           # model A correct, model B wrong
    c: int           # model A wrong, model B correct
    statistic: float
    p_value: float
    no_discordant_pairs: bool = False

    @property
    def n_discordant(self) -> int:
        return self.b + self.c

    def to_dict(self) -> dict:
        d = {"b": self.b, "c": self.c, "n_discordant": self.n_discordant,
             "statistic": self.statistic, "p_value": self.p_value}
        if self.no_discordant_pairs:
            d["no_discordant_pairs"] = True
        return d


def chi2_sf_1df(x: float) -> float:
    """Survival function of chi-square with 1 df: erfc(sqrt(x/2))."""
    return math.erfc(math.sqrt(x / 2.0))


def mcnemar(correct_a: list[bool], correct_b: list[bool]) -> McNemarResult:
    """Continuity-corrected McNemar over paired correctness vectors.

    |b-c|-1 is clamped at zero (the classical formula is undefined below it),
    so b == c reports statistic 0 and p 1.0.
    """
    if len(correct_a) != len(correct_b):
        raise LengthMismatch(f"{len(correct_a)} vs {len(correct_b)} outcomes")
    b = sum(1 for x, y in zip(correct_a, correct_b) if x and not y)
    c = sum(1 for x, y in zip(correct_a, correct_b) if not x and y)
    if b + c == 0:
        return McNemarResult(b, c, 0.0, 1.0, no_discordant_pairs=True)
    statistic = max(abs(b - c) - 1, 0) ** 2 / (b + c)
    return McNemarResult(b, c, statistic, chi2_sf_1df(statistic))


@dataclass(frozen=True)
class BonferroniFamily:
    family_name: str
    m: int
    alpha: float = 0.05

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("family must contain at least one test")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")

    @property
    def threshold(self) -> float:
        return self.alpha / self.m


def compare_family(tests: list[tuple[str, McNemarResult]],
                   family: BonferroniFamily) -> dict:
    """Mark each test significant iff p < alpha/m; echo the threshold used."""
    return {
        "family_name": family.family_name,
        "m": family.m,
        "alpha": family.alpha,
        "threshold": family.threshold,
        "tests": [
            {"name": name, **result.to_dict(),
             "significant": result.p_value < family.threshold}
            for name, result in tests
        ],
    }


@dataclass(frozen=True)
class BootstrapCi:
    point: float
    lower: float
    upper: float
    replicates: int
    seed: int
    level: float = 0.95
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.point <= self.upper <= 1.0):
            raise ValueError("percentile CI must bracket the point estimate in [0, 1]")

    @property
    def half_width(self) -> float:
        return (self.upper - self.lower) / 2.0

    def to_dict(self) -> dict:
        return {"point": self.point, "lower": self.lower, "upper": self.upper,
                "replicates": self.replicates, "seed": self.seed,
                "level": self.level, "rng_algorithm": self.rng_algorithm}


def bootstrap_ci(correct: list[bool], replicates: int = 2000, seed: int = 42,
                 level: float = 0.95) -> BootstrapCi:
    """Percentile bootstrap CI for accuracy, deterministic under the pinned RNG.

    Resampling n 0/1 outcomes with replacement makes the replicate success
    count exactly Binomial(n, p_hat), so replicates are drawn from that
    distribution directly instead of materializing index arrays.
    """
    if not correct:
        raise EmptyInput("bootstrap over an empty vector")
    n = len(correct)
    p_hat = sum(correct) / n
    rng = np.random.default_rng(seed)
    samples = rng.binomial(n, p_hat, size=replicates) / n
    lo, hi = 100 * (1 - level) / 2, 100 * (1 + level) / 2
    lower, upper = np.percentile(samples, [lo, hi])
    return BootstrapCi(point=p_hat, lower=float(lower), upper=float(upper),
                       replicates=replicates, seed=seed, level=level)
