"""Analysis artifacts: accuracy tables, confusion distributions, transitions,
and baseline-vs-mitigated recovery counts.

Everything here is exact integer aggregation first, percentages second, so
the arithmetic identities (confusion diagonal vs accuracy, recovered minus
regressed vs accuracy delta) hold exactly rather than to rounding error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .corpus import LABELS, NliExample
from .errors import AlignmentError, MissingCell
from .stats import INVALID, PredictionFile, bootstrap_ci

VARIANT_ORDER = ("original", "slang", "emoji", "noise", "combined")


def _aligned_labels(gold: list[NliExample], pred: PredictionFile) -> list[str]:
    by_id = pred.labels_by_id()
    missing = sorted({ex.id for ex in gold} - by_id.keys())
    extra = sorted(by_id.keys() - {ex.id for ex in gold})
    if missing or extra:
        raise AlignmentError(
            f"predictions for {pred.model_name!r} do not match the gold IDs",
            missing=missing, extra=extra,
        )
    return [by_id[ex.id] for ex in gold]


@dataclass
class ConfusionTable:
    """Row-normalized predicted-label distribution per true class.

    counts holds raw integers; rows holds percentages. An 'invalid' column
    appears only when some prediction carried the invalid sentinel, keeping
    each row summing to 100 within rounding either way.
    """

    labels: tuple[str, ...]
    pred_labels: tuple[str, ...]
    counts: dict[str, dict[str, int]]
    rows: dict[str, dict[str, float]]
    n_examples: int

    def accuracy(self) -> float:
        correct = sum(self.counts[label].get(label, 0) for label in self.labels)
        return correct / self.n_examples

    def to_text(self) -> str:
        width = max(len(l) for l in self.labels + self.pred_labels) + 2
        head = "true \\ pred".ljust(width) + "".join(p.rjust(width) for p in self.pred_labels)
        lines = [head]
        for label in self.labels:
            cells = "".join(f"{self.rows[label].get(p, 0.0):>{width}.0f}"
                            for p in self.pred_labels)
            lines.append(label.ljust(width) + cells)
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["true_label"] + list(self.pred_labels))
        for label in self.labels:
            writer.writerow([label] + [repr(self.rows[label].get(p, 0.0))
                                       for p in self.pred_labels])
        return buf.getvalue()


def confusion(gold: list[NliExample], pred: PredictionFile) -> ConfusionTable:
    predicted = _aligned_labels(gold, pred)
    any_invalid = any(p == INVALID for p in predicted)
    pred_labels = LABELS + ((INVALID,) if any_invalid else ())
    counts = {t: {p: 0 for p in pred_labels} for t in LABELS}
    for ex, p in zip(gold, predicted):
        counts[ex.gold_label][p] += 1
    rows = {}
    for t in LABELS:
        total = sum(counts[t].values())
        rows[t] = {p: (100.0 * counts[t][p] / total if total else 0.0)
                   for p in pred_labels}
    return ConfusionTable(LABELS, pred_labels, counts, rows, len(gold))


def transition_counts(gold: list[NliExample],
                      pred: PredictionFile) -> dict[tuple[str, str], int]:
    """Counts over misclassified examples only, keyed (true, predicted)."""
    predicted = _aligned_labels(gold, pred)
    out: dict[tuple[str, str], int] = {}
    for ex, p in zip(gold, predicted):
        if p != ex.gold_label:
            key = (ex.gold_label, p)
            out[key] = out.get(key, 0) + 1
    return out


def label_collapse_share(gold: list[NliExample], pred: PredictionFile) -> float:
    """Share of errors that land on neutral; 0.0 when there are no errors."""
    transitions = transition_counts(gold, pred)
    total = sum(transitions.values())
    if total == 0:
        return 0.0
    return sum(n for (_, p), n in transitions.items() if p == "neutral") / total


@dataclass
class RecoveryAnalysis:
    recovered: int           # baseline wrong, mitigated right
    regressed: int           # baseline right, mitigated wrong
    ratio: float | None      # None when regressed == 0
    transitions: dict[tuple[str, str], int]   # baseline errors
    recovered_ids: list[str] = field(default_factory=list)

    @property
    def ratio_undefined(self) -> bool:
        return self.ratio is None

    def to_dict(self) -> dict:
        return {
            "recovered": self.recovered,
            "regressed": self.regressed,
            "ratio": self.ratio,
            "ratio_undefined": self.ratio_undefined,
            "baseline_error_transitions": {f"{t}->{p}": n for (t, p), n
                                           in sorted(self.transitions.items())},
            "recovered_ids": self.recovered_ids,
        }


def recovery(gold: list[NliExample], baseline_preds: PredictionFile,
             mitigated_preds: PredictionFile) -> RecoveryAnalysis:
    base = _aligned_labels(gold, baseline_preds)
    mit = _aligned_labels(gold, mitigated_preds)
    recovered = regressed = 0
    recovered_ids = []
    for ex, b, m in zip(gold, base, mit):
        base_ok = b == ex.gold_label
        mit_ok = m == ex.gold_label
        if not base_ok and mit_ok:
            recovered += 1
            recovered_ids.append(ex.id)
        elif base_ok and not mit_ok:
            regressed += 1
    ratio = recovered / regressed if regressed else None
    return RecoveryAnalysis(recovered, regressed, ratio,
                            transition_counts(gold, baseline_preds), recovered_ids)


@dataclass
class AccuracyTable:
    approaches: tuple[str, ...]
    variants: tuple[str, ...]
    cells: dict[tuple[str, str], float]                 # accuracy per cell
    margins: dict[tuple[str, str], float] | None = None  # CI half-widths

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["approach"] + list(self.variants))
        for approach in self.approaches:
            writer.writerow([approach] + [repr(self.cells[(approach, v)])
                                          for v in self.variants])
        return buf.getvalue()

    def to_text(self) -> str:
        def fmt(approach: str, variant: str) -> str:
            acc = 100.0 * self.cells[(approach, variant)]
            if self.margins is not None:
                return f"{acc:.2f}±{100.0 * self.margins[(approach, variant)]:.2f}"
            return f"{acc:.2f}"

        width = max([len(a) for a in self.approaches] + [14]) + 2
        header = "approach".ljust(width) + "".join(v.rjust(14) for v in self.variants)
        lines = [header]
        for approach in self.approaches:
            lines.append(approach.ljust(width)
                         + "".join(fmt(approach, v).rjust(14) for v in self.variants))
        return "\n".join(lines)


def accuracy_table(gold_variants: dict[str, list[NliExample]],
                   prediction_files: dict[tuple[str, str], PredictionFile],
                   with_margins: bool = False) -> AccuracyTable:
    """Approaches x variants accuracy grid; every cell must have a file."""
    approaches = tuple(sorted({a for a, _ in prediction_files}))
    variants = tuple(v for v in VARIANT_ORDER if v in gold_variants) or \
        tuple(sorted(gold_variants))
    missing = [(a, v) for a in approaches for v in variants
               if (a, v) not in prediction_files]
    if missing:
        raise MissingCell(missing)
    cells = {}
    margins = {} if with_margins else None
    for approach in approaches:
        for variant in variants:
            gold = gold_variants[variant]
            pred = prediction_files[(approach, variant)]
            labels = _aligned_labels(gold, pred)
            correct = [p == ex.gold_label for ex, p in zip(gold, labels)]
            cells[(approach, variant)] = sum(correct) / len(correct)
            if with_margins:
                margins[(approach, variant)] = bootstrap_ci(correct).half_width
    return AccuracyTable(approaches, variants, cells, margins)
