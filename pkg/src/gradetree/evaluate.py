"""Accuracy, confusion matrices, and leave-one-out estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .dataset import Dataset
from .tree import DecisionTree, TreeConfig, id3_build, predict

__all__ = ["ConfusionMatrix", "LooResult", "accuracy", "confusion", "leave_one_out"]


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts keyed by (actual, predicted); class order follows the schema."""

    classes: tuple[str, ...]
    counts: Mapping[tuple[str, str], int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def accuracy(self) -> float:
        return sum(self.counts[(c, c)] for c in self.classes) / self.total

    def render(self) -> str:
        width = max(9, max(len(c) for c in self.classes) + 2)
        header = "actual\\predicted".ljust(18) + "".join(c.rjust(width) for c in self.classes)
        lines = [header]
        for actual in self.classes:
            row = actual.ljust(18)
            row += "".join(str(self.counts[(actual, p)]).rjust(width) for p in self.classes)
            lines.append(row)
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "counts": [
                {"actual": a, "predicted": p, "count": self.counts[(a, p)]}
                for a in self.classes
                for p in self.classes
            ],
        }


class LooResult(NamedTuple):
    accuracy: float
    confusion: ConfusionMatrix


def _check_evaluable(tree: DecisionTree, dataset: Dataset) -> None:
    if len(dataset) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    if dataset.schema.digest() != tree.schema.digest():
        raise ValueError("dataset schema does not match the tree's schema")


def accuracy(tree: DecisionTree, dataset: Dataset) -> float:
    """Fraction of records whose prediction equals their label."""
    _check_evaluable(tree, dataset)
    hits = sum(1 for r in dataset.records if predict(tree, r.values)[0] == r.label)
    return hits / len(dataset)


def confusion(tree: DecisionTree, dataset: Dataset) -> ConfusionMatrix:
    _check_evaluable(tree, dataset)
    classes = dataset.schema.class_domain
    counts = {(a, p): 0 for a in classes for p in classes}
    for r in dataset.records:
        counts[(r.label, predict(tree, r.values)[0])] += 1
    return ConfusionMatrix(classes, counts)


def leave_one_out(dataset: Dataset, config: TreeConfig | None = None) -> LooResult:
    """Hold out each record in turn, train on the rest, predict it.

    A desk-scale substitute for a held-out test set; the aggregate
    accuracy is this repo's documented baseline for the bundled fixture.
    """
    if len(dataset) < 2:
        raise ValueError("leave-one-out needs at least 2 records")
    if config is None:
        config = TreeConfig()
    classes = dataset.schema.class_domain
    counts = {(a, p): 0 for a in classes for p in classes}
    hits = 0
    for i, held_out in enumerate(dataset.records):
        rest = dataset.records[:i] + dataset.records[i + 1:]
        tree = id3_build(Dataset(dataset.schema, rest), config)
        predicted = predict(tree, held_out.values)[0]
        counts[(held_out.label, predicted)] += 1
        hits += predicted == held_out.label
    return LooResult(hits / len(dataset), ConfusionMatrix(classes, counts))
