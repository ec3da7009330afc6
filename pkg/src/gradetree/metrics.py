"""Impurity indices and attribute-selection criteria.

All logarithms are base 2 and 0*log2(0) is taken as 0, so a pure
distribution scores 0 under every index. The impurity of an empty
distribution is defined as 0, which keeps weighted sums over partitions
with empty parts well-formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .dataset import ClassDistribution, Dataset, class_distribution, partition

__all__ = [
    "ImpurityKind",
    "AttributeScore",
    "impurity",
    "entropy",
    "gini",
    "classification_error",
    "information_gain",
    "split_information",
    "gain_ratio",
    "score_all",
]

# negative values within this slack are treated as rounding noise and clamped
_SLACK = 1e-12


class ImpurityKind(Enum):
    ENTROPY = "entropy"
    GINI = "gini"
    CLASSIFICATION_ERROR = "classification-error"


def entropy(dist: ClassDistribution) -> float:
    """-sum p_j log2 p_j over the nonzero class probabilities."""
    if dist.total == 0:
        return 0.0
    h = 0.0
    for count in dist.counts.values():
        if count:
            p = count / dist.total
            h -= p * math.log2(p)
    return h


def gini(dist: ClassDistribution) -> float:
    """1 - sum p_j^2; maximum 1 - 1/n at the uniform n-class distribution."""
    if dist.total == 0:
        return 0.0
    return 1.0 - sum((count / dist.total) ** 2 for count in dist.counts.values())


def classification_error(dist: ClassDistribution) -> float:
    """1 - max p_j; shares its maximum 1 - 1/n with the Gini index."""
    if dist.total == 0:
        return 0.0
    return 1.0 - max(dist.counts.values()) / dist.total


def impurity(dist: ClassDistribution, kind: ImpurityKind) -> float:
    if kind is ImpurityKind.ENTROPY:
        return entropy(dist)
    if kind is ImpurityKind.GINI:
        return gini(dist)
    if kind is ImpurityKind.CLASSIFICATION_ERROR:
        return classification_error(dist)
    raise ValueError(f"unknown impurity kind: {kind!r}")


def _check_scorable(dataset: Dataset, attribute: str) -> None:
    if len(dataset) == 0:
        raise ValueError("cannot score attributes on an empty dataset")
    if attribute not in dataset.schema.attribute_names:
        raise KeyError(f"unknown attribute {attribute!r}")


def information_gain(dataset: Dataset, attribute: str) -> float:
    """Expected entropy reduction from partitioning by the attribute.

    Clamped to 0 from below; a gain more negative than rounding slack
    cannot occur for a true entropy difference.
    """
    _check_scorable(dataset, attribute)
    total = len(dataset)
    parent = entropy(class_distribution(dataset))
    weighted = 0.0
    for part in partition(dataset, attribute).values():
        if len(part):
            weighted += len(part) / total * entropy(class_distribution(part))
    gain = parent - weighted
    return 0.0 if -_SLACK < gain < 0 else gain


def split_information(dataset: Dataset, attribute: str) -> float:
    """Entropy of the partition-size distribution; empty parts contribute 0."""
    _check_scorable(dataset, attribute)
    total = len(dataset)
    info = 0.0
    for part in partition(dataset, attribute).values():
        if len(part):
            frac = len(part) / total
            info -= frac * math.log2(frac)
    return info


def gain_ratio(dataset: Dataset, attribute: str) -> float:
    """Information gain normalized by split information; 0 on a zero split.

    An attribute with a single represented value has no split information;
    returning 0 keeps such useless splits out of argmax contention.
    """
    info = split_information(dataset, attribute)
    if info == 0.0:
        return 0.0
    return information_gain(dataset, attribute) / info


@dataclass(frozen=True)
class AttributeScore:
    attribute: str
    gain: float
    split_information: float
    gain_ratio: float


def score_all(dataset: Dataset, available: Sequence[str] | None = None) -> list[AttributeScore]:
    """Score attributes (schema order): gain, split information, gain ratio."""
    if available is None:
        available = dataset.schema.attribute_names
    if not available:
        raise ValueError("no attributes to score")
    unknown = set(available) - set(dataset.schema.attribute_names)
    if unknown:
        raise KeyError(f"unknown attribute(s) {sorted(unknown)}")
    scores = []
    for name in dataset.schema.attribute_names:
        if name not in available:
            continue
        g = information_gain(dataset, name)
        s = split_information(dataset, name)
        scores.append(AttributeScore(name, g, s, g / s if s > 0 else 0.0))
    return scores
