"""IF-THEN rule extraction from decision trees.

Each leaf yields one rule whose conditions are the attribute=value tests
on the path from the root, in path order. Support and confidence are
recomputed against the supplied training data rather than read off the
leaf, which keeps the two bookkeeping paths checkable against each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .dataset import Dataset
from .tree import DecisionTree, Leaf, prune

__all__ = ["Rule", "extract_rules", "render_rules", "rules_to_json", "prune"]


@dataclass(frozen=True)
class Rule:
    """Conjunction of attribute=value conditions implying a class label."""

    conditions: tuple[tuple[str, str], ...]
    consequent: str
    support: int
    confidence: float


def extract_rules(tree: DecisionTree, training: Dataset) -> list[Rule]:
    """One rule per leaf, in depth-first domain order.

    A rule under an empty branch matches no training record; its support
    is 0 and its confidence is reported as 0.0.
    """
    if training.schema.digest() != tree.schema.digest():
        raise ValueError("training data schema does not match the tree's schema")

    rules: list[Rule] = []

    def walk(node, path: tuple[tuple[str, str], ...]):
        if isinstance(node, Leaf):
            matching = [
                r for r in training.records
                if all(r.values[a] == v for a, v in path)
            ]
            support = len(matching)
            hits = sum(1 for r in matching if r.label == node.label)
            confidence = hits / support if support else 0.0
            rules.append(Rule(path, node.label, support, confidence))
            return
        for value in tree.schema.domain(node.attribute):
            walk(node.branches[value], path + ((node.attribute, value),))

    walk(tree.root, ())
    return rules


def render_rules(rules: Sequence[Rule], class_name: str) -> str:
    """Render one `IF ... THEN <class> = '...'` line per rule."""
    lines = []
    for rule in rules:
        if rule.conditions:
            antecedent = " AND ".join(f"{a} = '{v}'" for a, v in rule.conditions)
        else:
            antecedent = "TRUE"
        lines.append(
            f"IF {antecedent} THEN {class_name} = '{rule.consequent}' "
            f"[support={rule.support}, confidence={rule.confidence:.2f}]"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def rules_to_json(rules: Sequence[Rule], class_name: str) -> str:
    doc = [
        {
            "conditions": [{"attribute": a, "value": v} for a, v in rule.conditions],
            "class": class_name,
            "consequent": rule.consequent,
            "support": rule.support,
            "confidence": rule.confidence,
        }
        for rule in rules
    ]
    return json.dumps(doc, indent=2) + "\n"
