import random

import pytest

from gradetree.dataset import Attribute, AttributeSchema, Dataset, Record, load_students


@pytest.fixture(scope="session")
def students() -> Dataset:
    return load_students()


@pytest.fixture(scope="session")
def fixture_tree(students):
    from gradetree.tree import id3_build

    return id3_build(students)


def tiny_schema(n_attrs=2, domain=("a", "b"), classes=("c0", "c1")) -> AttributeSchema:
    attrs = tuple(Attribute(f"A{i}", tuple(domain)) for i in range(n_attrs))
    return AttributeSchema(attrs, Attribute("Y", tuple(classes)))


def make_dataset(schema: AttributeSchema, rows) -> Dataset:
    """rows: iterable of (values tuple in schema order, label)."""
    names = schema.attribute_names
    records = tuple(Record(dict(zip(names, vals)), label) for vals, label in rows)
    return Dataset(schema, records)


def random_dataset(rng: random.Random, max_attributes=6, max_records=200,
                   contradiction_free=True) -> Dataset:
    """Random categorical dataset; duplicate predictor tuples share a label
    when contradiction_free is set."""
    n_attrs = rng.randint(1, max_attributes)
    attrs = tuple(
        Attribute(f"A{i}", tuple(f"v{j}" for j in range(rng.randint(2, 4))))
        for i in range(n_attrs)
    )
    classes = tuple(f"c{j}" for j in range(rng.randint(2, 5)))
    schema = AttributeSchema(attrs, Attribute("Y", classes))
    label_of = {}
    records = []
    for _ in range(rng.randint(1, max_records)):
        key = tuple(rng.choice(a.domain) for a in attrs)
        if contradiction_free:
            label = label_of.setdefault(key, rng.choice(classes))
        else:
            label = rng.choice(classes)
        records.append(Record(dict(zip(schema.attribute_names, key)), label))
    return Dataset(schema, tuple(records))


# Naive scoring used as the in-test oracle; kept free of gradetree.metrics.


def naive_entropy(labels) -> float:
    import math

    n = len(labels)
    if n == 0:
        return 0.0
    tally = {}
    for lab in labels:
        tally[lab] = tally.get(lab, 0) + 1
    return sum(-(c / n) * math.log2(c / n) for c in tally.values())


def naive_gain(dataset: Dataset, attribute: str) -> float:
    labels = [r.label for r in dataset.records]
    groups = {}
    for r in dataset.records:
        groups.setdefault(r.values[attribute], []).append(r.label)
    weighted = sum(len(g) / len(labels) * naive_entropy(g) for g in groups.values())
    return naive_entropy(labels) - weighted


def naive_split_info(dataset: Dataset, attribute: str) -> float:
    import math

    n = len(dataset)
    groups = {}
    for r in dataset.records:
        groups.setdefault(r.values[attribute], []).append(1)
    return sum(-(len(g) / n) * math.log2(len(g) / n) for g in groups.values())
