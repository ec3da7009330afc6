import json
import random
import re
import subprocess
import sys

import pytest

from conftest import naive_gain
from gradetree.cli import main
from gradetree.dataset import fixture_paths
from gradetree.tree import Internal, Leaf, load_model, predict, tree_stats


@pytest.fixture()
def model_path(tmp_path, capsys):
    path = tmp_path / "model.json"
    assert main(["train", "--out", str(path)]) == 0
    capsys.readouterr()  # drop the train summary
    return path


# --- exit codes and usage -----------------------------------------------------


def test_no_arguments_is_a_usage_error(capsys):
    assert main([]) == 1


def test_unknown_flag_is_a_usage_error(capsys):
    assert main(["train", "--frobnicate"]) == 1


def test_unknown_command_is_a_usage_error(capsys):
    assert main(["explode"]) == 1


def test_missing_required_flag_is_a_usage_error(capsys):
    assert main(["predict"]) == 1


def test_nonexistent_data_file_is_a_data_error(tmp_path, capsys):
    code = main(["train", "--data", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "m.json")])
    assert code == 2
    assert "nope.csv" in capsys.readouterr().err


def test_training_on_header_only_csv_is_a_data_error(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("PSM,CTG,SEM,ASS,GP,ATT,LW,ESM\n")
    code = main(["train", "--data", str(empty), "--out", str(tmp_path / "m.json")])
    assert code == 2
    assert "empty" in capsys.readouterr().err


def test_invalid_value_reports_row_and_column(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(
        "PSM,CTG,SEM,ASS,GP,ATT,LW,ESM\n"
        "First,Good,Good,Yes,Yes,Excellent,Yes,First\n"
    )
    assert main(["train", "--data", str(bad), "--out", str(tmp_path / "m.json")]) == 2
    err = capsys.readouterr().err
    assert "row 1" in err and "ATT" in err and "Excellent" in err


# --- train ----------------------------------------------------------------------


def test_train_summary_names_the_argmax_root(tmp_path, capsys, students):
    path = tmp_path / "model.json"
    assert main(["train", "--out", str(path)]) == 0
    out = capsys.readouterr().out
    oracle = {a: naive_gain(students, a) for a in students.schema.attribute_names}
    expected_root = max(oracle, key=oracle.get)
    assert f"root attribute: {expected_root}" in out
    assert "training accuracy: 1.000" in out
    tree = load_model(path)
    assert tree.root.attribute == expected_root


def test_train_min_support_above_training_size_gives_majority_leaf(tmp_path, capsys):
    path = tmp_path / "stump.json"
    assert main(["train", "--min-support", "51", "--out", str(path)]) == 0
    out = capsys.readouterr().out
    assert "single leaf predicting 'Second'" in out
    tree = load_model(path)
    assert isinstance(tree.root, Leaf)
    assert tree.root.label == "Second"


def test_train_min_support_at_training_size_keeps_the_root_split(tmp_path):
    path = tmp_path / "depth1.json"
    assert main(["train", "--min-support", "50", "--out", str(path)]) == 0
    tree = load_model(path)
    assert isinstance(tree.root, Internal)
    assert all(isinstance(c, Leaf) for c in tree.root.branches.values())


def test_train_with_gain_ratio_criterion(tmp_path, capsys):
    path = tmp_path / "gr.json"
    assert main(["train", "--criterion", "gain-ratio", "--out", str(path)]) == 0
    assert load_model(path).config.criterion.value == "gain-ratio"


def test_train_honors_data_dir_env(tmp_path, monkeypatch, capsys):
    csv_path, schema_path = fixture_paths()
    (tmp_path / "students.csv").write_bytes(csv_path.read_bytes())
    (tmp_path / "students.schema.json").write_bytes(schema_path.read_bytes())
    monkeypatch.setenv("GRADETREE_DATA_DIR", str(tmp_path))
    assert main(["train", "--out", str(tmp_path / "m.json")]) == 0
    assert "trained on 50 records" in capsys.readouterr().out


# --- predict --------------------------------------------------------------------


def strip_labels(students, path):
    names = list(students.schema.attribute_names)
    lines = [",".join(names)]
    for rec in students.records:
        lines.append(",".join(rec.values[n] for n in names))
    path.write_text("\n".join(lines) + "\n")
    return path


def test_predict_recovers_training_labels(tmp_path, capsys, students, model_path):
    inputs = strip_labels(students, tmp_path / "inputs.csv")
    assert main(["predict", "--model", str(model_path), "--data", str(inputs)]) == 0
    out_lines = capsys.readouterr().out.strip().splitlines()
    header = out_lines[0].split(",")
    assert header[-2:] == ["ESM", "confidence"]
    assert len(out_lines) == 51
    for line, rec in zip(out_lines[1:], students.records):
        fields = line.split(",")
        assert fields[-2] == rec.label
        assert 0.0 < float(fields[-1]) <= 1.0


def test_predict_empty_input_gives_header_only(tmp_path, capsys, students, model_path):
    inputs = tmp_path / "none.csv"
    inputs.write_text(",".join(students.schema.attribute_names) + "\n")
    assert main(["predict", "--model", str(model_path), "--data", str(inputs)]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines() == [",".join(students.schema.attribute_names) + ",ESM,confidence"]


def test_predict_single_strong_row(tmp_path, capsys, model_path):
    inputs = tmp_path / "one.csv"
    inputs.write_text(
        "PSM,CTG,SEM,ASS,GP,ATT,LW\nFirst,Good,Good,Yes,Yes,Good,Yes\n"
    )
    assert main(["predict", "--model", str(model_path), "--data", str(inputs)]) == 0
    line = capsys.readouterr().out.strip().splitlines()[1]
    label, confidence = line.split(",")[-2:]
    assert label == "First"
    assert 0.0 < float(confidence) <= 1.0


def test_predict_rejects_unknown_value(tmp_path, capsys, model_path):
    inputs = tmp_path / "bad.csv"
    inputs.write_text("PSM,CTG,SEM,ASS,GP,ATT,LW\nFirst,Good,Good,Yes,Yes,Epic,Yes\n")
    assert main(["predict", "--model", str(model_path), "--data", str(inputs)]) == 2
    assert "Epic" in capsys.readouterr().err


def test_predict_rejects_missing_columns(tmp_path, capsys, model_path):
    inputs = tmp_path / "short.csv"
    inputs.write_text("PSM,CTG\nFirst,Good\n")
    assert main(["predict", "--model", str(model_path), "--data", str(inputs)]) == 2


def test_saved_model_predicts_identically_to_in_memory_tree(tmp_path, students, model_path):
    from gradetree.tree import id3_build

    in_memory = id3_build(students)
    loaded = load_model(model_path)
    rng = random.Random(59)
    schema = students.schema
    for _ in range(200):
        values = {a.name: rng.choice(a.domain) for a in schema.attributes}
        mem_label, mem_dist = predict(in_memory, values)
        disk_label, disk_dist = predict(loaded, values)
        assert mem_label == disk_label
        assert mem_dist == disk_dist


# --- rules, gains, verify, export-dot ---------------------------------------------


def test_rules_command_matches_golden_file(tmp_path, capsys, model_path):
    from pathlib import Path

    golden = Path(__file__).parent / "golden" / "fixture_rules.txt"
    assert main(["rules", "--model", str(model_path)]) == 0
    assert capsys.readouterr().out == golden.read_text()


def test_rules_json_output(tmp_path, capsys, model_path):
    assert main(["rules", "--model", str(model_path), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc) == 35
    assert all(item["class"] == "ESM" for item in doc)


def test_gains_text_output(capsys):
    assert main(["gains"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 8  # header + 7 attributes
    assert lines[0].split()[0] == "attribute"
    assert lines[1].startswith("PSM")


def test_gains_json_matches_metrics(capsys, students):
    from gradetree.metrics import score_all

    assert main(["gains", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    scores = score_all(students)
    assert [d["attribute"] for d in doc] == [s.attribute for s in scores]
    for d, s in zip(doc, scores):
        assert d["gain"] == s.gain
        assert d["split_information"] == s.split_information
        assert d["gain_ratio"] == s.gain_ratio


def test_verify_command_succeeds_and_is_deterministic(tmp_path):
    out1 = tmp_path / "report1.txt"
    out2 = tmp_path / "report2.txt"
    assert main(["verify", "--out", str(out1)]) == 0
    assert main(["verify", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text()
    assert "Entropy(S)" in text and "MISMATCH" in text


def test_verify_json_output(capsys):
    assert main(["verify", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["implementation_consistent"] is True
    assert doc["root"] == {"published": "PSM", "recomputed": "ATT", "verdict": "MISMATCH"}
    assert len(doc["rows"]) == 22


def test_verify_rejects_non_fixture_data(tmp_path, capsys, students):
    other = tmp_path / "other.csv"
    text = fixture_paths()[0].read_text().splitlines()
    other.write_text("\n".join(text[:-1]) + "\n")  # drop the last record
    assert main(["verify", "--data", str(other)]) == 2
    assert "fixture" in capsys.readouterr().err


# A deliberately small DOT checker, independent of the exporter: one
# digraph, balanced braces, and every statement a node default, a node
# declaration, or an edge between declared nodes.

NODE_DEFAULTS = re.compile(r"^node \[[^\]]*\];$")
NODE_DECL = re.compile(r"^(n\d+) \[(?:shape=\w+, )?label=\"(?:[^\"\\]|\\.)*\"\];$")
EDGE = re.compile(r"^(n\d+) -> (n\d+) \[label=\"(?:[^\"\\]|\\.)*\"\];$")


def check_dot(text):
    lines = text.splitlines()
    assert lines[0].startswith("digraph ") and lines[0].endswith("{")
    assert lines[-1] == "}"
    declared = set()
    edges = []
    for line in lines[1:-1]:
        line = line.strip()
        if NODE_DEFAULTS.match(line):
            continue
        decl = NODE_DECL.match(line)
        if decl:
            assert decl.group(1) not in declared, "node declared twice"
            declared.add(decl.group(1))
            continue
        edge = EDGE.match(line)
        assert edge, f"unparseable DOT statement: {line!r}"
        edges.append((edge.group(1), edge.group(2)))
    for src, dst in edges:
        assert src in declared and dst in declared
    return declared, edges


def test_export_dot_single_leaf(tmp_path, capsys):
    inputs = tmp_path / "uniform.csv"
    header = "PSM,CTG,SEM,ASS,GP,ATT,LW,ESM"
    row = "First,Good,Good,Yes,Yes,Good,Yes,First"
    inputs.write_text(header + "\n" + "\n".join([row] * 5) + "\n")
    model = tmp_path / "leaf.json"
    assert main(["train", "--data", str(inputs), "--out", str(model)]) == 0
    capsys.readouterr()
    assert main(["export-dot", "--model", str(model)]) == 0
    declared, edges = check_dot(capsys.readouterr().out)
    assert len(declared) == 1
    assert edges == []


def test_export_dot_fixture_model_parses_and_matches_stats(tmp_path, capsys, model_path):
    assert main(["export-dot", "--model", str(model_path)]) == 0
    declared, edges = check_dot(capsys.readouterr().out)
    stats = tree_stats(load_model(model_path))
    assert len(declared) == stats.nodes
    assert len(edges) == stats.nodes - 1


def test_module_entrypoint_runs_in_a_subprocess(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "gradetree", "gains"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout.splitlines()[1].startswith("PSM")
