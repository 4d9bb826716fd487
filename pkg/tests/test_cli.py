"""CLI behaviour: commands, exit codes, determinism, heuristic labeling."""

import json

from click.testing import CliRunner

from syzygies.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_betti_twisted_cubic_agreement():
    res = run("betti", "--fixture", "veronese", "--n", "1", "--d", "3",
              "--format", "json")
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    cells = {(c["i"], c["j"]): c["k"] for c in doc["koszul"]["entries"]}
    assert cells[(1, 1)] == 3 and cells[(2, 1)] == 2
    assert doc["agreement"] is True
    assert "heuristic" not in doc


def test_betti_zero_generator_ideal():
    res = run("betti", "--fixture", "veronese", "--n", "1", "--d", "1",
              "--format", "json")
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["koszul"]["entries"] == [{"i": 0, "j": 0, "k": 1}]


def test_betti_deterministic_output():
    args = ("betti", "--fixture", "scroll", "--twists", "1,2",
            "--format", "json")
    assert run(*args).output == run(*args).output


def test_betti_heuristic_marker_in_prime_field_mode():
    res = run("betti", "--fixture", "veronese", "--n", "1", "--d", "2",
              "--field", "F32003", "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.output)["heuristic"] is True


def test_betti_projection_without_seed_is_config_error():
    res = run("betti", "--fixture", "veronese", "--t", "1")
    assert res.exit_code == 4


def test_betti_from_config_file(tmp_path):
    cfg = tmp_path / "fixture.cfg"
    cfg.write_text("kind = hyperelliptic\nm = 3\nsextic = x^6 - 1\n")
    res = run("betti", "--config", str(cfg), "--imax", "2", "--jmax", "2",
              "--format", "json")
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["fixture"] == "hyperelliptic(m=3)"


def test_table2_single_row():
    res = run("table2", "--t-values", "0", "--format", "tsv")
    assert res.exit_code == 0, res.output
    lines = res.output.strip().splitlines()
    assert lines[0].startswith("t\t")
    row = lines[1].split("\t")
    assert row[0] == "0" and row[2] == "1" and row[3] == "2"


def test_table2_bad_range_is_config_error():
    res = run("table2", "--t-values", "9")
    assert res.exit_code == 4


def test_audit_example1():
    res = run("audit", "--suite", "example1", "--format", "json")
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert doc["violations"] == 0
    names = [c["name"] for r in doc["reports"] for c in r["claims"]]
    assert "exactly_4_regular" in names


def test_audit_deterministic():
    a = run("audit", "--suite", "green-g2", "--format", "json").output
    b = run("audit", "--suite", "green-g2", "--format", "json").output
    assert a == b
