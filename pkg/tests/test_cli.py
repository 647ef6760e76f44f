import json

import pytest

from cfw import fixtures
from cfw.cli import SpecError, parse_spec, run


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def literal(tmp_path, letters, **extra):
    return write(tmp_path, "spec.json", dict(schema_version=1, type="literal", letters=letters, **extra))


def report_of(capsys, argv, code=0):
    assert run(argv) == code
    return json.loads(capsys.readouterr().out)


def test_gen_literal_lines(tmp_path, capsys):
    assert run(["gen", "--spec", literal(tmp_path, [1, 2, 3]), "--n", "3", "--format", "lines"]) == 0
    assert capsys.readouterr().out.split() == ["1", "2", "3"]


def test_gen_quasiperiodic(tmp_path, capsys):
    spec = write(tmp_path, "q.json", {"schema_version": 1, "type": "quasiperiodic", "head": [],
                                      "blocks": [{"block": [1, 2], "repeat": 3}]})
    rep = report_of(capsys, ["gen", "--spec", spec, "--n", "6"])
    assert rep["prefix"] == [1, 2, 1, 2, 1, 2]


def test_gen_thue_morse_digit_sum(capsys):
    rep = report_of(capsys, ["gen", "--spec", str(fixtures.path("thue_morse")), "--n", "4"])
    assert rep["prefix"] == [1 + bin(i).count("1") % 2 for i in range(1, 5)]


@pytest.mark.parametrize("doc, path", [
    ({"type": "literal", "letters": [1]}, "schema_version"),
    ({"schema_version": 2, "type": "literal", "letters": [1]}, "schema_version"),
    ({"schema_version": 1, "type": "sturmian"}, "type"),
    ({"schema_version": 1, "type": "literal", "letters": [1, 0]}, "letters[1]"),
    ({"schema_version": 1, "type": "eventually_periodic", "period": []}, "period"),
    ({"schema_version": 1, "type": "quasiperiodic", "blocks": [{"block": [1], "repeat": 0}]},
     "blocks[0].repeat"),
    ({"schema_version": 1, "type": "automatic",
      "automaton": {"base": 2, "initial": "a", "transitions": {"a": ["a"]}, "outputs": {"a": 1}}},
     "automaton.transitions.a"),
    ({"schema_version": 1, "type": "automatic",
      "automaton": {"base": 2, "initial": "a", "transitions": {"a": ["a", "b"]}, "outputs": {"a": 1}}},
     "automaton.transitions.a[1]"),
    ({"schema_version": 1, "type": "literal", "letters": [1], "witnesses": [{"kind": "repeat"}]},
     "witnesses[0].U"),
])
def test_spec_errors_report_field_path(doc, path):
    with pytest.raises(SpecError) as exc:
        parse_spec(doc)
    assert exc.value.path == path


def test_invalid_spec_exit_code(tmp_path, capsys):
    assert run(["gen", "--spec", literal(tmp_path, [1, -2]), "--n", "1"]) == 1
    assert "letters[1]" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["gen", "--spec", str(bad), "--n", "1"]) == 1


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["detect", "--kind", "both", "--spec", "x"])
    assert exc.value.code == 1


def test_complexity_command(tmp_path, capsys):
    rep = report_of(capsys, ["complexity", "--spec", literal(tmp_path, [1, 2] * 32),
                             "--n", "64", "--max-n", "8"])
    rows = rep["complexity"]["rows"]
    assert [r["p"] for r in rows] == [2] * 8
    assert rows[2]["p_over_n"] == "2/3"
    rep = report_of(capsys, ["complexity", "--spec", literal(tmp_path, [3, 1, 4, 1, 5]), "--n", "5"])
    assert rep["complexity"]["rows"][-1]["p"] == 1
    assert run(["complexity", "--spec", literal(tmp_path, [1, 2]), "--n", "2", "--max-n", "3"]) == 2


def test_complexity_fibonacci(capsys):
    rep = report_of(capsys, ["complexity", "--spec", str(fixtures.path("fibonacci")),
                             "--n", "610", "--max-n", "16"])
    assert [r["p"] for r in rep["complexity"]["rows"]] == list(range(2, 18))


def test_detect_thue_morse(capsys):
    rep = report_of(capsys, ["detect", "--spec", str(fixtures.path("thue_morse")),
                             "--max-len", "1024", "--ratio-cap", "8"])
    assert rep["chain"]["witness_count"] >= 5
    assert rep["chain"]["ratio_cap"] == "8/1"


def test_detect_empty_chain_is_success(tmp_path, capsys):
    rep = report_of(capsys, ["detect", "--spec", literal(tmp_path, list(range(1, 40)))])
    assert rep["chain"]["witness_count"] == 0


def test_detect_periodic_advisory(capsys):
    rep = report_of(capsys, ["detect", "--spec", str(fixtures.path("periodic")), "--max-len", "64"])
    adv = rep["chain"]["periodicity_advisory"]
    assert (adv["preperiod"], adv["period"]) == (2, 3)


def test_verify_fixture_witness(capsys):
    rep = report_of(capsys, ["verify", "--spec", str(fixtures.path("thue_morse")),
                             "--witness", str(fixtures.path("thue_morse_witness"))])
    assert all(b["status"] == "pass" for r in rep["verification"]["records"] for b in r["bounds"])


def test_verify_spec_witnesses_and_select(capsys):
    rep = report_of(capsys, ["verify", "--spec", str(fixtures.path("palindromic")),
                             "--select", "1", "--select", "3"])
    recs = rep["verification"]["records"]
    assert [r["chain_index"] for r in recs] == [0, 1]
    assert rep["parameters"]["select"] == [1, 3]


def test_verify_corrupted_witness(tmp_path, capsys):
    wit = write(tmp_path, "w.json", {"kind": "repeat", "W": [2, 2, 1], "U": [2, 1, 1, 1]})
    assert run(["verify", "--spec", str(fixtures.path("thue_morse")), "--witness", wit]) == 2


def test_verify_indeterminate_exit(tmp_path, capsys):
    spec = literal(tmp_path, [1, 1, 2, 2, 1, 1, 2, 2, 1, 1],
                   witnesses=[{"kind": "mirror", "W": [], "U": [1, 1, 2], "V": [2, 1, 1, 2]}])
    assert run(["verify", "--spec", spec, "--guard-depth", "0"]) == 3
    rep = json.loads(capsys.readouterr().out)
    assert rep["verification"]["summary"]["indeterminate"] == 1


def test_cap_error_is_clean(monkeypatch, capsys):
    monkeypatch.setenv("CFW_MAX_BIGINT_BITS", "32")
    code = run(["verify", "--spec", str(fixtures.path("thue_morse")), "--max-len", "256"])
    assert code == 1
    assert "CFW_MAX_BIGINT_BITS" in capsys.readouterr().err


def test_gen_round_trip(tmp_path, capsys):
    src = str(fixtures.path("period_doubling"))
    letters = report_of(capsys, ["gen", "--spec", src, "--n", "300"])["prefix"]
    lit = literal(tmp_path, letters)
    args = ["detect", "--max-len", "300", "--ratio-cap", "4"]
    a = report_of(capsys, args + ["--spec", src])
    b = report_of(capsys, args + ["--spec", lit])
    assert a["chain"] == b["chain"]


def test_all_is_deterministic(tmp_path):
    spec = str(fixtures.path("quasiperiodic"))
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert run(["all", "--spec", spec, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["version"] and "timestamp" not in outs[0].decode()
    assert rep["verification"]["summary"]["fail"] == 0
