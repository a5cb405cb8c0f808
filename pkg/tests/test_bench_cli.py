import json

import pytest

from identgb.bench import CSV_COLUMNS, BenchRow, emit_report, parse_csv, run_bench, run_one
from identgb.builtin import HEAVY, LIGHT, tier
from identgb.cli import main


def _row(**kw):
    base = dict(model="seirp", polys=32, vars=31, ordering="diff-degrevlex", time_ms=1234.5, max_pairs=10,
                zero_reductions=21, completed=True)
    base.update(kw)
    return BenchRow(**base)


def test_csv_header_and_round_trip():
    rows = [_row(), _row(ordering="weighted", time_ms=617.25, speedup=2.0)]
    data = emit_report(rows, "csv")
    lines = data.decode().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[0] == "model,polys,vars,ordering,time_ms,max_pairs,zero_reductions,completed,speedup"
    assert emit_report(parse_csv(data), "csv") == data


def test_empty_reports():
    assert emit_report([], "csv") == (",".join(CSV_COLUMNS) + "\n").encode()
    assert json.loads(emit_report([], "json")) == []
    assert run_bench([]) == []


def test_text_and_json_reports():
    rows = [_row(), _row(ordering="weighted", speedup=1.5)]
    text = emit_report(rows, "text").decode()
    assert "speedup" in text.splitlines()[0] and "1.500" in text
    assert json.loads(emit_report(rows, "json"))[1]["speedup"] == 1.5
    with pytest.raises(ValueError):
        emit_report(rows, "xml")


def test_run_bench_chemical():
    rows = run_bench(["chemical"], ["diff-degrevlex", "weighted"], seed=0)
    plain, weighted = rows
    assert (plain.polys, plain.vars) == (weighted.polys, weighted.vars)
    assert plain.completed and weighted.completed
    assert plain.speedup is None
    assert weighted.speedup == pytest.approx(plain.time_ms / weighted.time_ms)
    assert weighted.max_pairs < plain.max_pairs


def test_batch_isolation():
    seen = []
    rows = run_bench(["no-such-model", "intro"], ["diff-degrevlex", "weighted"], on_row=seen.append)
    assert [r.model for r in rows] == ["no-such-model"] * 2 + ["intro"] * 2
    assert rows[0].error and not rows[0].completed
    assert rows[2].completed and rows[3].completed
    assert seen == rows


def test_timed_out_row_has_no_speedup():
    rows = run_bench(["seir2"], ["weighted", "diff-degrevlex"], timeout=0.3, seed=1)
    assert not rows[1].completed or not rows[0].completed
    assert rows[1].speedup is None


def test_jason210_rows():
    row = run_one("jason210", "weighted")
    assert row.completed and row.polys == 3 and row.vars == 8


def test_tiers():
    assert set(LIGHT) == {"chemical", "seir", "seir2", "seirp", "intro", "sian_example", "goodwin"}
    assert all(tier(n) == "heavy" for n in HEAVY)
    assert tier("ex:intro") == "light"


# ------------------------------------------------------------------ CLI


def test_cli_parse(capsys):
    assert main(["parse", "intro", "--output", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["states"] == ["x1", "x2"]


def test_cli_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.model"
    bad.write_text("model b\nstates x\nx' = (\noutput y = x\n")
    assert main(["parse", str(bad)]) == 2
    assert "parse error" in capsys.readouterr().err


def test_cli_unknown_model(capsys):
    assert main(["identify", "nonexistent"]) == 2


def test_cli_weights(capsys):
    assert main(["weights", "chemical"]) == 0
    assert capsys.readouterr().out.strip() == "chemical: x2:2, c:3"
    assert main(["weights", "intro", "--output", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["weights"] == {"x2": 2} and d["levels"]["c"] == 2


def test_cli_generate_and_gb(tmp_path, capsys):
    assert main(["generate", "sian_example", "--prolongation", "3"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("# prime: 11863279\n# variables: ")
    sysfile = tmp_path / "sys.txt"
    sysfile.write_text(text)
    stats = tmp_path / "stats.json"
    assert main(["gb", str(sysfile), "--check", "--stats-json", str(stats)]) == 0
    basis = capsys.readouterr().out.split("\n")
    assert json.loads(stats.read_text())["iterations"] >= 1
    assert main(["gb", str(sysfile), "--engine", "buchberger"]) == 0
    assert capsys.readouterr().out.split("\n") == basis


def test_cli_gb_timeout(tmp_path, capsys):
    assert main(["generate", "seir2", "--seed", "1"]) == 0
    sysfile = tmp_path / "sys.txt"
    sysfile.write_text(capsys.readouterr().out)
    assert main(["gb", str(sysfile), "--timeout", "0.3"]) == 3


def test_cli_identify(capsys):
    assert main(["identify", "sian_example", "--output", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["verdicts"] == {"x": "global", "a": "global", "c": "local"}
    assert main(["identify", "seir2", "--weights", "none", "--timeout", "0.3", "--seed", "1"]) == 3


def test_cli_bench(capsys):
    assert main(["bench", "chemical", "intro"]) == 0
    rows = parse_csv(capsys.readouterr().out.encode())
    assert [(r.model, r.ordering) for r in rows] == [
        ("chemical", "diff-degrevlex"), ("chemical", "weighted"), ("intro", "diff-degrevlex"), ("intro", "weighted"),
    ]
    assert main(["bench", "chemical", "--orderings", "bogus"]) == 2


def test_cli_bad_prime():
    with pytest.raises(SystemExit):
        main(["weights", "intro", "--prime", "100"])


def test_cli_invariant_violation(tmp_path, capsys, monkeypatch):
    from identgb.groebner import GroebnerBasis

    sysfile = tmp_path / "sys.txt"
    sysfile.write_text("# prime: 101\n# variables: x, y\nx + y\nx - y\n")
    monkeypatch.setattr(GroebnerBasis, "satisfies_certificate", lambda self: False)
    assert main(["gb", str(sysfile), "--check"]) == 4
    assert "invariant violation" in capsys.readouterr().err
