from __future__ import annotations

import csv
import io
import json

import pytest

from tlj.cli import main


def test_eval(capsys):
    assert main(["eval", "atr(jw(2))"]) == 0
    assert capsys.readouterr().out.strip() == "t^2 - 1"
    assert main(["eval", "tr(jw(2))", "--delta", "2.5"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(5.25)


def test_eval_errors(capsys):
    assert main(["eval", "id_2 + id_3"]) == 2
    assert "at 0:11" in capsys.readouterr().err
    assert main(["eval", "jw(9)"]) == 3
    assert main(["eval", "tr(jw(2))", "--delta", "1.9"]) == 2


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["cpai", "--delta", "2.5"])
    assert info.value.code == 2


def test_cpai_csv(capsys):
    assert main(["cpai", "--delta", "3", "--t", "2", "--n-max", "6"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert list(rows[0]) == ["n", "delta", "t", "c_formula", "c_diagram", "abs_gap"]
    assert len(rows) == 7
    assert float(rows[1]["c_formula"]) == pytest.approx(0.375)
    assert float(rows[4]["abs_gap"]) <= 1e-12
    assert rows[5]["c_diagram"] == ""


def test_cpai_json(tmp_path):
    out = tmp_path / "c.json"
    assert main(["cpai", "--delta", "2.5", "--t", "2.4", "--n-max", "60", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["schema"] == 1
    assert data["rows"][60]["c_formula"] < 1e-2
    assert main(["cpai", "--delta", "2.5", "--t", "2.6", "--n-max", "3"]) == 2


def test_gram(capsys, tmp_path):
    assert main(["gram", "--n", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["n"] == 1 and len(data["entries"]) == 2
    assert main(["gram", "--n", "2", "--t", "1.5", "--out", str(tmp_path / "g.json")]) == 0
    numeric = json.loads((tmp_path / "g.json").read_text())
    assert numeric["min_eig"] > 0 and len(numeric["entries"]) == 6
    assert main(["gram", "--n", "3", "--check-psd"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "n,t,delta,min_eig,max_eig" and len(lines) == 21
    assert main(["gram", "--n", "5"]) == 3
    assert main(["gram", "--n", "5", "--check-psd", "--t", "1"]) == 3


def test_jw(capsys):
    assert main(["jw", "--m", "3", "--verify"]) == 0
    out = capsys.readouterr().out
    assert "p_3: 5 terms" in out and "idempotent True" in out
    assert main(["jw", "--m", "2", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["size"] == 2
    assert main(["jw", "--m", "12"]) == 3


def test_certificate_rejects_small_delta(tmp_path):
    assert main(["certificate", "--delta", "1.9", "--out", str(tmp_path / "c.json")]) == 2
    assert main(["certificate", "--delta", "2.5", "--t-grid", "1:2", "--out", str(tmp_path / "c.json")]) == 2


def test_certificate_to_stdout_is_clean_json(monkeypatch, capsys):
    from tlj import report

    full = report.certificate
    monkeypatch.setattr(report, "certificate", lambda params, progress=None: full(params, progress, only=["c_t(0)"]))
    assert main(["certificate", "--delta", "2.5", "--seed", "3", "--out", "-"]) == 0
    captured = capsys.readouterr()
    data = json.loads(captured.out)
    assert data["seed"] == 3 and data["passed"]
    assert "seed 3" in captured.err and "PASS c_t(0)" in captured.err
