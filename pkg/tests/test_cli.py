import csv
import io
import json

import pytest

from divbound.cli import main
from divbound.numfields import fixture_path

GOLDEN = str(fixture_path("golden.json"))


def _run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def _rows(text):
    return list(csv.DictReader(io.StringIO("\n".join(l for l in text.splitlines() if "," in l))))


def test_tables(capsys):
    rc, out, _ = _run(capsys, "tables", "--case", "1", "--y0", "0.1")
    assert rc == 0
    rows = _rows(out)
    assert [(r["n"], r["p1"], r["p2"]) for r in rows[:3]] == [("2", "13", "13"), ("3", "7", "7"), ("4", "4", "4")]


def test_output_is_deterministic(capsys, tmp_path):
    argv = ["search", "--n", "3", "--top", "5", "--format", "json"]
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert first == second
    target = tmp_path / "out.json"
    assert main(argv + ["-o", str(target)]) == 0
    assert target.read_text() == first


def test_search_ranking(capsys):
    rc, out, err = _run(capsys, "search", "--n", "2", "--top", "3")
    assert rc == 0
    first = _rows(out)[0]
    assert (first["disc_K"], first["p1"], first["p2"], first["disc_order"]) == ("117", "7", "7", "449920319121")


def test_bound_theorem_and_naive(capsys):
    rc, out, _ = _run(capsys, "bound", "--case", "1", "--r1", "0", "--r2", "2", "--n", "2", "--y0", "2")
    assert rc == 0
    kinds = [r["kind"] for r in _rows(out)]
    assert kinds[0] == "theorem" and "naive" in kinds
    assert _rows(out)[0]["pair"] == "(7,7)"
    rc, out, _ = _run(capsys, "bound", "--naive", "--d", "8", "--n", "2")
    assert rc == 0 and _rows(out)[0]["kind"] == "naive"


def test_bound_wrong_case_exit_code(capsys):
    rc, _, err = _run(capsys, "bound", "--case", "2", "--r1", "0", "--r2", "2", "--n", "3", "--y0", "0.1")
    assert rc == 2
    assert "belongs to case 1" in err


def test_code_report_and_export(capsys, tmp_path):
    gens = tmp_path / "gens.json"
    rc, out, _ = _run(capsys, "code", "--algebra", GOLDEN, "--radius", "2", "--export", str(gens))
    assert rc == 0
    row = _rows(out)[0]
    assert float(row["vol"]) == pytest.approx(25)
    assert float(row["delta"]) == pytest.approx(5 ** -0.5, rel=1e-9)
    assert len(json.loads(gens.read_text())) == 8


def test_pep_json(capsys):
    rc, out, _ = _run(capsys, "pep", "--algebra", GOLDEN, "--radius", "2", "--rho-grid", "10:20:10",
                      "--format", "json")
    assert rc == 0
    rows = json.loads(out)
    assert [r["rho_db"] for r in rows] == [10.0, 20.0]
    assert all(r["exact"] <= r["high_snr"] <= r["mindet_form"] for r in rows)


@pytest.mark.parametrize("argv", [
    ["code", "--algebra", "/nonexistent.json"],
    ["pep", "--algebra", GOLDEN, "--rho-grid", "garbage"],
    ["search", "--n", "1"],
])
def test_errors_exit_nonzero(capsys, argv):
    try:
        rc = main(argv)
    except SystemExit as exc:  # argparse rejects malformed arguments itself
        rc = exc.code
    assert rc == 2
    assert capsys.readouterr().err


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
