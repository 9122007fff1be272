import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from hbsa.cli import main
from hbsa.metrics import SweepRow

GOLDEN = Path(__file__).resolve().parent / "golden" / "classification_table.txt"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_table_text_matches_golden(capsys):
    code, out, err = run(capsys, "verify-table", "--ideal", "--format", "text-table")
    assert code == 0
    assert out == GOLDEN.read_text()
    assert "64/64 verified, 0 ambiguities" in err


def test_verify_table_json(capsys):
    code, out, _ = run(capsys, "verify-table", "--g", "0.5", "--gamma", "0.1")
    body = json.loads(out)
    assert code == 0
    assert body["status"] == "verified"
    assert body["success_probability"] == pytest.approx((10 / 11) ** 12, abs=1e-12)
    assert len(body["rows"]) == 64


def test_verify_table_skips_degenerate_point(capsys):
    code, out, err = run(capsys, "verify-table", "--g", "0")
    assert code == 0
    assert json.loads(out)["status"] == "skipped"
    assert "skipped" in err


def test_analyze_closing_example(capsys):
    code, out, _ = run(capsys, "analyze", "--state", "phiS-,psiP+,phiT-", "--ideal")
    body = json.loads(out)
    assert code == 0
    assert body["spins"] == "-++"
    assert body["classified"] == "phiS-,psiP+,phiT-"
    assert "a11R:b22R" in body["outcomes"]
    assert all(v == pytest.approx(1 / 8) for v in body["outcomes"].values())


def test_analyze_text_and_csv(capsys):
    code, out, _ = run(capsys, "analyze", "--state", "psiS+,phiP-,psiT+", "--g", "0.8", "--format", "text-table")
    assert code == 0 and "classified           psiS+,phiP-,psiT+" in out
    code, out, _ = run(capsys, "analyze", "--state", "psiS+,phiP-,psiT+", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["signature", "spins", "probability"] and len(rows) == 9


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--state", "bogus"],
        ["analyze", "--ideal", "--g", "2"],
        ["analyze", "--p", "1.5"],
        ["sample", "--shots", "0"],
        ["sweep", "--axis", "g"],
        ["sweep", "--axis", "g", "--range", "1:0:0.1"],
        ["sweep", "--axis", "p", "--range", "0.5,1.5"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--axis", "omega", "--range", "0:1:1"])
    assert exc.value.code == 2


def test_sweep_csv_columns_and_stability(capsys, tmp_path):
    argv = ["sweep", "--gamma", "0.1", "--axis", "g", "--range", "0.5:1:0.5", "--axis", "p", "--range", "0.5,1", "--format", "csv"]
    code, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert code == 0 and first == second
    rows = list(csv.reader(io.StringIO(first)))
    assert rows[0] == list(SweepRow.COLUMNS)
    assert len(rows) == 5
    assert rows[-1][4] == f"{(40 / 41) ** 12:#.12g}"


def test_sample_counts_file_is_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "sample", "--ideal", "--shots", "1000", "--seed", "9", "--output", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    body = json.loads(a.read_text())
    assert body["metadata"]["rng"] == "numpy.PCG64/multinomial"
    assert sum(body["counts"].values()) == 1000


def test_config_file_and_env_precedence(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"g": 0.5, "gamma": 0.1, "format": "json"}))
    _, out, _ = run(capsys, "analyze", "--config", str(cfg))
    assert json.loads(out)["params"]["g"] == 0.5
    _, out, _ = run(capsys, "analyze", "--config", str(cfg), "--g", "2")
    assert json.loads(out)["params"]["g"] == 2.0
    monkeypatch.setenv("HBSA_CONFIG", str(cfg))
    _, out, _ = run(capsys, "analyze")
    assert json.loads(out)["params"]["gamma"] == 0.1
    # --ideal clears physical values taken from the file.
    _, out, _ = run(capsys, "analyze", "--ideal")
    assert json.loads(out)["params"]["g"] == 1.0


def test_config_rejects_unknown_keys(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"coupling": 1}))
    code, _, err = run(capsys, "analyze", "--config", str(cfg))
    assert code == 2 and "coupling" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hbsa", "verify-table", "--ideal", "--format", "text-table"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == GOLDEN.read_text()
