import csv
import io
import subprocess
import sys

import pytest

from zeroerr import __version__
from zeroerr.channel import loads, sample_erasure_identity
from zeroerr.cli import main
from zeroerr.codegen import PackedCode


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_sample_writes_seeded_channel(capsys):
    code, out, _ = run(capsys, "sample", "--q", "3", "--eps", "0.25", "--seed", "7")
    assert code == 0
    W = loads(out)
    assert W.q_size == 8 and W == sample_erasure_identity(8, 0.25, 7)


def test_sample_zero_eps_and_bad_eps(capsys):
    _, out, _ = run(capsys, "sample", "--q", "2", "--eps", "0", "--seed", "1")
    assert "ERASE" not in out
    code, _, err = run(capsys, "sample", "--eps", "1.5")
    assert code == 2 and "eps" in err


def test_headers_carry_version_and_config(capsys):
    _, out, _ = run(capsys, "bpis-sweep", "--q", "2", "--eps", "0.3", "--trials", "2")
    head = [ln for ln in out.splitlines() if ln.startswith("#")]
    assert head[0] == f"# zeroerr {__version__} bpis-sweep"
    assert "# eps=0.3" in head and "# trials=2" in head and "# seed=0" in head


def test_bpis_sweep_rows_and_summary(capsys):
    _, out, _ = run(capsys, "bpis-sweep", "--q", "2", "--eps", "0.3", "--trials", "4",
                    "--seed", "5")
    rows = rows_of(out)
    assert [r["seed"] for r in rows] == ["5", "6", "7", "8"]
    assert "# summary trials=4" in out


def test_bpis_sweep_vacuous_row(capsys):
    _, out, _ = run(capsys, "bpis-sweep", "--q", "2", "--eps", "1", "--trials", "1")
    (row,) = rows_of(out)
    assert row["bpis_size"] == "0" and row["log_rate"] == "-inf" and row["satisfied"] == "true"


def test_bpis_sweep_is_byte_identical(tmp_path, capsys):
    path = tmp_path / "a.csv"
    outputs = []
    for _ in range(2):
        run(capsys, "bpis-sweep", "--q", "3", "--eps", "0.25", "--trials", "5", "--out", str(path))
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_exact_campaign(capsys):
    code, out, _ = run(capsys, "exact", "--n", "1")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 16
    assert all(r["consistent"] == "true" for r in rows)
    assert (rows[0]["exact_sum_rate"], rows[0]["max_bpis"]) == ("2", "4")
    assert (rows[15]["exact_sum_rate"], rows[15]["max_bpis"]) == ("0", "0")


def test_exact_budget(capsys):
    code, _, err = run(capsys, "exact", "--n", "5")
    assert code == 4 and "budget" in err


def test_bpis_command_uses_product_law(capsys):
    _, out, _ = run(capsys, "bpis", "--q", "2", "--eps", "0.3", "--seed", "1", "--n", "3")
    (row,) = rows_of(out)
    assert int(row["bpis_size_n"]) == int(row["bpis_size"]) ** 3


def test_blocklength_sweep(capsys):
    _, out, _ = run(capsys, "blocklength-sweep", "--q-max", "3", "--n", "2", "--gammas", "0.5", "1")
    rows = rows_of(out)
    assert len(rows) == 6
    for r in rows:
        assert float(r["upper_bound"]) == int(r["q"]) * (1 + float(r["gamma"]))


def test_uniform_construct(tmp_path, capsys):
    fam = tmp_path / "fam.txt"
    _, out, _ = run(capsys, "uniform-construct", "--q", "1", "--n", "8", "--gamma", "1",
                    "--families", str(fam))
    (row,) = rows_of(out)
    assert row["verdict"] == "proved" and (row["size_a"], row["size_b"]) == ("74", "36")
    assert fam.read_text().count("FAMILY") == 2


def test_pipeline_and_verify(tmp_path, capsys):
    csv_path, code_path = tmp_path / "p.csv", tmp_path / "code.txt"
    code, _, _ = run(capsys, "pipeline", "--trials", "1", "--seed", "2", "--out", str(csv_path),
                     "--code-out", str(code_path))
    assert code == 0
    (row,) = rows_of(csv_path.read_text())
    assert row["verdict"] == "ok" and row["threshold"] == "13"
    assert PackedCode.loads(code_path.read_text()).n == 64
    chan = tmp_path / "w.txt"
    run(capsys, "sample", "--q", "2", "--eps", "0", "--out", str(chan))
    code, out, _ = run(capsys, "verify", "--channel", str(chan), "--code", str(code_path))
    assert code == 0 and out.strip() == "ok"


def test_pipeline_without_erasures(capsys):
    code, out, _ = run(capsys, "pipeline", "--eps", "0", "--slack", "0.001", "--trials", "2")
    rows = rows_of(out)
    assert code == 0 and all(r["verdict"] == "ok" and r["threshold"] == "0" for r in rows)


def test_pipeline_zero_radius_override_reports_collision(capsys):
    code, out, err = run(capsys, "pipeline", "--eps", "0.3", "--raw-d", "0", "--trials", "1",
                         "--seed", "0")
    (row,) = rows_of(out)
    assert code == 3 and row["verdict"] == "collision" and row["witness"].startswith("t")
    assert "collision" in err


def test_verify_reports_witness(tmp_path, capsys):
    code_path, chan = tmp_path / "c.txt", tmp_path / "w.txt"
    run(capsys, "pipeline", "--raw-d", "0", "--trials", "1", "--code-out", str(code_path),
        "--out", str(tmp_path / "x.csv"))
    run(capsys, "sample", "--q", "2", "--eps", "1", "--out", str(chan))
    code, out, _ = run(capsys, "verify", "--channel", str(chan), "--code", str(code_path))
    assert code == 3 and out.startswith("collision terminal=")


def test_bounds_eval(capsys):
    code, out, _ = run(capsys, "bounds", "eval", "blocklength-upper", "--params", "q=20", "n=4",
                       "gamma=0.5")
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert float(row["value"]) == 45 and row["hypotheses_ok"] == "true"
    code, _, err = run(capsys, "bounds", "eval", "blocklength-upper", "--params", "q=1", "n=3",
                       "gamma=1")
    assert code == 2 and "q >= log n" in err
    code, _, _ = run(capsys, "bounds", "eval", "entropy", "--params", "p")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zeroerr", "--version"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
