import csv
import io
import json
import os
import shutil
import subprocess
import sys

import pytest

from famedkit.cli import EXIT_INPUT, EXIT_OK, EXIT_VERDICT, main
from famedkit.reports import RunReport, render_json
from famedkit.triangulation import preset_file


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out), out


def test_parse_and_matrices(capsys):
    code, out, _ = run(capsys, "parse", "fig8")
    assert code == EXIT_OK and "N = 2" in out
    code, rep, _ = run_json(capsys, "matrices", "fig8")
    assert code == EXIT_OK and rep["outputs"]["detA"] == "1"
    code, rep, _ = run_json(capsys, "famed", "fig8")
    assert rep["outputs"]["BinvA"] == rep["outputs"]["scriptG"]


def test_famed_verdicts(capsys):
    assert run(capsys, "famed", "fig8")[0] == EXIT_OK
    assert run(capsys, "famed", "fig8", "--drop-edge", "0")[0] == EXIT_OK
    code, rep, _ = run_json(capsys, "famed", "fig8", "--convention", "gpp-g")
    assert code == EXIT_VERDICT and rep["outputs"]["famed"] is False


def test_volume_and_slices(capsys):
    code, rep, _ = run_json(capsys, "volume", "fig8")
    assert rep["outputs"]["slices"][0]["volume"] == pytest.approx(2.029883212819307, abs=1e-12)
    code, out, _ = run(capsys, "volume", "fig8", "--slice=-0.3,0.2", "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and [r["converged"] for r in rows] == ["true", "true"]
    assert float(rows[0]["volume"]) < 2.029883212819307
    assert run(capsys, "volume", "fig8", "--slice", "50")[0] == EXIT_VERDICT


def test_qdilog(capsys):
    code, rep, _ = run_json(capsys, "qdilog", "--b", "0.8", "--z", "0.3,0.2")
    assert code == EXIT_OK
    assert rep["outputs"]["residuals"]["unitarity"] < 1e-13


def test_solve_and_sweep(capsys):
    code, rep, _ = run_json(capsys, "solve", "fig8")
    assert code == EXIT_OK and rep["outputs"]["volume"] == pytest.approx(2.029883212819307)
    code, out, _ = run(capsys, "sweep-u", "fig8", "--from", "0", "--to", "0,0.2", "--steps", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 and {"u_re", "u_im", "volume", "residual", "z0_re", "z1_im"} <= set(rows[0])


def test_one_loop_reports_both_conventions(capsys):
    code, rep, _ = run_json(capsys, "one-loop", "fig8")
    assert code == EXIT_OK
    assert rep["outputs"]["tau"]["re"] == pytest.approx(3.0)
    assert set(rep["outputs"]["by_convention"]) == {"gpp-gp", "gpp-g"}


def test_partition_and_jones(capsys):
    code, rep, _ = run_json(capsys, "partition", "fig8", "--b", "1")
    assert code == EXIT_OK and rep["outputs"]["modulus"] == pytest.approx((5 - 5 ** 0.5) / 10, abs=1e-13)
    assert "ratio" in rep["outputs"]
    code, out, _ = run(capsys, "jones", "fig8", "--b", "0.8")
    assert code == EXIT_OK and "0.58261670876" in out


def test_asympt_csv(capsys):
    code, out, _ = run(capsys, "asympt", "fig8", "--sweep", "1,0.8", "--csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "b,modulus,rate_partial,prefactor_partial"


def test_asympt_too_few_points_for_fit(capsys):
    code, rep, _ = run_json(capsys, "asympt", "fig8", "--sweep", "1,0.8")
    assert code == EXIT_OK and "fit" not in rep["outputs"]


def test_aj(capsys, tmp_path):
    assert run(capsys, "aj", "fig8", "--poly", "fig8", "--samples", "6")[0] == EXIT_OK
    unit = tmp_path / "unit.apoly"
    unit.write_text("1 0 0\n")
    code, rep, _ = run_json(capsys, "aj", "fig8", "--poly", str(unit), "--samples", "4")
    assert code == EXIT_VERDICT and rep["outputs"]["max_abs"] == pytest.approx(1.0)


@pytest.mark.parametrize("argv", [
    ("parse", "no-such-preset"),
    ("partition", "fig8", "--b", "0"),
    ("qdilog", "--b", "0.8", "--z", "a,b"),
    ("partition", "fig8", "--b", "0.8", "--alpha", "1,2"),
    ("aj", "fig8", "--poly", "no-such-poly"),
])
def test_bad_input_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(list(argv))
        raise SystemExit(code)
    assert exc.value.code == EXIT_INPUT


def test_broken_file(capsys, tmp_path):
    bad = tmp_path / "broken.tri"
    bad.write_text(preset_file("fig8").read_text().replace("glue 0->1.2", "glue 0->7.2", 1))
    code, _, err = run(capsys, "famed", str(bad))
    assert code == EXIT_INPUT and "line" in err


def test_preset_dir_override(tmp_path):
    shutil.copy(preset_file("fig8"), tmp_path / "mine.tri")
    env = dict(os.environ, FAMEDKIT_PRESET_DIR=str(tmp_path))
    out = subprocess.run([sys.executable, "-m", "famedkit.cli", "famed", "mine"], env=env,
                         capture_output=True, text=True)
    assert out.returncode == EXIT_OK and "famed = true" in out.stdout


def test_json_report_round_trip(capsys):
    _, _, text = run_json(capsys, "one-loop", "fig8")
    rep = RunReport.from_json(text)
    body = json.loads(text)
    assert render_json(body) == text
    assert rep.command == "one-loop" and rep.versions["format"] == 1


def test_accept_only_a1(capsys):
    code, rep, _ = run_json(capsys, "accept", "--only", "A1")
    assert code == EXIT_OK
    assert run(capsys, "accept", "--suite", "lab")[0] == EXIT_INPUT
