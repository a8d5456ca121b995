import json
import os
import subprocess
import sys

import pytest

from exciton_decoherence.cli import main

FAST_FIG2 = "[system]\ngamma = 20\nm_coupling = 20\ndelta = 0.5\n[grid]\nj = 1001\nw_mult = 30\n[run]\nvalidate_t_end = 1\n"


def write(tmp_path, text, name="s.ini"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_fig1_and_fig2(tmp_path, capsys):
    assert main(["fig1", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig1.csv").exists() and (tmp_path / "fig1.gp").exists()
    for v in "abc":
        assert main(["fig2", v, "--out", str(tmp_path)]) == 0
        assert (tmp_path / f"fig2{v}.csv").exists()


def test_sweep_and_coeffs(tmp_path):
    assert main(["sweep", "--axis", "dphi", "--values", "0,1.5707963267948966,3.141592653589793",
                 "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep_dphi.csv").read_text().splitlines()
    assert lines[0].startswith("dphi,tau_d_fs,tau_d_defined") and lines[1].split(",")[1] == "inf"
    assert main(["coeffs", "--out", str(tmp_path)]) == 0


def test_usage_and_config_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["sweep", "--axis", "omega0", "--values", "1"])
    assert e.value.code == 2
    assert main(["fig1", "--config", write(tmp_path, "[system]\ngamma = -1\n")]) == 2
    assert "gamma" in capsys.readouterr().err
    assert main(["fig1", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["fig1", "--grid-j", "100", "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--axis", "xi", "--values", "1,x", "--out", str(tmp_path)]) == 2


def test_validate_exit_codes(tmp_path, capsys):
    out = tmp_path / "ok"
    assert main(["validate", "--config", write(tmp_path, FAST_FIG2), "--out", str(out)]) == 0
    rows = [json.loads(l) for l in (out / "validation.jsonl").read_text().splitlines()]
    assert [r["name"] for r in rows] == ["volterra", "grid_coefficients", "grid_mode_equations",
                                        "decoherence_factor", "sum_rule"]
    assert all(r["passed"] for r in rows)
    assert (out / "validate.csv").exists() and (out / "validate.gp").exists()

    bad = tmp_path / "bad"
    code = main(["validate", "--config", write(tmp_path, FAST_FIG2 + "[tolerances]\nvolterra = 0\n", "b.ini"),
                 "--out", str(bad)])
    assert code == 1
    err = capsys.readouterr().err
    assert "failing:" in err and "u" in err
    rows = [json.loads(l) for l in (bad / "validation.jsonl").read_text().splitlines()]
    assert not rows[0]["passed"]


def test_validate_overrides(tmp_path, capsys):
    cfg = write(tmp_path, FAST_FIG2)
    assert main(["validate", "--config", cfg, "--grid-j", "501", "--grid-w-mult", "20",
                 "--dt-rule", "0.005", "--out", str(tmp_path / "o")]) in (0, 1)
    meta = json.loads((tmp_path / "o" / "validation.jsonl").read_text().splitlines()[1])["metadata"]
    assert meta["j_count"] == 501 and meta["window_meV"] == pytest.approx(400.0)


def test_module_entry_point(tmp_path):
    env = dict(os.environ)
    r = subprocess.run([sys.executable, "-m", "exciton_decoherence", "fig2", "a", "--out", str(tmp_path)],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "fig2a.csv").exists()


def test_csv_byte_identical_across_processes(tmp_path):
    for d in ("r1", "r2"):
        subprocess.run([sys.executable, "-m", "exciton_decoherence", "fig1", "--out", str(tmp_path / d)], check=True)
    assert (tmp_path / "r1" / "fig1.csv").read_bytes() == (tmp_path / "r2" / "fig1.csv").read_bytes()
