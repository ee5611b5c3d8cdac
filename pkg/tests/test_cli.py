import math

import numpy as np
import pytest

from catent import cli
from catent.sweep import read_csv


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pure_ent_rows(capsys):
    code, out, _ = run(capsys, "pure-ent", "--alpha", "1", "--phi", "pi,0")
    assert code == 0
    res = read_csv(out)
    assert res.header == ["phi", "entanglement"]
    assert res.rows[0][1] == pytest.approx(0.990800, abs=5e-7)
    assert res.rows[1][1] == 0.0
    assert res.metadata["command"] == "pure-ent"


def test_pure_ent_vacuum_is_zero(capsys):
    code, out, _ = run(capsys, "pure-ent", "--alpha", "0", "--phi-points", "5")
    assert code == 0
    assert all(r[1] == 0.0 for r in read_csv(out).rows)


def test_fig2_ordering(capsys):
    code, out, _ = run(capsys, "fig2", "--V", "2,5,10", "--d", "1", "--phi", "pi/2")
    assert code == 0
    res = read_csv(out)
    assert res.header == ["phi", "E_V2", "E_V5", "E_V10"]
    e2, e5, e10 = res.rows[0][1:]
    assert e2 < e5 < e10
    assert e10 - e2 > 0.05


def test_entpower_starts_unentangled(capsys):
    code, out, _ = run(capsys, "entpower", "--V", "2", "--d", "1", "--tau-max", "1", "--tau-step", "0.5")
    assert code == 0
    res = read_csv(out)
    assert res.column("tau") == [0.0, 0.5, 1.0]
    assert res.rows[0][1:] == [0.0, 0.0, 1.0]
    assert "fock_cutoff" in res.metadata


def test_simon_targets(capsys, tmp_path):
    # Gaussian test is blind to the cat correlations
    code, out, _ = run(capsys, "simon", "--target", "cat", "--alpha", "1")
    assert code == 0 and "verdict = no-violation" in out
    r = 0.8
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    m = np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])
    path = tmp_path / "tmsv.txt"
    np.savetxt(path, m)
    code, out, _ = run(capsys, "simon", "--target", "file", "--input", str(path))
    assert code == 0 and "verdict = entangled-detected" in out
    np.savetxt(path, np.eye(4))
    code, out, _ = run(capsys, "simon", "--target", "file", "--input", str(path))
    assert code == 0 and "verdict = no-violation" in out


def test_simon_bad_file(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 2\n3 4\n")
    code, _, err = run(capsys, "simon", "--target", "file", "--input", str(path))
    assert code == 2 and "4x4" in err


def test_single_point_sweep_matches_direct(capsys, tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("command = entpower\nscheme = symmetric\nV = 2\nd = 1\nphi = pi\n"
                   "tau_max = 2\ntau_step = 0.5\n")
    code, sweep_out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == 0
    code, direct_out, _ = run(capsys, "entpower", "--V", "2", "--d", "1", "--tau-max", "2",
                              "--tau-step", "0.5")
    sweep, direct = read_csv(sweep_out), read_csv(direct_out)
    assert [r[4:] for r in sweep.rows] == direct.rows


def test_sweep_order_and_threads(capsys, tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("# two by two\ncommand = pure-ent\nalpha = 1, 0.5\nphi = pi, pi/2\n")
    outs = []
    for t in ("1", "4", "4"):
        code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--threads", t)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]
    rows = read_csv(outs[0]).rows
    assert [(r[0], round(r[1], 6)) for r in rows] == [(1.0, 3.141593), (1.0, 1.570796),
                                                       (0.5, 3.141593), (0.5, 1.570796)]


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("alpha = 0.5\nphi = pi\n")
    _, out, _ = run(capsys, "pure-ent", "--config", str(cfg), "--alpha", "1")
    assert read_csv(out).rows[0][1] == pytest.approx(0.990800, abs=5e-7)


@pytest.mark.parametrize("text, fragment", [
    ("alpha 1\n", ":1: expected"),
    ("phi = pi\nbogus = 3\n", ":2: field 'bogus'"),
    ("alpha = \n", "field 'alpha': empty value"),
    ("alpha = 1\nalpha = 2\n", "duplicate"),
])
def test_config_diagnostics(capsys, tmp_path, text, fragment):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(text)
    code, _, err = run(capsys, "pure-ent", "--config", str(cfg))
    assert code == 2
    assert fragment in err


def test_sweep_missing_parameter(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("command = mixed-ent\nV = 2\nphi = pi\n")
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 2 and "d" in err


def test_exit_codes(capsys):
    assert run(capsys, "entpower", "--V", "0.5")[0] == 2
    assert run(capsys, "entpower", "--tau-step", "0")[0] == 2
    # too large for the exact path
    assert run(capsys, "entpower", "--V", "1e7", "--d", "0", "--tau-max", "0.1")[0] == 3


def test_out_file_and_timing(capsys, tmp_path):
    path = tmp_path / "o.csv"
    assert run(capsys, "pure-ent", "--phi", "1", "--out", str(path))[0] == 0
    text = path.read_bytes()
    assert b"\r" not in text and b"wall_time_s" not in text
    run(capsys, "pure-ent", "--phi", "1", "--out", str(path), "--timing")
    assert b"wall_time_s" in path.read_bytes()


def test_csv_round_trip(capsys):
    _, out, _ = run(capsys, "pure-ent", "--alpha", "0.3", "--phi-points", "7")
    res = read_csv(out)
    assert res.to_csv() == out
