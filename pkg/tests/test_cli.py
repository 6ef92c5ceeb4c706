import csv
import json
import math
import subprocess
import sys

import numpy as np

from radsing import __version__
from radsing.cli import build_parser, main, read_config_file, resolve, run_selftest
from radsing.core import Params, derive_constants


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_solve_exact_N2(tmp_path, capsys):
    code, out, _ = run(["solve", "--N", 2, "--M", 1, "--q", 3, "--seed", "eikonal", "--from", 1e-3, "--to", 10,
                        "--out", tmp_path], capsys)
    assert code == 0
    rows = read_csv(tmp_path / "profile.csv")
    assert max(abs(float(r["dev_eikonal"])) for r in rows) <= 1e-6
    assert json.loads(out)["termination"]["kind"] == "ReachedBound"
    prov = json.loads((tmp_path / "provenance.json").read_text())
    assert prov["config"]["params"] == {"N": 2, "M": 1.0, "q": 3.0}
    assert prov["config"]["options"]["seed"] == "eikonal"


def test_solve_regular_reaches_bound(tmp_path, capsys):
    code, out, _ = run(["solve", "--N", 3, "--q", 1.5, "--seed", "regular:u0=0", "--to", 1e3, "--out", tmp_path],
                       capsys)
    assert code == 0
    assert json.loads(out)["termination"]["kind"] == "ReachedBound"


def test_solve_q2_usage_error(capsys):
    code, out, err = run(["solve", "--q", 2], capsys)
    assert code == 64 and out == ""
    e = json.loads(err)
    assert "2" in e["message"]


def test_solve_blowup_exit_code(tmp_path, capsys):
    # gradient blow-up inward below the float spacing of r: the step underflows
    code, out, _ = run(["solve", "--N", 1, "--q", 3, "--seed", "state:r=1,u=0,du=-2", "--to", 1e-6,
                        "--out", tmp_path], capsys)
    assert code == 3
    assert json.loads(out)["termination"]["kind"] == "StepUnderflow"


def test_bad_seed_and_flags(capsys):
    assert run(["solve", "--seed", "nonsense"], capsys)[0] == 64
    assert run(["solve", "--seed", "state:r=1"], capsys)[0] == 64
    assert run(["solve", "--N", "2.5"], capsys)[0] == 64
    assert run(["construct", "unknown-tag"], capsys)[0] == 64
    assert run(["frobnicate"], capsys)[0] == 64


def test_construct_eikonal(tmp_path, capsys):
    code, out, _ = run(["construct", "eikonal", "--N", 1, "--M", 1, "--q", 3, "--out", tmp_path], capsys)
    assert code == 0
    cl = json.loads(out)["classification"]
    assert cl["regime"] == "EikonalSingular"
    assert abs(cl["constants"]["Mq^q"] / 27 - 1) < 0.05


def test_construct_hj(capsys):
    code, out, _ = run(["construct", "hj", "--N", 3, "--q", 1.75], capsys)
    cl = json.loads(out)["classification"]
    xi_M = derive_constants(Params(3, 1.0, 1.75)).xi_M
    assert code == 0 and cl["regime"] == "HJPower"
    # the fitted limit of r^beta u is -xi_M
    assert abs(cl["constants"]["xi_M"] / xi_M - 1) < 0.05


def test_construct_window_violation(capsys):
    code, _, err = run(["construct", "emden", "--N", 2, "--q", 1.5], capsys)
    assert code == 65
    assert json.loads(err)["error"] == "WindowViolation"


def test_phase_double_root(capsys):
    code, out, _ = run(["phase", "triple-theta", "--N", 10, "--q", 3], capsys)
    assert code == 0
    emden = [e for e in json.loads(out) if e["name"] == "Emden"][0]
    ev = sorted(complex(*x).real for x in emden["eigenvalues"])  # [re, im] pairs
    assert np.allclose(ev, [-4, -4, -1], atol=1e-6)


def test_expand_N2_zero(tmp_path, capsys):
    code, out, _ = run(["expand", "--N", 2, "--q", 3, "--order", 4, "--out", tmp_path], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["order"] == 4 and max(abs(x) for x in d["a"]) < 1e-12
    rows = read_csv(tmp_path / "expansion.csv")
    assert [int(r["k"]) for r in rows] == [1, 2, 3, 4]


def test_expand_radius(capsys):
    code, out, _ = run(["expand", "--N", 3, "--q", 3, "--order", 3, "--radius", 1e-3], capsys)
    ev = json.loads(out)["validation"]["evaluation"]
    assert code == 0 and ev["r"] == 1e-3 and math.isfinite(ev["u"])
    assert run(["expand", "--order", 13], capsys)[0] != 0
    assert run(["expand", "--order", 3, "--radius", 10], capsys)[0] != 0


def test_classify_roundtrip_and_short_profile(tmp_path, capsys):
    assert run(["solve", "--N", 3, "--q", 1.5, "--seed", "regular:u0=0", "--to", 1e3, "--out", tmp_path],
               capsys)[0] == 0
    code, out, _ = run(["classify", tmp_path / "profile.csv", "--N", 3, "--q", 1.5, "--at", "infinity"], capsys)
    assert code == 0 and json.loads(out)["regime"] == "ExteriorEikonal"
    lines = (tmp_path / "profile.csv").read_text().splitlines()
    short = tmp_path / "short.csv"
    short.write_text("\n".join(lines[:4]) + "\n")
    code, _, err = run(["classify", short, "--N", 3, "--q", 1.5], capsys)
    assert code == 66 and json.loads(err)["error"] == "WindowTooShort"
    code, _, _ = run(["classify", tmp_path / "missing.csv"], capsys)
    assert code == 64


def test_determinism(tmp_path, capsys):
    args = ["solve", "--N", 3, "--q", 3, "--seed", "regular:u0=1", "--to", 100]
    run(args + ["--out", tmp_path / "a"], capsys)
    run(args + ["--out", tmp_path / "b"], capsys)
    a, b = (tmp_path / "a" / "profile.csv").read_bytes(), (tmp_path / "b" / "profile.csv").read_bytes()
    assert a == b and b"\r" not in a


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run settings\nN = 2\nq = 3\nseed = eikonal\nfrom = 1e-3\nto = 5\nrel-tol = 1e-11\n")
    assert read_config_file(cfg)["r_from"] == "1e-3"
    rc = resolve(build_parser().parse_args(["solve", "--config", str(cfg), "--to", "2"]))
    assert rc.params.N == 2 and rc.options["to"] == 2.0 and rc.rel_tol == 1e-11
    code, _, _ = run(["solve", "--config", cfg, "--to", 2, "--out", tmp_path], capsys)
    prov = json.loads((tmp_path / "provenance.json").read_text())
    assert code == 0 and prov["config"]["options"]["to"] == 2.0
    assert prov["config"]["abs_tol"] == 1e-12  # defaults are echoed too
    bad = tmp_path / "bad.cfg"
    bad.write_text("N 3\n")
    assert run(["solve", "--config", bad], capsys)[0] == 64


def test_sweep(tmp_path, capsys):
    code, out, _ = run(["sweep", "--Ns", "3", "--qs", "1.5,3", "--tag", "regular", "--workers", 1,
                        "--out", tmp_path], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert [r["regime"] for r in rows] == ["ExteriorEikonal", "ExteriorEmden"]
    assert (tmp_path / "sweep.csv").read_text() == out


def test_sweep_parallel_matches_serial(capsys):
    args = ["sweep", "--Ns", "1,3", "--qs", "1.5,3", "--tag", "regular"]
    serial = run(args + ["--workers", 1], capsys)[1]
    parallel = run(args + ["--workers", 2], capsys)[1]
    assert serial == parallel


def test_sweep_reports_errors_in_rows(capsys):
    code, out, _ = run(["sweep", "--Ns", "2", "--qs", "1.5", "--tag", "emden", "--workers", 1], capsys)
    assert code == 0 and "WindowViolation" in out


def test_selftest(capsys):
    assert run_selftest()["passed"]
    code, out, _ = run(["selftest"], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "radsing", "--version"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip() == __version__
