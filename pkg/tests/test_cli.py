import math

import numpy as np
import pytest

from lindosc.cli import main
from lindosc.gaussian_class import (
    GaussianState,
    husimi_value,
    limit_cycle_state,
    materialize,
)
from lindosc.lindblad_engine import DriveFn, LindbladParams
from lindosc.validation import CheckResult


def write_ini(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


BASIC = """
[params]
omega = 1.1
mu = 0.6
nu = 0.4
f0 = 0.4
Omega = 1.2

[initial]
kind = coherent
alpha0 = 0.5+0.2j

[grid]
t_max = 2.0
n_times = 5

[integrator]
dim = 48
"""


def read_rows(path):
    header, rows = [], []
    for line in path.read_text().splitlines():
        (header if line.startswith("#") else rows).append(line)
    return header, rows


def test_evolve_writes_trajectory(tmp_path):
    cfg = write_ini(tmp_path, BASIC)
    out = tmp_path / "out"
    assert main(["evolve", "--config", cfg, "--out", str(out),
                 "--quiet"]) == 0
    header, rows = read_rows(out / "trajectory.tsv")
    assert header[0].startswith("# lindosc ")
    assert header[1] == "# command: evolve"
    mu_line = next(h for h in header if h.startswith("# params.mu"))
    assert float(mu_line.split("=")[1]) == 0.6
    cols = next(h for h in header if h.startswith("# columns:")).split()[2:]
    assert cols[:4] == ["t", "re_a", "im_a", "n"]
    assert "re_a_ref" in cols and "S_ref" in cols
    assert len(rows) == 5
    first = dict(zip(cols, (float(v) for v in rows[0].split("\t"))))
    assert first["t"] == 0.0
    assert first["re_a"] == pytest.approx(0.5, abs=1e-12)
    assert first["im_a"] == pytest.approx(0.2, abs=1e-12)
    checks = [h for h in header if h.startswith("# check:")]
    assert len(checks) == 5
    assert all(h.endswith("-> OK") for h in checks)


def test_evolve_deterministic_bytes(tmp_path):
    cfg = write_ini(tmp_path, BASIC)
    assert main(["evolve", "--config", cfg, "--out",
                 str(tmp_path / "a"), "--quiet"]) == 0
    assert main(["evolve", "--config", cfg, "--out",
                 str(tmp_path / "b"), "--quiet"]) == 0
    a = (tmp_path / "a" / "trajectory.tsv").read_bytes()
    b = (tmp_path / "b" / "trajectory.tsv").read_bytes()
    assert a == b


def test_dim_override(tmp_path):
    cfg = write_ini(tmp_path, BASIC)
    out = tmp_path / "out"
    assert main(["evolve", "--config", cfg, "--out", str(out), "--quiet",
                 "--dim", "56"]) == 0
    header, _ = read_rows(out / "trajectory.tsv")
    assert "# integrator.dim = 56" in header


@pytest.mark.parametrize("body,needle", [
    ("[params]\nfoo = 1\n", "unknown key"),
    ("[params]\nmu = 0.4\nnu = 0.6\n", "mu > nu"),
    ("[params]\nomega = abc\n", "omega"),
    ("[initial]\nkind = thermal\n", "nbar0"),
    ("[initial]\nkind = gaussian\nu0 = 1.5\nalpha0 = 0\n", "u0"),
    ("[bogus]\nx = 1\n", "unknown section"),
])
def test_config_errors_exit_2(tmp_path, capsys, body, needle):
    cfg = write_ini(tmp_path, body)
    rc = main(["evolve", "--config", cfg, "--out",
               str(tmp_path / "out"), "--quiet"])
    assert rc == 2
    err = capsys.readouterr().err
    assert err.startswith("config error:")
    assert needle in err


def test_small_basis_rejected_before_running(tmp_path, capsys):
    cfg = write_ini(tmp_path, """
[initial]
kind = coherent
alpha0 = 3.0

[integrator]
dim = 8
""")
    rc = main(["evolve", "--config", cfg, "--out",
               str(tmp_path / "out"), "--quiet"])
    assert rc == 2
    assert "increase dim to >=" in capsys.readouterr().err


def test_divergent_step_exit_3(tmp_path, capsys):
    cfg = write_ini(tmp_path, """
[grid]
t_max = 5.0
n_times = 2

[integrator]
dim = 32
dt = 1.0
""")
    rc = main(["evolve", "--config", cfg, "--out",
               str(tmp_path / "out"), "--quiet"])
    assert rc == 3
    assert capsys.readouterr().err.startswith("divergence:")


def test_file_initial_roundtrip(tmp_path):
    rho0 = materialize(GaussianState.thermal(1.0), 48)
    npy = tmp_path / "state.npy"
    np.save(npy, rho0.matrix)
    cfg = write_ini(tmp_path, f"""
[initial]
kind = file
path = {npy}

[grid]
t_max = 1.0
n_times = 3

[integrator]
dim = 48
""")
    out = tmp_path / "out"
    assert main(["evolve", "--config", cfg, "--out", str(out),
                 "--quiet"]) == 0
    header, rows = read_rows(out / "trajectory.tsv")
    cols = next(h for h in header if h.startswith("# columns:")).split()[2:]
    assert "n_ref" not in cols  # no closed form declared for file input
    first = dict(zip(cols, (float(v) for v in rows[0].split("\t"))))
    assert first["n"] == pytest.approx(1.0, abs=1e-9)

    bad = write_ini(tmp_path, f"""
[initial]
kind = file
path = {npy}

[integrator]
dim = 32
""", name="bad.ini")  # 48x48 file against dim = 32
    assert main(["evolve", "--config", bad, "--out",
                 str(tmp_path / "out2"), "--quiet"]) == 2


def _fake_results():
    return [
        CheckResult(key="alpha/decay", expected="0", actual="1e-09",
                    tolerance="1e-06", passed=True),
        CheckResult(key="entropy/asymptote", expected="1.9", actual="2.4",
                    tolerance="1e-08", passed=False),
    ]


def test_validate_reports_failures(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr("lindosc.cli.run_all",
                        lambda seed=None: _fake_results())
    out = tmp_path / "rep"
    rc = main(["validate", "--out", str(out)])
    assert rc == 1
    got = capsys.readouterr().out
    assert "PASS  alpha/decay" in got
    assert "FAIL  entropy/asymptote" in got
    assert "1/2 checks passed" in got
    assert "failing keys: entropy/asymptote" in got
    header, rows = read_rows(out / "validate_report.tsv")
    assert "# command: validate" in header
    assert rows == [
        "PASS\talpha/decay\t0\t1e-09\t1e-06",
        "FAIL\tentropy/asymptote\t1.9\t2.4\t1e-08",
    ]


def test_validate_quiet_shows_only_failures(capsys, monkeypatch):
    monkeypatch.setattr("lindosc.cli.run_all",
                        lambda seed=None: _fake_results())
    rc = main(["validate", "--quiet"])
    assert rc == 1
    got = capsys.readouterr().out
    assert "PASS" not in got
    assert "FAIL  entropy/asymptote" in got


def test_validate_all_green(capsys, monkeypatch):
    monkeypatch.setattr("lindosc.cli.run_all",
                        lambda seed=None: _fake_results()[:1])
    assert main(["validate", "--quiet"]) == 0
    assert "1/1 checks passed" in capsys.readouterr().out


HUSIMI = """
[params]
omega = 1.1
mu = 0.6
nu = 0.4
f0 = 0.4
Omega = 1.2

[husimi]
resolution = 21
"""


def test_husimi_grids_and_cycle_path(tmp_path):
    cfg = write_ini(tmp_path, HUSIMI)
    out = tmp_path / "out"
    assert main(["husimi", "--config", cfg, "--out", str(out),
                 "--quiet"]) == 0
    files = sorted(f.name for f in out.iterdir())
    assert files == ["cycle_path.tsv"] \
        + [f"husimi_{i:02d}.txt" for i in range(6)]

    header, rows = read_rows(out / "husimi_00.txt")
    meta = {h.split(":")[0][2:]: h.split(":", 1)[1].strip()
            for h in header if ":" in h and not h.startswith("# command")}
    assert meta["nx"] == "21" and meta["np"] == "21"
    assert float(meta["time"]) == 0.0
    assert len(rows) == 21
    # spot check the first grid node against the closed-form density
    p = LindbladParams(omega=1.1, mu=0.6, nu=0.4, f0=0.4, Omega=1.2)
    g = limit_cycle_state(0.0, p, DriveFn.cosine())
    x0 = float(meta["x-range"].split()[0])
    p0 = float(meta["p-range"].split()[0])
    pt = (1.1 * x0 + 1j * p0) / math.sqrt(2 * 1.1)
    assert float(rows[0].split()[0]) == pytest.approx(husimi_value(pt, g),
                                                      abs=1e-12)

    _, path_rows = read_rows(out / "cycle_path.tsv")
    assert len(path_rows) == 257
    first = [float(v) for v in path_rows[0].split("\t")]
    last = [float(v) for v in path_rows[-1].split("\t")]
    assert abs(first[1] - last[1]) < 1e-9  # one full period closes the loop
    assert abs(first[2] - last[2]) < 1e-9


def test_husimi_undriven_single_frame(tmp_path):
    cfg = write_ini(tmp_path, """
[initial]
kind = thermal
nbar0 = 1.0

[husimi]
resolution = 11
""")
    out = tmp_path / "out"
    assert main(["husimi", "--config", cfg, "--out", str(out),
                 "--quiet"]) == 0
    assert (out / "husimi_00.txt").exists()
    assert not (out / "husimi_01.txt").exists()
    assert not (out / "cycle_path.tsv").exists()


def test_husimi_window_warning(tmp_path):
    cfg = write_ini(tmp_path, HUSIMI + "window = 40 50 40 50\n")
    out = tmp_path / "out"
    with pytest.warns(UserWarning, match="outside the requested window"):
        assert main(["husimi", "--config", cfg, "--out", str(out),
                     "--quiet"]) == 0


def test_scan_footer_confirms_peak(tmp_path):
    cfg = write_ini(tmp_path, """
[params]
omega = 1.1
mu = 0.6
nu = 0.4
f0 = 1.4
Omega = 1.2

[scan]
Omega_min = 0.5
Omega_max = 1.7
samples = 201
""")
    out = tmp_path / "out"
    assert main(["scan", "--config", cfg, "--out", str(out),
                 "--quiet"]) == 0
    header, rows = read_rows(out / "resonance_scan.tsv")
    assert len(rows) == 201
    tail = "\n".join(header)
    assert "-> OK" in tail
    assert "sqrt(omega^2 - gamma^2)" in tail


def test_scan_overdamped_has_no_reference(tmp_path):
    cfg = write_ini(tmp_path, """
[params]
omega = 0.05
mu = 0.5
nu = 0.3
f0 = 0.1
Omega = 1.0

[scan]
samples = 11
""")
    out = tmp_path / "out"
    assert main(["scan", "--config", cfg, "--out", str(out),
                 "--quiet"]) == 0
    header, _ = read_rows(out / "resonance_scan.tsv")
    assert any("overdamped" in h for h in header)


def test_steady_state_table(tmp_path):
    cfg = write_ini(tmp_path, "[integrator]\ndim = 64\n")
    out = tmp_path / "out"
    assert main(["steady-state", "--config", cfg, "--out", str(out),
                 "--quiet"]) == 0
    header, rows = read_rows(out / "steady_state.tsv")
    nbar_line = next(h for h in header if h.startswith("# nbar"))
    assert float(nbar_line.split("=")[1]) == pytest.approx(2.0, abs=1e-12)
    pops = np.array([float(r.split("\t")[1]) for r in rows])
    assert pops.size == 64
    assert pops.sum() == pytest.approx(1.0, abs=1e-12)
    assert pops[1] / pops[0] == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_thread_cap_env(tmp_path, capsys, monkeypatch):
    cfg = write_ini(tmp_path, HUSIMI)
    monkeypatch.setenv("LINDOSC_THREADS", "abc")
    rc = main(["husimi", "--config", cfg, "--out",
               str(tmp_path / "o1"), "--quiet"])
    assert rc == 2
    assert "LINDOSC_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("LINDOSC_THREADS", "1")
    assert main(["husimi", "--config", cfg, "--out",
                 str(tmp_path / "o2"), "--quiet"]) == 0


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("lindosc ")


def test_missing_out_is_usage_error(tmp_path, capsys):
    cfg = write_ini(tmp_path, BASIC)
    with pytest.raises(SystemExit) as exc:
        main(["evolve", "--config", cfg])
    assert exc.value.code == 2
