import json
import math
import subprocess
import sys

import pytest

from subcycle.cli import main
from subcycle.detector import LIMIT_PRODUCT, product_terms
from subcycle.errors import ConfigError
from subcycle.experiments import (
    CSV_HEADER,
    OUT_DIR_ENV,
    SweepConfig,
    bin_study,
    emit_csv,
    emit_svg,
    quadrature_study,
    resolve_out_dir,
    run_convergence,
    run_sweep,
)
from subcycle.gaussian_mode import GaussianModeParams

NO_DYNAMICS = {"dynamics": None}


def _cfg(**kw):
    return SweepConfig.from_dict(kw)


def test_single_row_values():
    (row,) = run_sweep(_cfg(r_values=[1]))
    assert row.product == pytest.approx(0.272770, abs=1e-6)
    assert row.n_g == pytest.approx(0.0833154705876863, rel=1e-13)
    assert row.abs_m == pytest.approx(0.24197072451914335, rel=1e-12)
    assert row.n2 == pytest.approx(0.1557482373905007, rel=1e-12)
    assert row.flags == "cycle|stddev"


def test_deep_subcycle_row():
    (row,) = run_sweep(_cfg(r_values=[1e-4]))
    assert abs(row.product - 0.3989423) < 1e-4
    assert "subcycle" in row.flags


def test_hbar_doubles_products():
    rs = [1e-3, 0.1, 1.0, 4.0]
    one = run_sweep(_cfg(r_values=rs))
    two = run_sweep(_cfg(r_values=rs, hbar=2.0))
    for a, b in zip(one, two):
        assert b.product == 2.0 * a.product


def test_user_units_do_not_change_products():
    a = run_sweep(_cfg(r_values=[0.5, 2.0]))
    b = run_sweep(_cfg(omega0_values=[1.5, 6.0], sigma=3.0))
    for x, y in zip(a, b):
        assert y.r == pytest.approx(x.r, rel=1e-15)
        assert y.product == pytest.approx(x.product, rel=1e-14)
        assert y.delta_t == pytest.approx(x.delta_t / 3.0, rel=1e-15)


def test_rows_reproduce_product_decomposition():
    for row in run_sweep(SweepConfig()):
        a, b = product_terms(GaussianModeParams(omega0=row.r))
        assert abs(row.product**2 - (a + b)) <= 1e-12


def test_rows_independent_of_order():
    rs = [0.01, 0.3, 2.0]
    fwd = run_sweep(_cfg(r_values=rs))
    rev = run_sweep(_cfg(r_values=rs[::-1]))
    assert fwd == rev[::-1]


def test_fwhm_is_labelled():
    (row,) = run_sweep(_cfg(r_values=[1.0], dt_convention="fwhm"))
    assert row.flags.endswith("fwhm")
    assert row.delta_t == pytest.approx(2 * math.sqrt(math.log(2)))


@pytest.mark.parametrize("bad", [
    {"r_values": []}, {"r_values": [1.0, -2.0]}, {"r_values": "1"}, {"hbar": 0},
    {"dt_convention": "hwhm"}, {"format": "png"}, {"bogus": 1}, {"grid": {"panels": 0}},
    {"grid": {"nodes": 3}}, {"r_values": [1.0], "omega0_values": [1.0]}, {"dynamics": {"scheme": "rk4"}},
    [1, 2],
])
def test_config_rejections(bad):
    with pytest.raises(ConfigError):
        SweepConfig.from_dict(bad)


def test_config_from_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"r_values": [0.5], "dynamics": None, "limit": {"tol": 1e-5}}))
    cfg = SweepConfig.from_json(path)
    assert cfg.r_values == (0.5,) and cfg.dynamics is None and cfg.limit.tol == 1e-5
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        SweepConfig.from_json(path)
    with pytest.raises(ConfigError):
        SweepConfig.from_json(tmp_path / "missing.json")


def test_csv_layout(tmp_path):
    path = emit_csv(run_sweep(_cfg(r_values=[1.0])), tmp_path / "one.csv")
    data = path.read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert len(lines) == 2
    assert lines[0] == "r,theta_g,n_g,abs_m,n2,delta_E,delta_t,product,flags"
    assert lines[0].split(",") == list(CSV_HEADER)
    fields = lines[1].split(",")
    assert float(fields[7]) == run_sweep(_cfg(r_values=[1.0]))[0].product
    assert fields[7] == format(float(fields[7]), ".17g")


def test_csv_empty_rows(tmp_path):
    path = tmp_path / "none.csv"
    with pytest.raises(ValueError):
        emit_csv([], path)
    assert not path.exists()


def test_csv_is_deterministic(tmp_path):
    cfg_bytes = json.dumps({"r_values": [1e-3, 0.1, 1.0, 5.0], "hbar": 1.5}).encode()
    outs = []
    for k in range(2):
        cfg_path = tmp_path / f"c{k}.json"
        cfg_path.write_bytes(cfg_bytes)
        outs.append(emit_csv(run_sweep(SweepConfig.from_json(cfg_path)), tmp_path / f"s{k}.csv").read_bytes())
    assert outs[0] == outs[1]


def test_svg_reference_line(tmp_path):
    rows = run_sweep(SweepConfig())
    assert rows[0].r == pytest.approx(1e-3) and rows[-1].r == pytest.approx(10.0)
    a = emit_svg(rows, tmp_path / "a.svg").read_text()
    b = emit_svg(rows, tmp_path / "b.svg").read_text()
    assert a == b
    assert "0.3989423" in a
    assert a.lstrip().startswith("<?xml")
    with pytest.raises(ValueError):
        emit_svg([], tmp_path / "c.svg")
    assert not (tmp_path / "c.svg").exists()


def test_quadrature_ladder_strictly_decreasing():
    errs = [e for _, e in quadrature_study(1.0, (16, 32, 64), 2)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_bin_ladder_decreasing():
    errs = [e for _, e in bin_study(1.0, (256, 1024, 4096), 2)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-6


def test_bin_count_must_fit_order():
    with pytest.raises(ConfigError):
        bin_study(1.0, (100,), 16)


def test_convergence_without_dynamics():
    report = run_convergence(_cfg(**NO_DYNAMICS))
    assert set(report.tables) == {"quadrature_self_norm", "discrete_n_g"}
    assert report.magnus == ()


def test_convergence_step_table():
    cfg = _cfg(dynamics={"ratios": [5], "panels": 4}, convergence={"step_ladder": [250, 500, 1000, 2000]})
    report = run_convergence(cfg)
    steps = [e for _, e in report.tables["symplectic_steps"]]
    assert all(b < a for a, b in zip(steps, steps[1:]))
    assert len(report.magnus) == 1


def test_out_dir_precedence(tmp_path, monkeypatch):
    cfg = _cfg(out_dir=str(tmp_path / "cfg"))
    assert resolve_out_dir(cfg) == tmp_path / "cfg"
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "env"))
    assert resolve_out_dir(cfg) == tmp_path / "env"
    assert resolve_out_dir(cfg, str(tmp_path / "flag")) == tmp_path / "flag"


def test_unwritable_out_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ConfigError):
        resolve_out_dir(_cfg(), str(blocker / "sub"))


# command line

def test_cli_sweep_both(tmp_path, capsys):
    assert main(["sweep", "--out", str(tmp_path), "--format", "both"]) == 0
    assert (tmp_path / "sweep.csv").exists() and (tmp_path / "sweep.svg").exists()


def test_cli_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "envout"))
    assert main(["sweep"]) == 0
    assert (tmp_path / "envout" / "sweep.csv").exists()


def test_cli_limit(capsys):
    assert main(["limit"]) == 0
    out = capsys.readouterr().out
    value = float(out.split()[1])
    assert abs(value - LIMIT_PRODUCT) <= 1e-6


def test_cli_config_error_exit(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"r_values": [-1]}')
    assert main(["sweep", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["limit", "--config", str(tmp_path / "missing.json")]) == 1


def test_cli_convergence_error_exit(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"limit": {"ladder": [3.0, 2.0, 1.0]}}))
    assert main(["limit", "--config", str(cfg)]) == 2


def test_cli_dynamics_needs_section(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(NO_DYNAMICS))
    assert main(["dynamics", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_cli_validate(capsys):
    assert main(["validate"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_cli_converge_light(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(NO_DYNAMICS))
    assert main(["converge", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    text = (tmp_path / "convergence.csv").read_text()
    assert text.startswith("study,level,error\n")


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "subcycle", "sweep", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    res = subprocess.run([sys.executable, "-m", "subcycle", "nope"], capture_output=True, text=True)
    assert res.returncode != 0
