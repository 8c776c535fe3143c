"""CLI contract: subcommands, CSV formats, exit codes, determinism."""

import numpy as np
import pytest

import edge_epirisk as ee
from edge_epirisk.cli import main, parse_grid
from edge_epirisk.scenario import ConfigError


def run(tmp_path, *argv):
    out = tmp_path / "out.csv"
    code = main([*argv, "--out", str(out)])
    text = out.read_text(encoding="utf-8") if out.exists() else ""
    return code, text


def write_cfg(tmp_path, body, name="scenario.cfg"):
    p = tmp_path / name
    p.write_text(body, encoding="utf-8")
    return str(p)


BASE = "radius = 100\nn_infected = 10\npath_loss = 2.5\nvol_threshold = 0.01\nmc.trials = 5000\nmc.seed = 3\n"


def test_parse_grid_forms():
    assert np.allclose(parse_grid("1:3:3"), [1, 2, 3])
    assert np.allclose(parse_grid("1:100:3:log"), [1, 10, 100])
    assert parse_grid("1:3:0").size == 0
    assert np.allclose(parse_grid("5:9:1"), [5])
    with pytest.raises(ConfigError):
        parse_grid("1:2")
    with pytest.raises(ConfigError):
        parse_grid("1:2:3:cubic")


def test_analytic_csv_header_and_sorting(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    code, text = run(tmp_path, "analytic", "--config", cfg, "--grid", "0.1:0.01:4")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == f"# edge-epirisk v{ee.__version__} analytic"
    assert lines[1] == "v_th,p_inf"
    vths = [float(row.split(",")[0]) for row in lines[2:]]
    assert vths == sorted(vths)
    assert len(vths) == 4


def test_analytic_values_match_library(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    code, text = run(tmp_path, "analytic", "--config", cfg, "--grid", "0.01:0.02:2")
    rows = [line.split(",") for line in text.splitlines()[2:]]
    lib = ee.p_inf_static(ee.parse_config(BASE))
    assert float(rows[0][1]) == lib.p_inf


def test_analytic_huge_threshold_single_point(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    code, text = run(tmp_path, "analytic", "--config", cfg, "--grid", "1e9:1e9:1")
    assert code == 0
    assert float(text.splitlines()[2].split(",")[1]) == pytest.approx(0.0, abs=1e-9)


def test_empty_grid_produces_empty_csv(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    code, text = run(tmp_path, "compare", "--config", cfg, "--grid", "0.1:0.2:0")
    assert code == 0
    assert len(text.splitlines()) == 2  # header comment + column row only


def test_rerun_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    _, a = run(tmp_path, "simulate", "--config", cfg)
    _, b = run(tmp_path, "simulate", "--config", cfg)
    assert a == b
    _, c = run(tmp_path, "analytic", "--config", cfg, "--grid", "0.005:0.02:5:log")
    _, d = run(tmp_path, "analytic", "--config", cfg, "--grid", "0.005:0.02:5:log")
    assert c == d
    _, e = run(tmp_path, "trails", "--config", cfg, "--individuals", "2", "--duration", "5")
    _, f = run(tmp_path, "trails", "--config", cfg, "--individuals", "2", "--duration", "5")
    assert e == f


def test_simulate_csv_fields(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    code, text = run(tmp_path, "simulate", "--config", cfg)
    assert code == 0
    header = text.splitlines()[1].split(",")
    assert header == ["p_hat", "std_err", "ci_lo", "ci_hi", "trials", "seed"]
    row = text.splitlines()[2].split(",")
    assert int(row[4]) == 5000 and int(row[5]) == 3


def test_simulate_single_trial_warns(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE + "mc.trials = 1\n")
    code, text = run(tmp_path, "simulate", "--config", cfg)
    assert code == 0
    assert float(text.splitlines()[2].split(",")[0]) in (0.0, 1.0)
    assert "error bars" in capsys.readouterr().err


def test_compare_passes_on_calibration_grid(tmp_path):
    cfg = write_cfg(tmp_path, "radius = 100\nn_infected = 20\npath_loss = 2.5\nmc.trials = 20000\nmc.seed = 9\n")
    code, text = run(tmp_path, "compare", "--config", cfg, "--grid", "1.5e-3:2e-2:5:log")
    assert code == 0
    rows = [line.split(",") for line in text.splitlines()[2:]]
    assert len(rows) == 5
    assert all(r[5] == "true" for r in rows)
    for r in rows:
        assert abs(float(r[1]) - float(r[2])) == pytest.approx(float(r[4]), abs=1e-12)


def test_compare_failure_exit_code(tmp_path):
    # one trial with p near 0.5 leaves a gap far above 3*std_err + 0.03
    cfg = write_cfg(
        tmp_path,
        "radius = 100\nn_infected = 20\npath_loss = 2.5\nvol_threshold = 2.75e-3\nmc.trials = 1\nmc.seed = 1\n",
    )
    code, text = run(tmp_path, "compare", "--config", cfg, "--grid", "2.75e-3:2.75e-3:1")
    assert code == 4
    assert text.splitlines()[2].split(",")[5] == "false"


def test_sweep_long_format_and_single_value(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    code, text = run(
        tmp_path, "sweep", "--config", cfg, "--parameter", "n_infected", "--values", "10", "--grid", "0.01:0.02:2"
    )
    assert code == 0
    lines = text.splitlines()
    assert lines[1] == "param_value,v_th,p_inf"
    code2, text2 = run(tmp_path, "analytic", "--config", cfg, "--grid", "0.01:0.02:2")
    sweep_rows = [line.split(",") for line in lines[2:]]
    ana_rows = [line.split(",") for line in text2.splitlines()[2:]]
    assert [(r[1], r[2]) for r in sweep_rows] == [(a[0], a[1]) for a in ana_rows]


def test_sweep_path_loss_monotone(tmp_path):
    cfg = write_cfg(tmp_path, BASE + "vol_threshold = 0.01\n")
    code, text = run(
        tmp_path, "sweep", "--config", cfg, "--parameter", "path_loss", "--values", "2,2.5,3", "--grid", "0.01:0.01:1"
    )
    assert code == 0
    ps = [float(r.split(",")[2]) for r in text.splitlines()[2:]]
    assert ps[0] > ps[1] > ps[2]  # p_inf decreases as path loss grows


def test_sweep_unknown_parameter_exit_2(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    code, _ = run(tmp_path, "sweep", "--config", cfg, "--parameter", "frobnicate", "--values", "1")
    assert code == 2


def test_bad_config_exit_2(tmp_path):
    cfg = write_cfg(tmp_path, "vol_min = 2\nvol_max = 1\n")
    code, _ = run(tmp_path, "analytic", "--config", cfg)
    assert code == 2
    code, _ = run(tmp_path, "analytic", "--config", str(tmp_path / "missing.cfg"))
    assert code == 2
    good = write_cfg(tmp_path, BASE, name="good.cfg")
    code, _ = run(tmp_path, "analytic", "--config", good, "--model", "rwk")
    assert code == 2  # model flag incompatible with the configured mobility


def test_trails_csv_and_rwk_turning_points(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "radius = 100\nmobility.model = rwk\nmobility.step = 20\nmobility.speed = 1\nmc.time_step = 0.1\nmc.seed = 2\n",
    )
    code, text = run(tmp_path, "trails", "--config", cfg, "--individuals", "1", "--duration", "300")
    assert code == 0
    lines = text.splitlines()
    assert lines[1] == "individual,step,t,x,y"
    data = np.array([[float(v) for v in row.split(",")] for row in lines[2:]])
    assert np.all(data[:, 3] ** 2 + data[:, 4] ** 2 <= 100.0**2)
    seg = np.diff(data[:, 3:5], axis=0)
    heading = np.arctan2(seg[:, 1], seg[:, 0])
    idx = np.where(np.abs(np.diff(heading)) > 1e-9)[0] + 1
    corners = data[idx, 3:5]
    gaps = np.hypot(*np.diff(corners, axis=0).T)
    assert len(gaps) >= 10
    assert np.all(np.abs(gaps - 20.0) <= 2.0 * 1.0 * 0.1 + 1e-9)


def test_dump_law_final_cdf_row(tmp_path):
    cfg = write_cfg(tmp_path, "radius = 100\nmobility.model = rwp\n")
    code, text = run(tmp_path, "dump-law", "--config", cfg, "--points", "200")
    assert code == 0
    last = text.splitlines()[-1].split(",")
    assert float(last[2]) == pytest.approx(1.0, abs=1e-6)


def test_dump_law_rwk_matches_empirical_histogram(tmp_path):
    from edge_epirisk import mobility as mob
    from edge_epirisk.montecarlo import ks_statistic
    from edge_epirisk.scenario import RandomWalk

    cfg = write_cfg(tmp_path, "radius = 100\nmobility.model = rwk\nmobility.step = 20\nmobility.speed = 1\n")
    code, text = run(tmp_path, "dump-law", "--config", cfg, "--points", "2048")
    assert code == 0
    data = np.array([[float(v) for v in row.split(",")] for row in text.splitlines()[2:]])
    radii = mob.stationary_radii(RandomWalk(step=20.0, speed=1.0), 100.0, 100_000, seed=4)
    cdf = lambda x: np.interp(x, data[:, 0], data[:, 2])
    # inherent gap between the endpoint marginal and the walk, see notes
    assert ks_statistic(radii, cdf) < 0.05


def test_report_warn_flag(tmp_path):
    cfg = write_cfg(tmp_path, "radius = 20\nn_infected = 20\npath_loss = 2\nvol_threshold = 0.1\ndetention_time = 600\n")
    out = tmp_path / "report.txt"
    code = main(["report", "--config", cfg, "--warn-threshold", "0.5", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert "warn = true" in text
    assert "r_total = " in text
    code = main(["report", "--config", cfg, "--warn-threshold", "0.999", "--out", str(out)])
    assert "warn = false" in out.read_text()


def test_report_with_mc_includes_agreement(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    out = tmp_path / "report.txt"
    code = main(["report", "--config", cfg, "--with-mc", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert "mc.p_hat = " in text and "agreement_gap = " in text


def test_seed_flag_overrides_config(tmp_path):
    cfg = write_cfg(tmp_path, BASE)
    _, a = run(tmp_path, "simulate", "--config", cfg, "--seed", "101")
    _, b = run(tmp_path, "simulate", "--config", cfg, "--seed", "102")
    assert a != b
    assert a.splitlines()[2].split(",")[5] == "101"
