import csv
import json
import math
import subprocess
import sys

import pytest

from tcxy import __version__
from tcxy.cli import SweepResult, format_value, main, run_experiment, to_csv
from tcxy.config import bundled_configs, load_config, parse_config
from tcxy.errors import ConfigurationError

SHIPPED = ["fig2.cfg", "fig4a.cfg", "fig4b.cfg", "fig5.cfg", "fig6a.cfg", "fig6b.cfg", "oracle.cfg", "validity.cfg"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestConfigParsing:
    def test_values_and_comments(self):
        cfg = parse_config(
            "# header\nexperiment = validity\ng = 1.05e6   # coupling\nvarphi = pi/3\nsweep_include_zero = true\n"
            "sweep_axis = gamma\nsweep_values = 1, 0.1, 10\n"
        )
        assert cfg.values["g"] == 1.05e6
        assert cfg.values["varphi"] == pytest.approx(math.pi / 3)
        assert cfg.sweep().values == [0.0, 0.1, 1.0, 10.0]

    @pytest.mark.parametrize(
        "text, key, line",
        [
            ("g = 1\nbogus = 2\n", "bogus", 2),
            ("g = 1\n\ng = 2\n", "g", 3),
            ("n_spins = 2.5\n", "n_spins", 1),
            ("h = import os\n", "h", 1),
            ("units = furlongs\n", "units", 1),
            ("sweep_axis = n_bar\nsweep_min = 0\nsweep_max = 10\nsweep_count = 5\nsweep_scale = log\n", "sweep_min", 2),
            ("sweep_axis = n_bar\nsweep_min = 1\nsweep_max = 10\nsweep_count = 1\n", "sweep_count", 4),
            ("sweep_axis = detuning\n", "sweep_axis", 1),
            ("sweep_include_zero = maybe\n", "sweep_include_zero", 1),
        ],
    )
    def test_errors_name_key_and_line(self, text, key, line):
        with pytest.raises(ConfigurationError) as err:
            parse_config(text)
        assert err.value.key == key and err.value.line == line
        assert f"line {line}" in str(err.value) and key in str(err.value)

    def test_missing_equals(self):
        with pytest.raises(ConfigurationError) as err:
            parse_config("g 1\n")
        assert err.value.line == 1

    def test_unit_conversion(self):
        cfg = parse_config("units = over-2pi\nomega0 = 1e9\nlambda = 1\nh = 2\ntheta = 1\n")
        p = cfg.params()
        assert p.omega0 == pytest.approx(2 * math.pi * 1e9)
        assert p.xy.lam == pytest.approx(2 * math.pi) and p.xy.h == pytest.approx(4 * math.pi)
        assert p.theta == 1.0

    def test_log_sweep(self):
        cfg = parse_config("sweep_axis = n_bar\nsweep_min = 10\nsweep_max = 1000\nsweep_count = 3\nsweep_scale = log\n")
        assert cfg.sweep().values == pytest.approx([10, 100, 1000])

    def test_shipped_configs(self):
        assert set(SHIPPED) <= set(bundled_configs())
        for name in SHIPPED:
            cfg = load_config(name.removesuffix(".cfg"))
            assert cfg.experiment is not None

    def test_fig2_defaults_are_caption_values(self):
        p = load_config("fig2").params()
        two_pi = 2 * math.pi
        assert p.omega0 / two_pi == pytest.approx(6.9e9)
        assert p.omega_a / two_pi == pytest.approx(6.89e9)
        assert p.g / two_pi == pytest.approx(1.05e6)
        assert (p.n_spins, p.n_bar, p.xy.gamma) == (4, 40.0, 1.0)
        assert p.xy.h / two_pi == pytest.approx(1e-5) and p.xy.lam / two_pi == pytest.approx(1.0)
        assert (p.theta, p.phi, p.varphi) == pytest.approx((math.pi / 2, 0.0, math.pi / 3))

    def test_missing_file(self):
        with pytest.raises(ConfigurationError):
            load_config("/nonexistent/run.cfg")


class TestCsv:
    def test_formatting(self):
        assert format_value(0.1) == "0.1"
        assert format_value(1 / 3) == repr(1 / 3)
        assert format_value(True) == "true"
        assert format_value(None) == ""
        assert format_value(3) == "3"

    def test_lf_only(self):
        text = to_csv(SweepResult(["a", "b"], [[1.0, "x"], [2.5, "y"]]))
        assert text == "a,b\n1.0,x\n2.5,y\n"


class TestExperiments:
    def test_qfi_sweep_slopes(self):
        import numpy as np

        # local slope over the top half-decade: the Heisenberg branch is still
        # approaching 2 from above there, the standard branch sits on 1
        for name, target, tol in (("fig4a", 2.0, 0.15), ("fig4b", 1.0, 0.01)):
            res = run_experiment(load_config(name), "qfi-sweep")
            nb = np.array([r[0] for r in res.rows])
            f = np.array([r[1] for r in res.rows])
            assert list(nb) == sorted(nb)
            slope = np.polyfit(np.log(nb[-5:]), np.log(f[-5:]), 1)[0]
            assert slope == pytest.approx(target, abs=tol)
            assert all(r[2] == pytest.approx(1 / math.sqrt(r[1])) for r in res.rows)

    def test_fig6a_ordering(self):
        res = run_experiment(load_config("fig6a"), "qfi-sweep")
        top = max(r[1] for r in res.rows)
        last = {r[0]: r[3] for r in res.rows if r[1] == top}
        assert last[0.0] > last[0.01] > last[1.0] > last[100.0]

    def test_gamma_scan(self):
        res = run_experiment(load_config("fig6b"), "gamma-scan")
        vals = [r[1] for r in res.rows]
        assert [r[0] for r in res.rows] == [0.0, 0.01, 0.1, 1.0, 10.0, 100.0]
        assert vals[0] == 0.0 and vals[-1] >= 0.49
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_phase_scan(self):
        res = run_experiment(load_config("fig5"), "phase-scan")
        assert res.header == ["h", "qfi", "var_jz", "jz2", "phase_label"]
        labels = {r[0]: r[4] for r in res.rows}
        assert labels[min(labels)] == "ferromagnetic" and labels[max(labels)] == "paramagnetic"
        low = [r for r in res.rows if r[0] <= 0.1]
        assert all(r[2] == pytest.approx(10.0, rel=0.02) for r in low)

    def test_validity(self):
        res = run_experiment(load_config("validity"), "validity")
        assert res.header[-1] == "pass" and res.header[0] == "g"
        passes = [r[-1] for r in res.rows]
        # larger coupling eventually breaks the dispersive conditions
        assert passes[0] and not passes[-1]


class TestMain:
    def test_oracle_default_grid(self, tmp_path):
        out = tmp_path / "oracle.csv"
        assert main(["oracle-check", "--config", "oracle", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert len(rows) == 100
        assert {r["status"] for r in rows} <= {"pass", "skipped"}
        man = json.loads(out.with_suffix(".manifest.json").read_text())
        assert man["version"] == __version__ and man["sector"] == "paper"

    def test_oracle_corrupted_tolerance(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("lambda = 1\noracle_n = 4, 6\ntolerance = 1e-16\n")
        assert main(["oracle-check", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 4
        assert "oracle mismatch" in capsys.readouterr().err
        assert any(r["status"] == "fail" for r in read_csv(tmp_path / "o.csv"))

    def test_oracle_empty_grid(self, tmp_path, capsys):
        cfg = tmp_path / "empty.cfg"
        cfg.write_text("oracle_n =\n")
        out = tmp_path / "e.csv"
        assert main(["oracle-check", "--config", str(cfg), "--out", str(out)]) == 0
        assert "warning" in capsys.readouterr().err
        assert out.read_text() == "n_spins,gamma,h,status,d_mean,d_second,d_variance\n"

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("g = 1\nfoo = 2\n")
        assert main(["validity", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
        err = capsys.readouterr().err
        assert "line 2" in err and "foo" in err

    def test_wrong_sweep_axis_is_config_error(self, tmp_path):
        assert main(["gamma-scan", "--config", "fig5", "--out", str(tmp_path / "x.csv")]) == 2

    def test_strict_validity(self, tmp_path):
        cfg = tmp_path / "v.cfg"
        cfg.write_text("omega0 = 10\ng = 5\nn_bar = 40\nlambda = 1e-6\n")
        out = str(tmp_path / "v.csv")
        assert main(["validity", "--config", str(cfg), "--out", out]) == 0
        assert main(["validity", "--config", str(cfg), "--out", out, "--strict"]) == 3
        assert main(["dynamics", "--config", str(cfg), "--out", out, "--strict"]) == 3

    def test_manifest_and_reproducibility(self, tmp_path, monkeypatch):
        outs = []
        for threads in ("1", "4"):
            monkeypatch.setenv("TCXY_THREADS", threads)
            out = tmp_path / f"fig6a_{threads}.csv"
            assert main(["qfi-sweep", "--config", "fig6a", "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert b"\r" not in outs[0]
        man = json.loads((tmp_path / "fig6a_1.manifest.json").read_text())
        assert man["units"] == "over-2pi" and man["sector"] == "antiperiodic"
        assert man["resolved_params_angular"]["g"] == pytest.approx(2 * math.pi * 1.05e6)
        assert man["wall_clock_seconds"] >= 0 and man["version"] == __version__

    def test_sector_flag_overrides(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["gamma-scan", "--config", "fig6b", "--sector", "paper", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert float(rows[-1]["var_jz_over_N"]) < 0.49
        man = json.loads(out.with_suffix(".manifest.json").read_text())
        assert man["sector"] == "paper"

    @pytest.mark.filterwarnings("ignore:dispersive validity")
    def test_dynamics_small(self, tmp_path):
        cfg = tmp_path / "d.cfg"
        cfg.write_text(
            "units = over-2pi\nomega0 = 6.9e9\nomega_a = 6.89e9\ng = 1.05e5\nlambda = 1\nh = 1e-5\n"
            "n_spins = 2\nn_bar = 4\nvarphi = pi/3\nt_max = 2e-6\nn_times = 20\n"
        )
        out = tmp_path / "d.csv"
        assert main(["dynamics", "--config", str(cfg), "--out", str(out)]) == 0
        rows = read_csv(out)
        ts = [float(r["t_seconds"]) for r in rows]
        assert len(rows) == 20 and ts == sorted(set(ts))
        for r in rows:
            assert float(r["abs_dev"]) == pytest.approx(abs(float(r["jphi_full"]) - float(r["jphi_eff"])))
        assert float(rows[0]["jphi_full"]) == pytest.approx(0.5, abs=1e-9)
        assert "validity" in json.loads(out.with_suffix(".manifest.json").read_text())

    def test_console_entry(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "tcxy", "gamma-scan", "--config", "fig6b", "--out", str(tmp_path / "g.csv")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
