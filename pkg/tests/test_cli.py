import subprocess
import sys

import pytest

from nncoop.cli import main
from nncoop.curves import CSV_HEADER, read_curves_csv


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestConstants:
    def test_values(self, capsys):
        code, out, _ = _run(capsys, "constants", "--lambda", "0.25")
        assert code == 0
        values = dict(line.split("=") for line in out.split())
        assert values == {"gamma": "0.3910", "delta": "0.6215", "alpha": "0.6290",
                          "xi": "1.2969", "zeta": "1.4313"}

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "nncoop", "constants", "--lambda", "1"],
                             capture_output=True, text=True, check=True)
        assert "alpha=0.3145" in res.stdout


class TestAnalytic:
    def test_csv_to_stdout(self, capsys):
        code, out, _ = _run(capsys, "analytic", "--t-steps", "4", "--beta", "4")
        lines = out.splitlines()
        assert code == 0 and lines[0] == ",".join(CSV_HEADER) and len(lines) == 5
        assert lines[1].startswith("-10,0.1,") and lines[1].endswith(",analytic,superposition,nsc,fixed")

    def test_svg_needs_out(self, capsys):
        code, _, err = _run(capsys, "analytic", "--t-steps", "3", "--format", "svg")
        assert code == 2 and "needs --out" in err

    def test_both_formats(self, capsys, tmp_path):
        code, _, _ = _run(capsys, "analytic", "--t-steps", "3", "--scheme", "max",
                          "--format", "both", "--out", str(tmp_path / "curve"))
        assert code == 0
        assert (tmp_path / "curve.csv").exists() and (tmp_path / "curve.svg").exists()
        assert read_curves_csv(tmp_path / "curve.csv")[0]["scheme"] == "max"


class TestSimulate:
    def test_byte_identical_rerun(self, capsys, tmp_path):
        args = ["simulate", "--trials", "400", "--t-steps", "5", "--association", "closest",
                "--scheme", "max/off", "--seed", "99"]
        _run(capsys, *args, "--out", str(tmp_path / "a.csv"))
        _run(capsys, *args, "--out", str(tmp_path / "b.csv"))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        rows = read_curves_csv(tmp_path / "a.csv")
        assert {r["model"] for r in rows} == {"nn"} and rows[0]["scheme"] == "max/off:0.5"

    def test_q_flag(self, capsys, tmp_path):
        _run(capsys, "simulate", "--trials", "50", "--t-steps", "2", "--scheme", "off", "--q", "0.3",
             "--out", str(tmp_path / "a.csv"))
        assert read_curves_csv(tmp_path / "a.csv")[0]["scheme"] == "off:0.3"

    def test_window_warning(self, capsys):
        code, _, err = _run(capsys, "simulate", "--trials", "20", "--t-steps", "2",
                            "--window-radius", "8", "--guard-radius", "2")
        assert code == 0 and "warning:" in err


class TestConfigFile:
    def test_file_then_flags(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("beta = 4\nscheme = off:0.2\nt-steps = 3\n")
        _run(capsys, "analytic", "--config", str(cfg), "--out", str(tmp_path / "a.csv"))
        rows = read_curves_csv(tmp_path / "a.csv")
        assert len(rows) == 3 and rows[0]["scheme"] == "off:0.2"
        _run(capsys, "analytic", "--config", str(cfg), "--scheme", "nsc", "--out", str(tmp_path / "b.csv"))
        assert read_curves_csv(tmp_path / "b.csv")[0]["scheme"] == "nsc"


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ["analytic", "--beta", "2"],
        ["analytic", "--lambda", "-1"],
        ["analytic", "--t-steps", "1"],
        ["analytic", "--scheme", "ph", "--association", "closest", "--t-steps", "2"],
        ["analytic", "--scheme", "bogus"],
        ["simulate", "--trials", "0"],
        ["constants", "--config", "/nonexistent/file.cfg"],
    ])
    def test_nonzero_exit(self, capsys, argv):
        code, _, err = _run(capsys, *argv)
        assert code == 2 and err.startswith("nncoop: error:")

    def test_bad_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("betta = 3\n")
        code, _, err = _run(capsys, "constants", "--config", str(cfg))
        assert code == 2 and "unknown key" in err


class TestCompare:
    def test_summary(self, capsys, tmp_path):
        code, out, _ = _run(capsys, "compare", "--t-steps", "4", "--trials", "3000", "--beta", "4",
                            "--out", str(tmp_path / "c.csv"))
        assert code == 0 and "max |analytic - mc|" in out
        rows = read_curves_csv(tmp_path / "c.csv")
        assert [r["method"] for r in rows[::4]] == ["analytic", "mc", "analytic"]
        assert rows[-1]["model"] == "baseline"


class TestFigures:
    def test_six_plus_six_files_deterministic(self, capsys, tmp_path):
        args = ["figures", "--trials", "60", "--t-steps", "3", "--seed", "5"]
        assert _run(capsys, *args, "--out", str(tmp_path / "a"))[0] == 0
        csvs = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
        svgs = sorted(p.name for p in (tmp_path / "a").glob("*.svg"))
        assert len(csvs) == 6 and len(svgs) == 6
        assert "fig3_closeness_beta3.csv" in csvs and "validation_closest_beta2.5.csv" in csvs
        _run(capsys, *args, "--out", str(tmp_path / "b"))
        for name in csvs:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
