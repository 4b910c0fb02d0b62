import io
import json
import subprocess
import sys

import pytest

from gaq.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def report(tmp_path, *argv, name="r.json"):
    path = tmp_path / name
    code, _ = call(*argv, "--json", str(path), "--no-timings")
    return code, json.loads(path.read_text())


class TestExitCodes:
    def test_verify_hw(self):
        assert call("verify", "heisenberg-weyl", "--hbar", "1", "--trials", "20")[0] == 0

    @pytest.mark.parametrize("argv", [("fields", "su2"), ("theta", "harmonic-oscillator"),
                                      ("brackets", "su2", "--side", "right"),
                                      ("char-subalgebra", "schrodinger-algebra"),
                                      ("represent", "su2", "--polarization", "P_c"),
                                      ("hermite", "--n", "3"), ("su2-matrices", "--j", "3/2")])
    def test_success(self, argv):
        code, text = call(*argv)
        assert code == 0 and text

    def test_polarize_pass(self):
        assert call("polarize", "heisenberg-weyl", "--set", "a, p")[0] == 0

    def test_polarize_not_maximal(self):
        assert call("polarize", "heisenberg-weyl", "--set", "p")[0] == 1

    def test_polarize_required_flag(self):
        argv = ("polarize", "schrodinger-algebra", "--k", "0", "--set", "t,a,x")
        assert call(*argv)[0] == 0
        assert call(*argv, "--require", "full")[0] == 1

    def test_ho_polarize(self):
        ok = ("ho-polarize", "harmonic-oscillator", "--set", "t - (i*hbar/(2*m))*x^2; p")
        assert call(*ok)[0] == 0
        bad = ("ho-polarize", "schrodinger-algebra", "--k", "0", "--set", "t; a; x; c + (i/(2*m))*v^2")
        assert call(*bad)[0] == 1

    def test_spin_integrality(self, capsys):
        code, _ = call("su2-matrices", "--j", "0.3")
        assert code == 2 and "2j must be a non-negative integer" in capsys.readouterr().err

    def test_pin_is_not_an_abbreviation(self):
        assert call("verify", "su2", "--j", "1/2", "--trials", "5")[0] == 0

    def test_unknown_spec(self):
        assert call("verify", "su3")[0] == 2

    def test_unknown_pin(self):
        assert call("verify", "heisenberg-weyl", "--bogus", "1")[0] == 2

    def test_bad_subcommand(self):
        assert call("frobnicate")[0] == 2

    def test_spec_file(self, tmp_path):
        from gaq.group_model import heisenberg_weyl_text
        path = tmp_path / "hw2.gaq"
        path.write_text(heisenberg_weyl_text(2, 0))
        assert call("verify", str(path), "--trials", "5")[0] == 0

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "gaq", "su2-matrices", "--j", "1/2"],
                              capture_output=True, text=True)
        assert proc.returncode == 0


class TestReports:
    def test_anomaly_scan_root(self, tmp_path):
        code, rep = report(tmp_path, "anomaly-scan", "schrodinger-algebra", "--param", "k")
        assert code == 0
        assert rep["result"]["roots"] == ["i/4"]
        assert rep["result"]["magnitudes"] == ["1/4"]

    def test_schema_fields(self, tmp_path):
        _, rep = report(tmp_path, "su2-matrices", "--j", "1")
        assert {"schema", "version", "command", "seed", "spec", "status", "checks", "result"} <= set(rep)
        assert "seconds" not in json.dumps(rep)

    def test_deterministic(self, tmp_path):
        argv = ("verify", "su2", "--j", "1/2", "--trials", "10", "--seed", "11")
        _, a = report(tmp_path, *argv, name="a.json")
        _, b = report(tmp_path, *argv, name="b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        assert a["seed"] == 11


@pytest.mark.slow
def test_replay_is_byte_stable(tmp_path):
    _, a = report(tmp_path, "replay-paper", name="a.json")
    _, b = report(tmp_path, "replay-paper", name="b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert a["status"] == "pass"
