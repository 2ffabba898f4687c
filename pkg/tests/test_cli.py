"""CLI tests: exit codes, output files, config-file precedence."""

import csv
import json

import pytest

from icesim.bench.cli import EXIT_CONFIG, EXIT_FTCHECK, EXIT_OK, main


def run(args):
    return main([str(a) for a in args])


class TestExitCodes:
    def test_spam_ok(self, capsys):
        assert run(["spam", "--code", 2, "--shots", 200]) == EXIT_OK
        assert "spam" in capsys.readouterr().out

    def test_bad_concat_is_config_error(self, capsys):
        assert run(["memory", "--concat", "2", "--shots", 10]) == EXIT_CONFIG
        assert "error" in capsys.readouterr().err

    def test_missing_config_file_is_config_error(self, capsys):
        assert run(["spam", "--config", "/nonexistent/c.cfg"]) == EXIT_CONFIG
        capsys.readouterr()

    def test_ftcheck_passes_on_small_code(self, capsys):
        assert run(["ftcheck", "--code", 2]) == EXIT_OK
        out = capsys.readouterr().out
        assert "pass" in out and "FAIL" not in out

    def test_ftcheck_failure_exit_code(self, capsys, monkeypatch):
        import icesim.ftverify as ftv
        real = ftv.check_se_ft

        def broken(gadget, code):
            import dataclasses
            rep = real(gadget, code)
            return dataclasses.replace(rep, counterexamples=[object()])
        monkeypatch.setattr(ftv, "check_se_ft", broken)
        assert run(["ftcheck", "--code", 2]) == EXIT_FTCHECK
        assert "FAIL" in capsys.readouterr().out


class TestOutputs:
    def test_csv_output(self, tmp_path, capsys):
        out = tmp_path / "spam.csv"
        assert run(["spam", "--code", 2, "--shots", 200,
                    "--out", out]) == EXIT_OK
        capsys.readouterr()
        lines = out.read_text().splitlines()
        data = [ln for ln in lines if not ln.startswith("#")]
        header = next(csv.reader([data[0]]))
        assert header == ["shots", "accepted", "errors"]

    def test_json_output(self, tmp_path, capsys):
        out = tmp_path / "ghz.json"
        assert run(["ghz", "--concat", "2,2", "--shots", 100,
                    "--format", "json", "--out", out]) == EXIT_OK
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert payload["kind"] == "ghz"
        assert payload["config"]["k2"] == 2

    def test_decode_sim_single_point(self, tmp_path, capsys):
        out = tmp_path / "dec.csv"
        assert run(["decode-sim", "--concat", "2,2", "--p", "1e-2",
                    "--shots", 2000, "--table-samples", 2000,
                    "--out", out]) == EXIT_OK
        capsys.readouterr()
        assert "p,shots,flagged" in out.read_text()

    def test_lookup_table_build(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        assert run(["lookup", "--concat", "2,2", "--p", "1e-2",
                    "--samples", 2000, "--out", out]) == EXIT_OK
        assert "lookup table" in capsys.readouterr().out
        assert out.exists()


class TestConfigFile:
    def test_config_supplies_defaults(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# run settings\nshots = 150\np = 0.0\ncode 2\n")
        out = tmp_path / "o.json"
        assert run(["spam", "--config", cfg, "--format", "json",
                    "--out", out]) == EXIT_OK
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert payload["rows"][0][0] == 150
        assert payload["config"]["k"] == 2

    def test_explicit_flag_beats_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("shots = 150\n")
        out = tmp_path / "o.json"
        assert run(["spam", "--code", 2, "--shots", 80, "--config", cfg,
                    "--out", out, "--format", "json"]) == EXIT_OK
        capsys.readouterr()
        assert json.loads(out.read_text())["rows"][0][0] == 80

    def test_unparseable_line_is_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("just-one-token\n")
        assert run(["spam", "--config", cfg]) == EXIT_CONFIG
        capsys.readouterr()
