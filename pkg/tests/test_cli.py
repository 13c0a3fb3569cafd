import json

import pytest

from nsch.cli import main

SMALL_RUN = """
grid.N = 32
potential.alpha0 = 1
potential.alpha = 2
scheme.dt = 1e-3
ic.seed = 3
ic.band = 4
ic.target_linf = 0.6
run.t_end = 0.02
run.sample_every = 5
output.dir = {out}
output.emit = csv, snapshots, heatmaps
"""

SMALL_VERIFY = """
grid.N = 32
potential.alpha0 = 1
potential.alpha = 2
run.t_end = 0.01
output.dir = {out}
"""

ENVELOPE_RUN = """
grid.N = 32
potential.alpha0 = 1
potential.alpha = 2
scheme.dt = 5e-4
scheme.epsilon = 1e-2
ic.seed = 1
ic.band = 4
ic.target_linf = 0.8
run.t_end = 0.02
run.sample_every = 10
output.dir = {out}
envelope.enabled = true
"""

CONVERGENCE_RUN = """
grid.N = 16
potential.alpha0 = 1
potential.alpha = 2
scheme.dt = 1e-3
ic.kind = modes
ic.modes = 1:0:0.2, 1:1:0.15
run.t_end = 0.05
output.dir = {out}
"""


def write_config(tmp_path, template):
    tmp_path.mkdir(parents=True, exist_ok=True)
    out = tmp_path / "out"
    path = tmp_path / "run.cfg"
    path.write_text(template.format(out=out))
    return str(path), out


class TestRunCommand:
    def test_successful_run(self, tmp_path, capsys):
        cfg_path, out = write_config(tmp_path, SMALL_RUN)
        code = main(["run", cfg_path])
        assert code == 0
        assert (out / "diagnostics.csv").exists()
        assert any(p.name.startswith("snapshot_") for p in out.iterdir())
        assert any(p.name.startswith("heatmap_") for p in out.iterdir())
        report = (out / "report.jsonl").read_text().strip().splitlines()
        entries = [json.loads(line) for line in report]
        assert all(e["passed"] for e in entries)
        assert "[PASS]" in capsys.readouterr().out

    def test_bad_initial_condition_exits_2(self, tmp_path):
        cfg_path, _ = write_config(tmp_path, SMALL_RUN + "ic.target_linf = 1.0\n")
        assert main(["run", cfg_path]) == 2

    def test_missing_config_exits_2(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.cfg")]) == 2

    def test_determinism_bit_identical_csv(self, tmp_path):
        cfg_a, out_a = write_config(tmp_path / "a", SMALL_RUN)
        cfg_b, out_b = write_config(tmp_path / "b", SMALL_RUN)
        assert main(["run", cfg_a]) == 0
        assert main(["run", cfg_b]) == 0
        csv_a = (out_a / "diagnostics.csv").read_bytes()
        csv_b = (out_b / "diagnostics.csv").read_bytes()
        assert csv_a == csv_b


class TestVerifyCommand:
    def test_exit_zero_on_default_style_config(self, tmp_path, capsys):
        cfg_path, out = write_config(tmp_path, SMALL_VERIFY)
        code = main(["verify", cfg_path])
        assert code == 0
        lines = (out / "report.jsonl").read_text().strip().splitlines()
        names = {json.loads(line)["check"] for line in lines}
        assert any(n.startswith("potential.") for n in names)
        assert any(n.startswith("spectral_oracle.") for n in names)
        assert "korteweg.identity" in names
        assert any(n.startswith("ode_identity.") for n in names)


class TestOracleCheckCommand:
    def test_exit_zero(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["oracle-check"]) == 0
        lines = (tmp_path / "report.jsonl").read_text().strip().splitlines()
        assert len(lines) == 6
        assert all(json.loads(line)["passed"] for line in lines)


class TestEnvelopeCommand:
    def test_regularized_run_passes(self, tmp_path, capsys):
        cfg_path, out = write_config(tmp_path, ENVELOPE_RUN)
        code = main(["envelope", cfg_path])
        assert code == 0
        out_text = capsys.readouterr().out
        assert "envelope.sample" in out_text


class TestConvergenceCommand:
    def test_ratio_tables(self, tmp_path, capsys):
        cfg_path, out = write_config(tmp_path, CONVERGENCE_RUN)
        code = main(["convergence", cfg_path, "--halvings", "2"])
        out_text = capsys.readouterr().out
        assert "dt-refinement" in out_text
        assert "eps-refinement" in out_text
        assert code == 0

    def test_report_written(self, tmp_path):
        cfg_path, out = write_config(tmp_path, CONVERGENCE_RUN)
        main(["convergence", cfg_path, "--halvings", "2"])
        lines = (out / "report.jsonl").read_text().strip().splitlines()
        ratios = [json.loads(line) for line in lines if "ratio" in json.loads(line)["check"]]
        assert ratios


class TestBadConfig:
    def test_parse_error_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("grid.N = 64\npotential.alpha0 = 2\npotential.alpha = 1\nrun.t_end = 0.1\n")
        assert main(["run", str(path)]) == 2
        assert "alpha" in capsys.readouterr().err
