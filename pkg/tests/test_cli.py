"""Command-line interface: schemas, exit codes, determinism."""
import csv
import json
import math
from fractions import Fraction

import pytest

from homleap.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDist:
    def test_bunching_rows(self, capsys):
        code, out, _ = run_cli(capsys, "dist", "--s", "2", "--delta", "0", "--r", "0.5")
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        table = {int(r["delta_out"]): r["probability"] for r in rows}
        assert float(table[-2]) == 0.5 and float(table[2]) == 0.5
        assert float(table[0]) == 0.0

    def test_parity_failure_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "dist", "--s", "3", "--delta", "0", "--r", "0.5")
        assert code == 2
        assert "parity" in err

    def test_bad_reflectivity_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "dist", "--s", "2", "--delta", "0", "--r", "1.5")
        assert code == 2

    def test_rational_mode_emits_fractions(self, capsys):
        code, out, _ = run_cli(
            capsys, "dist", "--s", "4", "--delta", "2", "--r", "1/5", "--mode", "rational"
        )
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        values = [Fraction(r["probability"]) for r in rows]
        assert sum(values) == 1

    def test_fig2a_shape(self, capsys):
        code, out, _ = run_cli(capsys, "dist", "--s", "50", "--delta", "0", "--r", "0.5")
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        table = {int(r["delta_out"]): float(r["probability"]) for r in rows}
        assert table[50] > table[0] and table[-50] > table[0]

    def test_json_envelope(self, capsys, tmp_path):
        out_file = tmp_path / "d.json"
        code, _, _ = run_cli(
            capsys, "dist", "--s", "2", "--delta", "0", "--r", "0.5",
            "--format", "json", "--out", str(out_file),
        )
        assert code == 0
        payload = json.loads(out_file.read_text())
        assert set(payload) == {"manifest", "lattice", "series"}
        assert payload["lattice"] == [-2, 0, 2]
        assert payload["manifest"]["version"]
        assert payload["manifest"]["content_hash"]

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("s=2\ndelta=0\nr=0.9\n")
        code, out, _ = run_cli(
            capsys, "dist", "--config", str(config), "--r", "0.5"
        )
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        table = {int(r["delta_out"]): float(r["probability"]) for r in rows}
        assert table[0] == 0.0  # r=0.5 behaviour, not the config's 0.9


class TestSweep:
    def test_r_sweep_blocks_and_moments(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--param", "r", "--grid", "0.1,0.2,0.5,0.9",
            "--s", "10", "--delta", "-4",
        )
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert {r["r"] for r in rows} == {"0.1", "0.2", "0.5", "0.9"}
        for row in rows:
            r = float(row["r"])
            assert math.isclose(float(row["mean"]), -4 * (1 - 2 * r), abs_tol=1e-9)

    def test_y_sweep(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--param", "y", "--grid", "0.0,1.5707963267948966",
            "--s", "10", "--n", "5", "--r", "0.5",
        )
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert len({r["y"] for r in rows}) == 2

    def test_eta_det_sweep_breaks_parity(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--param", "eta_det", "--grid", "1.0,0.8",
            "--s", "2", "--delta", "0", "--r", "0.5",
        )
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        odd = [r for r in rows if int(r["delta_out"]) % 2 == 1]
        assert odd and all(r["eta_det"] == "0.8" for r in odd)

    def test_eta_sweep(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--param", "eta", "--grid", "1.0,0.8",
            "--k", "2", "--l", "2", "--r", "0.5",
        )
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        blocks = {}
        for row in rows:
            blocks.setdefault(row["eta"], 0)
            blocks[row["eta"]] += float(row["probability"])
        for total in blocks.values():
            assert math.isclose(total, 1.0, abs_tol=1e-12)


class TestCheck:
    @pytest.mark.parametrize("suite", ["parity", "visibility", "decoherence"])
    def test_suites_pass(self, capsys, suite):
        code, out, _ = run_cli(capsys, "check", "--suite", suite)
        assert code == 0
        assert "FAIL" not in out
        assert "max_dev" in out

    def test_oracle_suite(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--suite", "oracle")
        assert code == 0
        assert "three_way_float" in out


class TestFigure:
    def test_writes_data_manifest_and_script(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "figure", "--id", "figS1a", "--outdir", str(tmp_path))
        assert code == 0
        assert (tmp_path / "figS1a.csv").exists()
        assert (tmp_path / "figS1a.manifest.json").exists()
        assert (tmp_path / "figS1a_plot.py").exists()
        manifest = json.loads((tmp_path / "figS1a.manifest.json").read_text())
        assert manifest["content_hash"]
        script = (tmp_path / "figS1a_plot.py").read_text()
        # the script references the data file beside it, never by absolute path
        assert "figS1a.csv" in script
        assert str(tmp_path) not in script

    def test_deterministic_bytes(self, capsys, tmp_path):
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        for target in (dir_a, dir_b):
            code, _, _ = run_cli(capsys, "figure", "--id", "figS1b", "--outdir", str(target))
            assert code == 0
        assert (dir_a / "figS1b.csv").read_bytes() == (dir_b / "figS1b.csv").read_bytes()
        manifest_a = json.loads((dir_a / "figS1b.manifest.json").read_text())
        manifest_b = json.loads((dir_b / "figS1b.manifest.json").read_text())
        for manifest in (manifest_a, manifest_b):
            manifest.pop("created_at")
            manifest.pop("argv")  # differs only in the destination directory
        assert manifest_a == manifest_b

    def test_figure_data_normalized_per_series(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "figure", "--id", "fig2b", "--outdir", str(tmp_path))
        assert code == 0
        rows = list(csv.DictReader((tmp_path / "fig2b.csv").open()))
        by_r = {}
        for row in rows:
            by_r.setdefault(row["r"], 0.0)
            by_r[row["r"]] += float(row["probability"])
        assert all(math.isclose(v, 1.0, abs_tol=1e-9) for v in by_r.values())

    def test_figS4_masks(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "figure", "--id", "figS4", "--outdir", str(tmp_path))
        assert code == 0
        rows = list(csv.DictReader((tmp_path / "figS4.csv").open()))
        panel_e = [r for r in rows if r["panel"] == "e"]
        diag = {int(r["n"]): r["nonclassical"] == "1" for r in panel_e if r["n"] == r["m"]}
        assert all(diag[n] for n in range(1, 11))
