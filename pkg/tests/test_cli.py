import os

import pytest

from rchwave.cli import SWEEP_COLUMNS, main
from rchwave.reporting import read_csv


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSeed:
    def test_prints_summary(self, capsys):
        code, out, _ = run_cli(["seed", "--amplitude", "0.1", "--omega", "1"], capsys)
        assert code == 0
        values = dict(line.split(" = ") for line in out.strip().splitlines())
        assert float(values["c"]) == pytest.approx(0.515)
        assert float(values["A"]) == pytest.approx(0.010175, abs=1e-12)
        assert abs(float(values["A"]) - 0.01) < 3e-4


class TestValidation:
    def test_omega_zero_rejected(self, capsys):
        code, _, err = run_cli(["trace", "--omega", "0", "--c-start", "0.6", "--c-end", "0.7"], capsys)
        assert code == 1
        assert "omega" in err

    def test_speed_below_onset_rejected(self, capsys):
        code, _, err = run_cli(["trace", "--omega", "1", "--c-start", "0.4", "--c-end", "0.7"], capsys)
        assert code == 1

    def test_numerical_failure_names_speed(self, capsys, tmp_path):
        # past the existence boundary the continuation must stop with a report
        code, _, err = run_cli(
            ["trace", "--omega", "1", "--c-start", "0.6", "--c-end", "2.5",
             "--c-step", "0.1", "--out", str(tmp_path)],
            capsys,
        )
        assert code == 2
        assert "c=" in err


class TestConfigFile:
    def test_parse_and_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# sweep configuration\n"
            "omega = 1.0\n"
            "c_start = 0.6   # just a point\n"
            "c_end = 0.6\n"
            "n_modes = 64\n"
        )
        out_dir = tmp_path / "out"
        code, _, _ = run_cli(
            ["trace", "--config", str(cfg), "--out", str(out_dir)], capsys
        )
        assert code == 0
        header, rows = read_csv(out_dir / "family_omega1.csv")
        assert header[0] == "c"
        assert rows[0][0] == pytest.approx(0.6)

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("omqga = 1.0\n")
        code, _, err = run_cli(["trace", "--config", str(cfg)], capsys)
        assert code == 1
        assert "omqga" in err

    def test_malformed_line(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("omega 1.0\n")
        code, _, _ = run_cli(["trace", "--config", str(cfg)], capsys)
        assert code == 1


class TestTrace:
    def test_columns_and_determinism(self, capsys, tmp_path):
        args = ["trace", "--omega", "1", "--c-start", "0.55", "--c-end", "0.7",
                "--c-step", "0.05", "--modes", "64"]
        code, _, _ = run_cli(args + ["--out", str(tmp_path / "a")], capsys)
        assert code == 0
        code, _, _ = run_cli(args + ["--out", str(tmp_path / "b")], capsys)
        assert code == 0
        a = (tmp_path / "a" / "family_omega1.csv").read_bytes()
        b = (tmp_path / "b" / "family_omega1.csv").read_bytes()
        assert a == b
        header, rows = read_csv(tmp_path / "a" / "family_omega1.csv")
        assert header == ["c", "A", "M", "E", "F", "amplitude", "min_gap", "residual_norm"]
        assert len(rows) >= 4


class TestAnalyze:
    def test_full_verdict_printed(self, capsys):
        code, out, _ = run_cli(["analyze", "--c", "0.7", "--omega", "1", "--modes", "96"], capsys)
        assert code == 0
        values = dict(line.split(" = ") for line in out.strip().splitlines())
        for key in ("c", "omega", "n_L", "z_L", "n_LPi", "z_LPi", "theta", "d_c",
                    "dA_dc", "dE_dc", "det_A0", "inner_L_inv_1_1", "decision", "criterion"):
            assert key in values
        assert values["decision"] == "spectrally_stable"
        assert int(values["n_LPi"]) == 1
        assert int(values["z_LPi"]) == 1


@pytest.fixture(scope="module")
def sweep_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    code = main(
        ["sweep", "--omega", "1", "--c-start", "0.54", "--c-end", "0.7",
         "--c-step", "0.04", "--modes", "96", "--out", str(out)]
    )
    assert code == 0
    return out


class TestSweep:
    def test_csv_schema(self, sweep_dir):
        header, rows = read_csv(sweep_dir / "sweep_omega1.csv")
        assert header == SWEEP_COLUMNS
        assert len(rows) >= 4

    def test_rows_stable_and_energy_increasing(self, sweep_dir):
        header, rows = read_csv(sweep_dir / "sweep_omega1.csv")
        e_col = header.index("E")
        dec_col = header.index("decision")
        energies = [r[e_col] for r in rows]
        assert all(b > a for a, b in zip(energies, energies[1:]))
        assert all(r[dec_col] == "spectrally_stable" for r in rows)

    def test_svg_written(self, sweep_dir):
        svg = (sweep_dir / "energy_omega1.svg").read_text()
        assert "<polyline" in svg and "omega = 1" in svg

    def test_determinism_with_threads(self, sweep_dir, tmp_path, capsys):
        os.environ["RCHWAVE_THREADS"] = "2"
        try:
            code = main(
                ["sweep", "--omega", "1", "--c-start", "0.54", "--c-end", "0.7",
                 "--c-step", "0.04", "--modes", "96", "--out", str(tmp_path)]
            )
        finally:
            os.environ.pop("RCHWAVE_THREADS", None)
        capsys.readouterr()
        assert code == 0
        assert (tmp_path / "sweep_omega1.csv").read_bytes() == (
            sweep_dir / "sweep_omega1.csv"
        ).read_bytes()


class TestPlot:
    def test_round_trip_from_sweep(self, sweep_dir, tmp_path, capsys):
        out = tmp_path / "e.svg"
        code, _, _ = run_cli(
            ["plot", str(sweep_dir / "sweep_omega1.csv"), "c", "E", "--out", str(out)], capsys
        )
        assert code == 0
        assert "<polyline" in out.read_text()

    def test_every_numeric_column_plots(self, sweep_dir, tmp_path, capsys):
        header, _ = read_csv(sweep_dir / "sweep_omega1.csv")
        for col in header:
            if col == "decision":
                continue
            out = tmp_path / f"{col}.svg"
            code, _, _ = run_cli(
                ["plot", str(sweep_dir / "sweep_omega1.csv"), "c", col, "--out", str(out)],
                capsys,
            )
            assert code == 0

    def test_empty_csv_rejected(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        code, _, err = run_cli(["plot", str(empty), "c", "E"], capsys)
        assert code == 1

    def test_missing_column_rejected(self, sweep_dir, capsys):
        code, _, err = run_cli(
            ["plot", str(sweep_dir / "sweep_omega1.csv"), "c", "nope"], capsys
        )
        assert code == 1
        assert "nope" in err


class TestEvolve:
    def test_time_series(self, tmp_path, capsys):
        code, out, _ = run_cli(
            ["evolve", "--c", "0.7", "--omega", "1", "--modes", "64",
             "--perturbation", "0.01", "--T", "0.2", "--dt", "1e-3",
             "--out", str(tmp_path)],
            capsys,
        )
        assert code == 0
        header, rows = read_csv(tmp_path / "evolution_omega1_c0.7.csv")
        assert header == ["t", "distance", "M", "E", "F"]
        assert rows[0][0] == 0.0
        assert rows[-1][0] == pytest.approx(0.2)
        e0 = rows[0][3]
        assert all(abs(r[3] - e0) / abs(e0) < 1e-9 for r in rows)

    def test_rng_seed_logged(self, tmp_path, capsys):
        code, out, _ = run_cli(
            ["evolve", "--c", "0.7", "--omega", "1", "--modes", "64",
             "--perturbation", "0.01", "--T", "0.01", "--dt", "1e-3",
             "--seed-rng", "7", "--out", str(tmp_path)],
            capsys,
        )
        assert code == 0
        assert "seed = 7" in out
