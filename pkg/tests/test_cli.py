import json

import numpy as np
import pytest

from subbandeq.cli import main

MINIMAL = {"M_target": 1.0}

FAST = {
    "M_target": 0.5,
    "grid": {"ny1": 6, "ny2": 6, "nz": 16},
    "vext": {"kind": "zwell", "amplitude": 4.0},
    "fp_tol": 1e-9,
}


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


class TestSolve:
    def test_minimal_config_writes_all_outputs(self, tmp_path):
        cfg = write_config(tmp_path, {**MINIMAL, "grid": {"ny1": 6, "ny2": 6, "nz": 16}})
        out = tmp_path / "out"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
        for name in ("state.json", "fields.csv", "spectrum.csv", "trace.csv"):
            assert (out / name).exists(), name
        raw = (out / "state.json").read_text()
        state = json.loads(raw)
        assert state["converged"] is True
        assert state["mass"] == pytest.approx(1.0, rel=1e-8)
        assert state["residual"] <= 1e-8
        assert json.dumps(state, sort_keys=True, indent=2) + "\n" == raw

    def test_csv_round_trip_doubles(self, tmp_path):
        cfg = write_config(tmp_path, FAST)
        out = tmp_path / "out"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "fields.csv").read_text().splitlines()
        assert lines[0] == "y1,y2,z,U,rho"
        values = np.loadtxt(lines[1:], delimiter=",")
        state = json.loads((out / "state.json").read_text())
        # lossless: mass recomputed from the CSV density matches state.json
        g = FAST["grid"]
        hy = 1.0 / (g["ny1"] + 1)
        nz = g["nz"]
        rho = values[:, 4].reshape(g["ny1"], g["ny2"], nz + 1)
        wz = np.full(nz + 1, 1.0 / nz)
        wz[0] = wz[-1] = 0.5 / nz
        mass = np.sum(rho * wz) * hy * hy
        assert mass == pytest.approx(state["mass"], rel=1e-15)

    def test_nonconvergence_exit_2_with_trace(self, tmp_path):
        cfg = write_config(tmp_path, {**FAST, "max_outer": 1})
        out = tmp_path / "out"
        assert main(["solve", "--config", cfg, "--out", str(out)]) == 2
        assert len((out / "trace.csv").read_text().splitlines()) == 2  # header + 1 row

    def test_malformed_config_exit_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["solve", "--config", str(bad), "--out", str(tmp_path / "o")]) == 1

    def test_unknown_key_exit_1(self, tmp_path):
        cfg = write_config(tmp_path, {"M_target": 1.0, "bogus": 2})
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 1

    def test_missing_config_exit_1(self, tmp_path):
        assert (
            main(["solve", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
            == 1
        )


class TestVerify:
    VCFG = {**FAST, "verify": {"n_pairs": 2, "n_perturbations": 2}}

    def test_report_written_and_passes(self, tmp_path):
        cfg = write_config(tmp_path, self.VCFG)
        out = tmp_path / "out"
        assert main(["verify", "--config", cfg, "--out", str(out), "--seed", "42"]) == 0
        report = json.loads((out / "verify_report.json").read_text())
        assert report["seed"] == 42
        names = {c["name"] for c in report["checks"]}
        assert {"weighted_l1", "coercivity", "stability_gap", "uniqueness"} <= names
        assert all(c["pass"] for c in report["checks"])
        for c in report["checks"]:
            assert set(c) == {"name", "pass", "lhs", "rhs", "ratio", "details"}

    def test_byte_identical_reports(self, tmp_path):
        cfg = write_config(tmp_path, self.VCFG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["verify", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["verify", "--config", cfg, "--out", str(out2)]) == 0
        b1 = (out1 / "verify_report.json").read_bytes()
        b2 = (out2 / "verify_report.json").read_bytes()
        assert b1 == b2

    def test_json_round_trip_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, self.VCFG)
        out = tmp_path / "out"
        main(["verify", "--config", cfg, "--out", str(out)])
        raw = (out / "verify_report.json").read_text()
        assert json.dumps(json.loads(raw), sort_keys=True, indent=2) + "\n" == raw

    def test_unsorted_probe_exits_1(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {**FAST, "verify": {"n_pairs": 1, "n_perturbations": 1, "unsorted_probe": True}},
        )
        assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


class TestValidate:
    def test_validate_passes(self, tmp_path):
        out = tmp_path / "out"
        assert main(["validate", "--out", str(out)]) == 0
        report = json.loads((out / "validate_report.json").read_text())
        assert report["pass"] is True
        assert report["eigensolver"]["max_relative_error"] <= 1e-12
        ratios = report["poisson_convergence"]["error_ratios"]
        assert all(3.5 <= r <= 4.5 for r in ratios)
        assert report["occupancy_profiles"]["max_abs_difference"] <= 1e-10


class TestSweep:
    def test_mass_sweep_monotone_mu(self, tmp_path):
        cfg = write_config(tmp_path, FAST)
        out = tmp_path / "out"
        code = main(
            ["sweep", "--config", cfg, "--out", str(out), "--param", "M",
             "--values", "0.25,0.5,1.0"]
        )
        assert code == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "value,mu,J_active,F_total,iterations"
        rows = np.loadtxt(lines[1:], delimiter=",")
        assert rows.shape[0] == 3
        assert np.all(np.diff(rows[:, 1]) >= 0.0)  # mu nondecreasing in M

    def test_empty_values_exit_1(self, tmp_path):
        cfg = write_config(tmp_path, FAST)
        assert (
            main(["sweep", "--config", cfg, "--out", str(tmp_path / "o"),
                  "--param", "M", "--values", ""])
            == 1
        )

    def test_bad_param_exit_1(self, tmp_path):
        cfg = write_config(tmp_path, FAST)
        assert (
            main(["sweep", "--config", cfg, "--out", str(tmp_path / "o"),
                  "--param", "Q", "--values", "1.0"])
            == 1
        )

    def test_temperature_sweep(self, tmp_path):
        cfg = write_config(tmp_path, FAST)
        out = tmp_path / "out"
        code = main(
            ["sweep", "--config", cfg, "--out", str(out), "--param", "T",
             "--values", "0.0,0.2"]
        )
        assert code == 0
        rows = np.loadtxt(
            (out / "sweep.csv").read_text().splitlines()[1:], delimiter=","
        )
        assert rows.shape == (2, 5)
        assert rows[0, 0] == 0.0 and rows[1, 0] == 0.2

    def test_single_value_matches_solve(self, tmp_path):
        cfg = write_config(tmp_path, FAST)
        out_sweep = tmp_path / "sw"
        out_solve = tmp_path / "sv"
        main(["sweep", "--config", cfg, "--out", str(out_sweep), "--param", "M",
              "--values", "0.5"])
        main(["solve", "--config", cfg, "--out", str(out_solve)])
        row = (out_sweep / "sweep.csv").read_text().splitlines()[1].split(",")
        state = json.loads((out_solve / "state.json").read_text())
        assert float(row[1]) == state["mu"]
