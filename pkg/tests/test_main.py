import json

import pandas as pd
import pytest

from main import EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, main
from scenario import PRESETS


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _read(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestValidate:
    def test_preset_ok(self, tmp_path):
        assert main(["validate", "--preset", "discussion-figure", "--out", str(tmp_path)]) == EXIT_OK
        report = _read(tmp_path / "validation.json")
        assert report["ok"] is True
        assert (report["n_x"], report["n_y"], report["n_z"]) == (1, 1, 1)

    def test_hypothesis_violation(self, tmp_path):
        data = dict(PRESETS["discussion-figure"])
        data["m_species"] = [data["m_species"][0], {**data["m_species"][0], "id": "M2"}]
        scenario = _write(tmp_path / "dup.json", data)
        assert main(["validate", "--scenario", str(scenario), "--out", str(tmp_path)]) == EXIT_HYPOTHESIS
        assert _read(tmp_path / "validation.json")["ok"] is False

    def test_truncated_file(self, tmp_path):
        scenario = tmp_path / "broken.json"
        scenario.write_text('{"D": 0.5, "s_in": ', encoding="utf-8")
        assert main(["validate", "--scenario", str(scenario), "--out", str(tmp_path)]) == EXIT_INPUT

    def test_missing_file(self, tmp_path):
        assert main(["validate", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_INPUT


class TestEquilibria:
    def test_figure(self, tmp_path):
        assert main(["equilibria", "--preset", "discussion-figure", "--out", str(tmp_path)]) == EXIT_OK
        listing = _read(tmp_path / "equilibria.json")
        assert listing["stable"] == ["Ezy(Q,{C})"]
        prediction = _read(tmp_path / "prediction.json")
        assert prediction["compliant"] == ["C", "Q"]
        assert prediction["s_star_class"] == "Z"
        assert prediction["e_star"]["state"]["z"] == pytest.approx([1.0])
        assert prediction["stability"]["classification"] == "Stable"
        assert prediction["stability"]["equilibrium_class"] == "Ezy(Q,{C})"

    def test_report_keys(self, tmp_path):
        assert main(["equilibria", "--preset", "discussion-figure", "--out", str(tmp_path)]) == EXIT_OK
        entries = _read(tmp_path / "equilibria.json")["equilibria"]
        for entry in entries:
            assert {"class", "s", "state", "survivors", "flags"} <= set(entry)
            assert "eq_class" not in entry and "s_eq" not in entry
        ezy = next(entry for entry in entries if entry["class"] == "Ezy")
        assert ezy["s"] == pytest.approx(1.0)
        assert ezy["survivors"] == ["C", "Q"]
        assert ezy["stability"]["equilibrium_class"] == "Ezy(Q,{C})"
        assert all(e["re"] < 0 for e in ezy["stability"]["eigenvalues"])


class TestSimulate:
    RELAXED = ["--rel-tol", "1e-9", "--abs-tol", "1e-11"]

    def test_from_prediction(self, tmp_path):
        assert main(["equilibria", "--preset", "discussion-figure", "--out", str(tmp_path)]) == EXIT_OK
        code = main(["simulate", "--preset", "discussion-figure", "--out", str(tmp_path), "--t-max", "50",
                     "--initial", str(tmp_path / "prediction.json"), *self.RELAXED])
        assert code == EXIT_OK
        report = _read(tmp_path / "convergence.json")
        assert report["match"] is True
        assert report["prediction"] == "Ezy(Q,{C})"
        assert report["bounds"]["ok"] is True
        frame = pd.read_csv(tmp_path / "trajectory.csv")
        assert list(frame.columns[:6]) == ["t", "s", "x_M", "y_C", "z_Q", "q_Q"]
        assert frame["t"].iloc[-1] == pytest.approx(50.0)

    def test_without_phytoplankton(self, tmp_path):
        initial = _write(tmp_path / "initial.json", {"s": 3.0, "x": [0.1], "y": [0.1], "z": [0.0], "q": [1.0]})
        code = main(["simulate", "--preset", "discussion-figure", "--out", str(tmp_path), "--t-max", "300",
                     "--initial", str(initial), *self.RELAXED])
        assert code == EXIT_OK
        report = _read(tmp_path / "convergence.json")
        assert report["match"] is False
        assert report["reached"] == "Ey({C})"

    def test_trajectory_in_biomass_units(self, tmp_path):
        data = json.loads(json.dumps(PRESETS["discussion-figure"]))
        data["m_species"][0]["params"]["yield_a"] = 2.0
        data["c_species"][0]["params"]["yield_b"] = 4.0
        scenario = _write(tmp_path / "yields.json", data)
        initial = _write(tmp_path / "initial.json", {"s": 3.0, "x": [0.4], "y": [0.8], "z": [0.1], "q": [0.6]})
        assert main(["simulate", "--scenario", str(scenario), "--initial", str(initial), "--t-max", "500",
                     "--out", str(tmp_path / "run")]) == EXIT_OK
        frame = pd.read_csv(tmp_path / "run" / "trajectory.csv")
        assert frame["x_M"].iloc[0] == 0.4
        assert frame["y_C"].iloc[0] == 0.8
        # substrato total inicial em unidades de substrato: 3 + 0.4/2 + 0.8/4 + 0.1·0.6
        assert frame["M"].iloc[0] == pytest.approx(3.46)

        assert main(["equilibria", "--scenario", str(scenario), "--out", str(tmp_path / "eq")]) == EXIT_OK
        e_star = _read(tmp_path / "eq" / "prediction.json")["e_star"]
        assert frame["y_C"].iloc[-1] == pytest.approx(e_star["state"]["y"][0], abs=1e-3)

    def test_random_start_reproducible(self, tmp_path):
        args = ["simulate", "--preset", "discussion-figure", "--t-max", "5", "--seed", "3"]
        assert main([*args, "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main([*args, "--out", str(tmp_path / "b")]) == EXIT_OK
        a = (tmp_path / "a" / "trajectory.csv").read_text()
        assert a == (tmp_path / "b" / "trajectory.csv").read_text()


class TestSweep:
    def test_grid_sin(self, tmp_path):
        assert main(["sweep", "--preset", "discussion-figure", "--grid-sin", "0.5,3,6", "--out", str(tmp_path)]) == 0
        frame = pd.read_csv(tmp_path / "sweep.csv", keep_default_na=False)
        assert list(frame.columns) == ["D", "s_in", "s_star", "s_star_class", "zone", "survivors"]
        assert len(frame) == 6
        assert frame["survivors"].iloc[0] == "C"
        assert frame["survivors"].iloc[-1] == "C;Q"
        payload = _read(tmp_path / "sweep.json")
        assert payload["zone_thresholds"]["0.5"]["t2"] == pytest.approx(2.0)

    def test_invalid_grid(self, tmp_path):
        assert main(["sweep", "--preset", "discussion-figure", "--grid-d", "1,0,3", "--out", str(tmp_path)]) \
            == EXIT_INPUT

    def test_missing_grid(self, tmp_path):
        assert main(["sweep", "--preset", "discussion-figure", "--out", str(tmp_path)]) == EXIT_INPUT
