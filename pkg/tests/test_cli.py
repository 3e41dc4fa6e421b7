import json
import math
import re

import numpy as np
import pytest

from bhdimer.cli import (
    CSV_HEADER,
    PRESETS,
    ScenarioSpec,
    main,
    parse_ratio,
    read_series,
    realize_ratio,
    run_scenario,
    sweep,
)
from bhdimer.model import CouplingConfig

FLOAT_12_SIG = re.compile(r"^-?\d\.\d{11}e[+-]\d{2,3}$")


def small_spec(tmp_path=None, fmt="csv", **overrides):
    base = dict(
        config=CouplingConfig(8, k=1.0, delta_mu=0.0, e_j=4.0),
        initial="fock:8,0",
        t_max=12.0,
        steps=400,
        window=21,
        out=None if tmp_path is None else tmp_path / f"run.{fmt}",
        fmt=fmt,
    )
    base.update(overrides)
    return ScenarioSpec(**base)


class TestParseRatio:
    @pytest.mark.parametrize(
        "token,expected",
        [
            ("0.25", 0.25),
            ("1e-4", 1e-4),
            ("1/N", 0.01),
            ("4/N", 0.04),
            ("1/N^2", 1e-4),
            ("1/N**2", 1e-4),
            ("N", 100.0),
            ("N^2", 10000.0),
            ("2*N", 200.0),
            ("3*N^2", 30000.0),
        ],
    )
    def test_tokens(self, token, expected):
        assert parse_ratio(token, 100) == pytest.approx(expected, rel=1e-15)

    def test_garbage_rejected(self):
        with pytest.raises(ValueError):
            parse_ratio("x/N", 100)

    def test_n_zero_rejected(self):
        with pytest.raises(ValueError):
            parse_ratio("1/N", 0)


class TestRealizeRatio:
    def test_small_ratio_fixes_k(self):
        assert realize_ratio(0.25) == (1.0, 4.0)

    def test_large_ratio_fixes_ej(self):
        assert realize_ratio(4.0) == (4.0, 1.0)

    def test_unity(self):
        assert realize_ratio(1.0) == (1.0, 1.0)

    @pytest.mark.parametrize("bad", [0.0, -2.0, math.inf, math.nan])
    def test_invalid_rejected(self, bad):
        with pytest.raises(ValueError):
            realize_ratio(bad)


class TestScenarioSpec:
    def test_too_few_steps_rejected(self):
        with pytest.raises(ValueError):
            small_spec(steps=1)

    def test_nonpositive_t_max_rejected(self):
        with pytest.raises(ValueError):
            small_spec(t_max=0.0)

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            small_spec(fmt="xml")

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            small_spec(window=10)

    def test_initial_must_match_n(self):
        with pytest.raises(ValueError):
            small_spec(initial="fock:9,0")


class TestRunScenario:
    def test_csv_shape_and_format(self, tmp_path):
        spec = small_spec(tmp_path)
        series, summary = run_scenario(spec)
        text = spec.out.read_bytes().decode()
        assert b"\r" not in spec.out.read_bytes()
        lines = text.splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == spec.steps + 1
        for cell in lines[1].split(",") + lines[-1].split(","):
            assert FLOAT_12_SIG.match(cell), cell
        assert summary["regime"]["phase"] == "delocalized"

    def test_csv_round_trip_full_printed_precision(self, tmp_path):
        spec = small_spec(tmp_path)
        series, _ = run_scenario(spec)
        back = read_series(spec.out)
        for name in ("t", "imbalance", "variance", "entanglement_bits", "energy"):
            printed = np.array([float(f"{v:.11e}") for v in getattr(series, name)])
            np.testing.assert_array_equal(getattr(back, name), printed)

    def test_json_round_trip_exact(self, tmp_path):
        spec = small_spec(tmp_path, fmt="json")
        series, _ = run_scenario(spec)
        back = read_series(spec.out)
        for name in back.COLUMNS:
            np.testing.assert_array_equal(getattr(back, name), getattr(series, name))

    def test_json_structure(self, tmp_path):
        spec = small_spec(tmp_path, fmt="json")
        run_scenario(spec)
        payload = json.loads(spec.out.read_text())
        assert set(payload) == {"spec", "summary", "series"}
        assert payload["spec"]["n_total"] == 8
        assert payload["spec"]["initial"] == "fock:8,0"
        assert len(payload["series"]) == spec.steps
        assert "collapse_revival" in payload["summary"]
        assert "envelope" in payload["summary"]["collapse_revival"]

    def test_csv_summary_sidecar(self, tmp_path):
        spec = small_spec(tmp_path)
        run_scenario(spec)
        sidecar = tmp_path / "run.summary.json"
        payload = json.loads(sidecar.read_text())
        assert set(payload) == {"spec", "summary"}
        assert payload["summary"]["regime"]["ratio"] == pytest.approx(0.25)

    def test_rerun_is_byte_identical(self, tmp_path):
        spec_a = small_spec(tmp_path)
        run_scenario(spec_a)
        first = spec_a.out.read_bytes()
        spec_b = small_spec(tmp_path)
        run_scenario(spec_b)
        assert spec_b.out.read_bytes() == first

    def test_empty_system_single_zero_row(self, tmp_path):
        spec = ScenarioSpec(
            config=CouplingConfig(0, k=1.0, delta_mu=0.5, e_j=1.0),
            initial="fock:0,0",
            t_max=10.0,
            steps=100,
            out=tmp_path / "empty.csv",
        )
        series, summary = run_scenario(spec)
        assert len(series) == 1
        row = series.records()[0]
        assert (
            row.t,
            row.imbalance,
            row.imbalance_scaled,
            row.variance,
            row.entanglement_bits,
            row.energy,
        ) == (0.0,) * 6
        assert summary["collapse_revival"]["reason"] == "series_too_short"
        assert len(spec.out.read_text().splitlines()) == 2


class TestSweep:
    def test_degenerate_sweep_matches_single_run(self, tmp_path):
        base = small_spec()
        single = small_spec(tmp_path / "single", t_max=12.0)
        run_scenario(single)
        summary = sweep(base, ["0.25"], ["fock:8,0"], out_dir=tmp_path / "sweepdir")
        (cell,) = summary["cells"]
        assert cell["status"] == "ok"
        cell_file = tmp_path / "sweepdir" / cell["file"]
        assert cell_file.read_bytes() == single.out.read_bytes()

    def test_cell_failure_recorded_without_aborting(self, tmp_path):
        base = small_spec()
        summary = sweep(
            base,
            ["0.25", "4"],
            ["fock:8,0", "fock:5,0"],  # second initial has the wrong N
            out_dir=tmp_path,
        )
        by_key = {(c["ratio"], c["initial"]): c for c in summary["cells"]}
        assert len(by_key) == 4
        good = by_key[("0.25", "fock:8,0")]
        bad = by_key[("0.25", "fock:5,0")]
        assert good["status"] == "ok"
        assert bad["status"] == "error" and "fixes N" in bad["error"]
        combined = json.loads((tmp_path / "summary.json").read_text())
        assert len(combined["cells"]) == 4

    def test_parallel_matches_serial(self, tmp_path):
        base = small_spec()
        serial = sweep(base, ["0.25", "1"], ["cat", "me"], out_dir=tmp_path / "s", jobs=1)
        parallel = sweep(base, ["0.25", "1"], ["cat", "me"], out_dir=tmp_path / "p", jobs=4)
        for cs, cp in zip(serial["cells"], parallel["cells"]):
            assert (cs["ratio"], cs["initial"]) == (cp["ratio"], cp["initial"])
            assert (tmp_path / "s" / cs["file"]).read_bytes() == (
                tmp_path / "p" / cp["file"]
            ).read_bytes()

    def test_empty_lists_rejected(self):
        with pytest.raises(ValueError):
            sweep(small_spec(), [], ["cat"])


class TestMain:
    def test_list_presets(self, capsys):
        assert main(["--list-presets"]) == 0
        out = capsys.readouterr().out
        for name in PRESETS:
            assert name in out

    def test_missing_couplings_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--n", "10"])
        assert exc.value.code == 2

    def test_ratio_conflicts_with_absolute_couplings(self):
        with pytest.raises(SystemExit) as exc:
            main(["--ratio", "1", "--k", "1", "--ej", "1"])
        assert exc.value.code == 2

    def test_bad_initial_returns_error(self, capsys):
        rc = main(["--n", "10", "--ratio", "1", "--initial", "fock:3,3"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_single_run_prints_summary(self, tmp_path, capsys):
        rc = main(
            [
                "--n", "8",
                "--ratio", "0.25",
                "--t-max", "12",
                "--steps", "400",
                "--window", "21",
                "--out", str(tmp_path / "out.csv"),
            ]
        )
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["regime"]["regime"] == "rabi_josephson_crossover"
        assert summary["regime"]["ratio"] == pytest.approx(0.25)
        assert (tmp_path / "out.csv").exists()

    def test_fig_rabi_preset_revives_at_4pi(self, tmp_path, capsys):
        rc = main(["--preset", "fig-rabi", "--out", str(tmp_path / "rabi.json"), "--format", "json"])
        assert rc == 0
        payload = json.loads((tmp_path / "rabi.json").read_text())
        t_cr = payload["summary"]["collapse_revival"]["t_cr"]
        assert t_cr == pytest.approx(4.0 * math.pi, rel=0.05)
        assert payload["spec"]["e_j"] == 10000.0
        assert payload["spec"]["steps"] == 12000

    def test_fig_selftrap_preset_traps_low_mode(self, tmp_path, capsys):
        rc = main(["--preset", "fig-selftrap", "--out", str(tmp_path / "trap.csv")])
        assert rc == 0
        sidecar = json.loads((tmp_path / "trap.summary.json").read_text())
        assert sidecar["summary"]["time_averages"]["imbalance_scaled"] < -0.5
        assert sidecar["spec"]["initial"] == "fock:0,100"

    def test_sweep_preset_runs_all_cells(self, tmp_path, capsys):
        rc = main(
            [
                "--preset", "fig-threshold-scan",
                "--n", "8",
                "--t-max", "12",
                "--steps", "400",
                "--window", "21",
                "--out", str(tmp_path),
            ]
        )
        assert rc == 0
        combined = json.loads((tmp_path / "summary.json").read_text())
        assert len(combined["cells"]) == 8
        assert all(c["status"] == "ok" for c in combined["cells"])
        table = capsys.readouterr().out
        assert table.count("ratio=") == 8

    def test_sweep_flags_trigger_sweep(self, tmp_path):
        rc = main(
            [
                "--n", "8",
                "--ratios", "0.25,1",
                "--initials", "fock:8,0;cat",
                "--t-max", "12",
                "--steps", "400",
                "--window", "21",
                "--out", str(tmp_path),
            ]
        )
        assert rc == 0
        combined = json.loads((tmp_path / "summary.json").read_text())
        assert {(c["ratio"], c["initial"]) for c in combined["cells"]} == {
            ("0.25", "fock:8,0"),
            ("0.25", "cat"),
            ("1", "fock:8,0"),
            ("1", "cat"),
        }

    def test_sweep_with_failing_cell_returns_nonzero(self, tmp_path):
        rc = main(
            [
                "--n", "8",
                "--ratios", "0.25",
                "--initials", "fock:8,0;fock:4,0",
                "--t-max", "12",
                "--steps", "400",
                "--window", "21",
                "--out", str(tmp_path),
            ]
        )
        assert rc == 1
