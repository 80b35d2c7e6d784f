"""End-to-end tests of the command-line interface.

Each test drives ``cflow.cli.main`` in-process inside a temp directory and
inspects the files it writes plus the exit code.
"""
import json
import math
import os

import pytest

from cflow.cli import main


@pytest.fixture()
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _read_csv(path):
    lines = path.read_text().rstrip("\n").split("\n")
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


FLOW_HEADER = ["s", "Re tau", "Im tau", "Re g_inv", "Im g_inv",
               "Re gamma", "Im gamma", "invariant"]


class TestFlowCommand:
    def test_n_power_flow_writes_contract_columns(self, in_tmp):
        code = main(["flow", "--variant", "n-power", "--N", "2",
                     "--gamma0", "0.5", "--ginv0", "1.0",
                     "--s_max", "0.8", "--n_points", "9",
                     "--out", "traj.csv"])
        assert code == 0
        header, rows = _read_csv(in_tmp / "traj.csv")
        assert header == FLOW_HEADER
        assert len(rows) == 9
        assert float(rows[0][3]) == 1.0 and float(rows[0][5]) == 0.5
        # arclength strictly increases along a straight contour
        ss = [float(r[0]) for r in rows]
        assert all(b > a for a, b in zip(ss, ss[1:]))

    def test_echo_written_beside_output(self, in_tmp):
        main(["flow", "--variant", "n-power", "--N", "2", "--gamma0", "0.5",
              "--ginv0", "1.0", "--s_max", "0.5", "--n_points", "5",
              "--out", "traj.csv"])
        echo = (in_tmp / "traj.config").read_text()
        assert echo.splitlines()[0] == "subcommand = flow"
        assert "gamma0 = 0.5" in echo

    def test_blowup_leaves_partial_rows_marker_and_exit_2(self, in_tmp):
        code = main(["flow", "--variant", "n-power", "--N", "1",
                     "--gamma0", "0.1", "--ginv0", "2.0",
                     "--s_max", "30", "--n_points", "31",
                     "--out", "blow.csv"])
        assert code == 2
        header, rows = _read_csv(in_tmp / "blow.csv")
        assert header == FLOW_HEADER
        assert rows[-1][-1] == "diverged"
        assert math.isnan(float(rows[-1][3]))
        # at least the initial sample survives, and the divergence point
        # carries a finite tau estimate
        assert len(rows) >= 2
        assert math.isfinite(float(rows[-1][1]))

    def test_one_loop_invariant_constant_along_flow(self, in_tmp):
        code = main(["flow", "--variant", "one-loop-v2",
                     "--gamma_start", "0.05", "--gamma_end", "0.3",
                     "--n_points", "8", "--C", "1.0", "--out", "ol.csv"])
        assert code == 0
        _, rows = _read_csv(in_tmp / "ol.csv")
        invs = [float(r[-1]) for r in rows]
        assert max(invs) - min(invs) < 1e-9

    def test_tau_recursion_runs(self, in_tmp):
        code = main(["flow", "--variant", "tau-recursion",
                     "--gamma0", "0.3", "--ginv0", "2.0",
                     "--steps", "5", "--out", "rec.csv"])
        assert code == 0
        _, rows = _read_csv(in_tmp / "rec.csv")
        assert len(rows) == 6

    def test_cf_rg_runs(self, in_tmp):
        code = main(["flow", "--variant", "cf-rg", "--ginv0", "1.0",
                     "--sites", "5", "--tau_max", "2.0", "--depth", "2",
                     "--out", "cf.csv"])
        assert code == 0
        _, rows = _read_csv(in_tmp / "cf.csv")
        assert len(rows) == 5
        assert all(math.isfinite(float(r[3])) for r in rows)

    def test_byte_determinism(self, in_tmp):
        args = ["flow", "--variant", "lr", "--N", "2", "--nu", "0.4",
                "--gamma0", "0.3", "--ginv0", "1.0", "--s_max", "1.0",
                "--n_points", "11"]
        assert main(args + ["--out", "a.csv"]) == 0
        assert main(args + ["--out", "b.csv"]) == 0
        assert (in_tmp / "a.csv").read_bytes() == (in_tmp / "b.csv").read_bytes()

    def test_svg_flag_renders_output(self, in_tmp):
        code = main(["flow", "--variant", "n-power", "--N", "2",
                     "--gamma0", "0.5", "--ginv0", "1.0", "--s_max", "0.8",
                     "--n_points", "9", "--out", "t.csv",
                     "--svg", "t.svg"])
        assert code == 0
        assert "<polyline" in (in_tmp / "t.svg").read_text()


class TestConfigFileAndErrors:
    def test_config_file_with_flag_override(self, in_tmp):
        cfg = in_tmp / "run.cfg"
        cfg.write_text("variant = n-power\nN = 2\ngamma0 = 0.5\n"
                       "ginv0 = 1.0\ns_max = 0.5\nn_points = 5\n")
        code = main(["flow", "--config", str(cfg), "--n_points", "7",
                     "--out", "t.csv"])
        assert code == 0
        _, rows = _read_csv(in_tmp / "t.csv")
        assert len(rows) == 7

    def test_invalid_value_exits_1(self, in_tmp, capsys):
        assert main(["flow", "--variant", "n-power", "--N", "-1"]) == 1
        assert "N" in capsys.readouterr().err

    def test_unknown_key_exits_1(self, in_tmp):
        assert main(["flow", "--bogus", "1"]) == 1

    def test_unknown_subcommand_exits_1(self, in_tmp):
        assert main(["frobnicate"]) == 1

    def test_missing_flag_value_exits_1(self, in_tmp):
        assert main(["flow", "--variant"]) == 1

    def test_missing_required_key_exits_1(self, in_tmp):
        assert main(["flow"]) == 1

    def test_help_exits_0(self, in_tmp, capsys):
        assert main(["--help"]) == 0
        assert "subcommand" in capsys.readouterr().out

    def test_domain_error_exits_1(self, in_tmp):
        # gamma grid must be increasing
        assert main(["flow", "--variant", "one-loop-v1",
                     "--gamma_start", "0.5", "--gamma_end", "0.1",
                     "--n_points", "5", "--C", "1.0"]) == 1


class TestOtherSubcommands:
    def test_bethe_roots_json(self, in_tmp):
        code = main(["bethe", "--n", "2", "--N", "1", "--out", "r.json"])
        assert code == 0
        data = json.loads((in_tmp / "r.json").read_text())
        res = sorted(r["re"] for r in data["roots"])
        assert abs(res[0] + 1.5) < 1e-9 and abs(res[1] + 0.5) < 1e-9
        assert data["residual"] < 1e-10

    def test_eval_gauss_hypergeometric(self, in_tmp):
        code = main(["eval", "--fn", "2f1", "--a", "1.0", "--b", "1.0",
                     "--c", "2.0", "--z_re", "0.5", "--out", "e.json"])
        assert code == 0
        data = json.loads((in_tmp / "e.json").read_text())
        # 2F1(1,1;2;z) = -log(1-z)/z
        assert data["value"]["re"] == pytest.approx(-math.log(0.5) / 0.5,
                                                    rel=1e-10)

    def test_oscillator_coefficients_csv(self, in_tmp):
        code = main(["oscillator", "--N", "1", "--gamma", "0.5",
                     "--E_re", "1.0", "--n_max", "6", "--out", "c.csv"])
        assert code == 0
        header, rows = _read_csv(in_tmp / "c.csv")
        assert header == ["n", "Re c", "Im c"]
        assert len(rows) == 7
        assert float(rows[0][1]) == 1.0

    def test_wetterich_real_oscillator_energy(self, in_tmp):
        code = main(["wetterich", "--mode", "real_osc", "--omega", "1.0",
                     "--Lambda", "1000", "--out", "w.json"])
        assert code == 0
        data = json.loads((in_tmp / "w.json").read_text())
        # omega/pi * atan(Lambda/omega) -> omega/2 at large cutoff
        assert data["energy"]["re"] == pytest.approx(0.5, abs=1e-3)

    def test_cycle_on_closed_trajectory(self, in_tmp):
        lines = [",".join(FLOW_HEADER)]
        n = 64
        for k in range(n):
            t = 2.0 * math.pi * k / (n - 1)
            lines.append(f"{k},0.0,0.0,{math.cos(t)},{math.sin(t)},"
                         "0.0,0.0,nan")
        (in_tmp / "circ.csv").write_text("\n".join(lines) + "\n")
        code = main(["cycle", "--input", "circ.csv", "--out", "cyc.json"])
        assert code == 0
        data = json.loads((in_tmp / "cyc.json").read_text())
        assert data["closed"] is True
        assert data["winding"] == 1

    def test_cycle_missing_columns_exits_1(self, in_tmp):
        (in_tmp / "bad.csv").write_text("a,b\n1,2\n")
        assert main(["cycle", "--input", "bad.csv"]) == 1

    def test_phase_scan_csv_and_fit(self, in_tmp):
        code = main(["phase", "--N_list", "2,3,4,5,6,2.5",
                     "--gamma", "0.5", "--E0", "1.0", "--k_re", "1.0",
                     "--nu", "0.3", "--out", "ph.csv"])
        assert code == 0
        header, rows = _read_csv(in_tmp / "ph.csv")
        assert header == ["N", "scale", "exponent_fit", "divergent"]
        assert len(rows) == 6
        # integer powers share a fitted exponent; the fractional one is
        # marked non-critical by an empty field
        fits = {r[0]: r[2] for r in rows}
        assert fits["2.5"] == ""
        ints = {v for k, v in fits.items() if k != "2.5"}
        assert len(ints) == 1 and ints != {""}
        fit = json.loads((in_tmp / "ph_fit.json").read_text())
        assert fit["points_fit"] == 5
        assert fit["r_squared"] > 0.98

    def test_phase_scan_thread_count_does_not_change_bytes(self, in_tmp,
                                                           monkeypatch):
        args = ["phase", "--N_list", "2,3,4,5", "--gamma", "0.5",
                "--E0", "1.0", "--k_re", "1.0", "--nu", "0.3"]
        monkeypatch.setenv("CFLOW_THREADS", "1")
        assert main(args + ["--out", "p1.csv"]) == 0
        monkeypatch.setenv("CFLOW_THREADS", "4")
        assert main(args + ["--out", "p2.csv"]) == 0
        assert (in_tmp / "p1.csv").read_bytes() == (in_tmp / "p2.csv").read_bytes()
