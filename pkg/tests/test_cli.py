import csv
import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from netsecgame.cli import EXIT_INFEASIBLE, EXIT_INVALID, EXIT_OK, main

TABLE1 = str(resources.files("netsecgame").joinpath("data/table1.csv"))


def _graph(tmp_path, n, edges, name="g.json"):
    p = tmp_path / name
    p.write_text(json.dumps({"n": n, "edges": edges}))
    return str(p)


@pytest.fixture
def p3(tmp_path):
    return _graph(tmp_path, 3, [[1, 2], [2, 3]], "p3.json")


@pytest.fixture
def s4(tmp_path):
    return _graph(tmp_path, 4, [[1, 2], [1, 3], [1, 4]], "s4.json")


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    data = json.loads(out.out) if out.out.strip() else None
    return code, data, out.err


def test_analyze_p3(capsys, p3):
    code, rep, _ = run(capsys, "analyze", "--graph", p3, "--target", 3)
    assert code == EXIT_OK
    assert rep["feasible"] == [1, 2] and rep["algebraic_condition"] == [1, 2]
    pair = next(p for p in rep["pairs"] if p["a"] == 1 and p["m"] == 2)
    assert pair["r_target"] == 3 and pair["r_monitor"] == 2
    assert rep["all_channels_free_of_closed_positive_real_zeros"]


def test_analyze_star_leaf(capsys, s4):
    code, rep, _ = run(capsys, "analyze", "--graph", s4, "--target", 2)
    assert code == EXIT_OK
    assert rep["feasible"] == [1, 3, 4] and rep["algebraic_condition"] == [1, 3, 4]


def test_analyze_no_feasible_monitor(capsys, p3):
    code, rep, err = run(capsys, "analyze", "--graph", p3, "--target", 2)
    assert code == EXIT_INFEASIBLE
    assert rep["feasible"] == []
    assert "no feasible monitor" in err


def test_oog_pair(capsys, p3):
    code, rec, _ = run(capsys, "oog", "--graph", p3, "--target", 3, "--attack", 1, "--monitor", 2, "--delta", 2)
    assert code == EXIT_OK
    assert rec["value"] == 2.0 and rec["omega_star"] == 0.0 and rec["reason"] == "bounded"
    code, rec, _ = run(capsys, "oog", "--graph", p3, "--target", 2, "--attack", 1, "--monitor", 3)
    assert rec["value"] == "inf" and rec["reason"] == "relative-degree-violation"


def test_game_matrix_in_table1(capsys, tmp_path):
    code, eq, _ = run(capsys, "game", "--matrix-in", TABLE1, "--out-dir", tmp_path)
    assert code == EXIT_OK
    assert abs(eq["value"] - 1.4669) <= 1e-4
    assert eq["support"] == {"attack": [2], "monitor": [6]}
    assert eq["pure"] and not eq["full_matrix_pure_saddle"]
    assert eq["feasible_monitors"] == [3, 6]
    assert json.loads((tmp_path / "equilibrium.json").read_text())["value"] == eq["value"]


def test_nash_alias(capsys):
    code, eq, _ = run(capsys, "nash", "--matrix-in", TABLE1)
    assert code == EXIT_OK and eq["support"]["monitor"] == [6]


def test_game_p3_and_roundtrip(capsys, tmp_path, p3):
    out = tmp_path / "run"
    code, eq, _ = run(capsys, "game", "--graph", p3, "--target", 3, "--out-dir", out)
    assert code == EXIT_OK
    assert eq["value"] == pytest.approx(1.0)
    rows = list(csv.reader(l for l in (out / "payoff.csv").read_text().splitlines() if not l.startswith("#")))
    assert rows[0] == ["a\\m", "v1", "v2"] and len(rows) == 3
    code, again, _ = run(capsys, "nash", "--matrix-in", out / "payoff.csv")
    assert code == EXIT_OK
    assert again["value"] == pytest.approx(eq["value"], abs=1e-9)
    assert np.allclose(again["p_a"], eq["p_a"], atol=1e-9)
    assert np.allclose(again["p_m"], eq["p_m"], atol=1e-9)


def test_game_roundtrip_mixed(capsys, tmp_path):
    # a graph whose game needs a genuinely mixed or non-trivial solution
    g = _graph(tmp_path, 6, [[1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [6, 1], [1, 4]])
    out = tmp_path / "run"
    code, eq, _ = run(capsys, "game", "--graph", g, "--target", 2, "--out-dir", out)
    assert code == EXIT_OK
    code, again, _ = run(capsys, "nash", "--matrix-in", out / "payoff.csv")
    assert abs(again["value"] - eq["value"]) <= 1e-9
    assert np.allclose(again["p_m"], eq["p_m"], atol=1e-9)


def test_game_infeasible_exit(capsys, tmp_path, p3):
    code, _, err = run(capsys, "game", "--graph", p3, "--target", 2, "--out-dir", tmp_path)
    assert code == EXIT_INFEASIBLE
    assert "unbounded value for every monitor" in err


def test_malformed_csv(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a\\m,v1,v2\nv1,1,2\nv2,3,abc\n")
    code, _, err = run(capsys, "nash", "--matrix-in", bad)
    assert code == EXIT_INVALID
    assert "row 3, column 3" in err


def test_sweep_feasible_monotone(capsys, tmp_path, p3):
    code, rep, _ = run(capsys, "sweep", "--graph", p3, "--target", 3, "--attack", 1, "--monitor", 2,
                       "--freq-min", 0.1, "--freq-max", 10, "--freq-steps", 7, "--out-dir", tmp_path)
    assert code == EXIT_OK
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "f_hz,energy_target,energy_monitor,ratio"
    ratios = [float(l.split(",")[3]) for l in lines[1:]]
    assert all(x >= y for x, y in zip(ratios, ratios[1:]))


def test_sweep_infeasible_slope(capsys, tmp_path, p3):
    code, rep, _ = run(capsys, "sweep", "--graph", p3, "--target", 2, "--attack", 1, "--monitor", 3,
                       "--freq-min", 0.1, "--freq-max", 10, "--freq-steps", 9, "--out-dir", tmp_path)
    assert code == EXIT_OK
    assert rep["top_decade_slope"] == pytest.approx(2.0, rel=0.1)


def test_sweep_zero_frequency_rejected(capsys, tmp_path, p3):
    code, _, err = run(capsys, "sweep", "--graph", p3, "--target", 3, "--attack", 1, "--monitor", 2,
                       "--freq-min", 0, "--freq-max", 1, "--out-dir", tmp_path)
    assert code == EXIT_INVALID and "f = 0" in err


def test_simulate_zero_amplitude(capsys, tmp_path, p3):
    code, rep, _ = run(capsys, "simulate", "--graph", p3, "--target", 3, "--attack", 1, "--monitor", 2,
                       "--freq", 0.5, "--amplitude", 0, "--horizon", 20, "--trace", "--out-dir", tmp_path)
    assert code == EXIT_OK
    assert rep["stealthy"] and rep["energy_target"] == 0 and rep["energy_monitor"] == 0
    head = (tmp_path / "trace.csv").read_text().splitlines()[0]
    assert head == "t,x_1,x_2,x_3,y_tau,y_m"


def test_simulate_unstable_dt(capsys, p3):
    code, _, err = run(capsys, "simulate", "--graph", p3, "--target", 3, "--attack", 1, "--monitor", 2,
                       "--freq", 0.5, "--dt", 1)
    assert code == EXIT_INVALID and "use dt <=" in err


@pytest.mark.parametrize(
    "args,with_graph",
    [
        (["analyze", "--target", "1"], False),
        (["oog", "--target", "3", "--attack", "1"], True),
        (["analyze", "--target", "9"], True),
        (["analyze", "--target", "3", "--delta", "-1"], True),
        (["oog", "--target", "3", "--attack", "3", "--monitor", "1"], True),
    ],
)
def test_validation_errors(capsys, p3, args, with_graph):
    if with_graph:
        args = [args[0], "--graph", p3, *args[1:]]
    code, _, err = run(capsys, *args)
    assert code == EXIT_INVALID and err.startswith("error:")


def test_disconnected_graph(capsys, tmp_path):
    g = _graph(tmp_path, 4, [[1, 2], [3, 4]])
    code, _, err = run(capsys, "analyze", "--graph", g, "--target", 1)
    assert code == EXIT_INVALID and "disconnected" in err


def test_console_entry_point(tmp_path, p3):
    res = subprocess.run([sys.executable, "-m", "netsecgame.cli", "analyze", "--graph", p3, "--target", "2"],
                         capture_output=True, text=True)
    assert res.returncode == EXIT_INFEASIBLE
    res = subprocess.run([sys.executable, "-m", "netsecgame.cli", "analyze", "--graph", p3],
                         capture_output=True, text=True)
    assert res.returncode == EXIT_INVALID
    res = subprocess.run([sys.executable, "-m", "netsecgame.cli", "bogus"], capture_output=True, text=True)
    assert res.returncode == EXIT_INVALID
