import csv
import subprocess
import sys

from hjconvex.cli import build_parser, main


def test_id_ranges():
    p = build_parser()
    assert p.parse_args(["bench", "--test", "1..5"]).test == [1, 2, 3, 4, 5]
    assert p.parse_args(["bench", "--test", "1,3"]).test == [1, 3]
    assert p.parse_args(["bench", "--noise", "0,0.05"]).noise == [0.0, 0.05]


def test_bench_writes_results(tmp_path, capsys):
    out = tmp_path / "r"
    code = main(["bench", "--test", "1", "--noise", "0,0.05", "--seed", "0", "--quick", "--out", str(out),
                 "--assert"])
    assert code == 0
    rows = list(csv.reader((out / "results.csv").open()))
    assert rows[0] == ["test", "delta", "seed", "err_linf_rel", "iters", "seconds", "final_J"]
    assert len(rows) == 3 and rows[1][5] == "0.0"
    assert (out / "medians.csv").exists()
    assert (out / "test1_delta0.05_seed0" / "rel_error.csv").exists()


def test_bench_assert_fails_on_violation(tmp_path):
    code = main(["bench", "--test", "4", "--quick", "--max-iters", "1", "--out", str(tmp_path), "--assert"])
    assert code == 1


def test_solve_builtin_and_eikonal(tmp_path, capsys):
    assert main(["solve", "--problem", "radial", "--quick", "--out", str(tmp_path / "a")]) == 0
    assert "relative error" in capsys.readouterr().out
    assert (tmp_path / "a" / "u_true.csv").exists()
    assert main(["solve", "--problem", "6", "--quick", "--max-iters", "50", "--out", str(tmp_path / "b")]) == 0
    assert not (tmp_path / "b" / "u_true.csv").exists()


def test_solve_custom_module(tmp_path, capsys, monkeypatch):
    (tmp_path / "myproblem.py").write_text(
        "from hjconvex.hamiltonian import builtin_problem\n"
        "def make():\n"
        "    return builtin_problem(4)\n"
    )
    monkeypatch.syspath_prepend(str(tmp_path))
    assert main(["solve", "--problem", "myproblem:make", "--quick", "--out", str(tmp_path / "o")]) == 0
    assert "g-equation" in capsys.readouterr().out
    assert main(["solve", "--problem", "myproblem:missing", "--out", str(tmp_path / "p")]) == 2
    assert "cannot load" in capsys.readouterr().err


def test_check_carleman(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["check-carleman", "--functions", "3", "--N", "30", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["function", "lambda", "lhs", "rhs_u", "rhs_grad", "rhs", "ratio"]
    assert len(rows) == 1 + 3 * 4
    assert all(float(r[-1]) > 0 for r in rows[1:])
    # paper parameters violate the theorem's constraints
    assert main(["check-carleman", "--r", "1.2", "--b", "10", "--functions", "1"]) == 2


def test_entry_point_module():
    out = subprocess.run([sys.executable, "-m", "hjconvex", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("bench", "solve", "check-carleman"):
        assert cmd in out.stdout
