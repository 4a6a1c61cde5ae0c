import csv

import pytest

import aqsp as A
from aqsp.bench import CSV_COLUMNS, ExperimentConfig, run_and_persist, run_bench
from aqsp.cli import main


def small_config(tmp_path, **overrides):
    base = dict(
        family="erdos",
        sizes=(12, 16),
        out_dir=tmp_path,
        reps=2,
        seed=5,
        name="t",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError, match="family"):
        small_config(tmp_path, family="mesh").validate()
    with pytest.raises(ValueError, match="reps"):
        small_config(tmp_path, reps=0).validate()
    with pytest.raises(ValueError, match="algorithm"):
        small_config(tmp_path, algorithms=()).validate()
    with pytest.raises(ValueError, match="algorithm"):
        small_config(tmp_path, algorithms=("bfs",)).validate()
    with pytest.raises(ValueError, match="sizes"):
        small_config(tmp_path, sizes=()).validate()
    with pytest.raises(ValueError, match="lambdas"):
        small_config(tmp_path, lambdas=(-1.0,)).validate()


def test_run_bench_rows_and_agreement(tmp_path):
    rows = run_bench(small_config(tmp_path))
    assert len(rows) == 2 * 2 * 3  # sizes x reps x algorithms
    assert all(r.agreement for r in rows)
    assert all(r.status in ("ok", "no-walk") for r in rows)
    lin_rows = [r for r in rows if r.algorithm == "lin" and r.status == "ok"]
    assert all(r.build_time_s > 0 for r in lin_rows)
    aq_rows = [r for r in rows if r.algorithm != "lin"]
    assert all(r.build_time_s == 0 for r in aq_rows)


def test_rows_deterministic_except_timing(tmp_path):
    r1 = run_bench(small_config(tmp_path))
    r2 = run_bench(small_config(tmp_path))

    def key(rows):
        return [(r.instance, r.nodes, r.arcs, r.quad_arcs, r.algorithm, r.lam,
                 r.popped, repr(r.cost), r.agreement, r.status) for r in rows]

    assert key(r1) == key(r2)


def test_lambda_sweep_cells_agree(tmp_path):
    rows = run_bench(small_config(tmp_path, sizes=(14,), lambdas=(1.0, 1000.0)))
    assert {r.lam for r in rows} == {1.0, 1000.0}
    assert all(r.agreement for r in rows)


def test_lin_rows_oom_skip_under_tight_budget(tmp_path):
    rows = run_bench(small_config(tmp_path, memory_budget_bytes=1))
    lin_rows = [r for r in rows if r.algorithm == "lin"]
    assert lin_rows and all(r.status == "OOM-skipped" for r in lin_rows)
    others = [r for r in rows if r.algorithm != "lin"]
    assert all(r.status == "ok" for r in others)


def test_csv_and_plot_outputs(tmp_path):
    config = small_config(tmp_path)
    csv_path, plot_path, rows = run_and_persist(config)
    assert csv_path.exists() and plot_path.exists()
    with csv_path.open() as fh:
        reader = csv.reader(fh)
        header = next(reader)
        assert header == CSV_COLUMNS
        body = list(reader)
    assert len(body) == len(rows)
    gp = plot_path.read_text()
    for algo in ("aqd", "aqastar", "lin"):
        summary = tmp_path / f"t_summary_{algo}.csv"
        assert summary.exists()
        assert summary.name in gp
    assert "gnuplot" in gp


def test_grid_family_runs(tmp_path):
    rows = run_bench(
        small_config(tmp_path, family="grid", sizes=(6,), reps=1, algorithms=("aqd", "aqastar"))
    )
    assert len(rows) == 2
    assert all(r.nodes == 36 for r in rows)
    assert all(r.agreement for r in rows)


# -- CLI ------------------------------------------------------------------------


def test_cli_generate_solve_check_roundtrip(tmp_path):
    out = tmp_path / "g.aqg"
    assert main(["generate", "--family", "grid", "--rows", "8", "--cols", "9",
                 "--quad", "turn", "--seed", "4", "--out", str(out)]) == 0
    assert main(["solve", str(out), "0", "71", "--algo", "aqastar"]) == 0
    assert main(["solve", str(out), "0", "71", "--algo", "lin", "--lambda", "0"]) == 0
    assert main(["check", str(out), "0", "71"]) == 0


def test_cli_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.aqg", tmp_path / "b.aqg"
    args = ["generate", "--family", "erdos", "--nodes", "15", "--p", "0.5", "--seed", "3"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_exit_codes(tmp_path):
    empty = tmp_path / "empty.aqg"
    assert main(["generate", "--family", "erdos", "--nodes", "4", "--p", "0",
                 "--seed", "1", "--out", str(empty)]) == 0
    assert main(["solve", str(empty), "0", "3"]) == 3  # no walk
    assert main(["solve", str(tmp_path / "missing.aqg"), "0", "3"]) == 2
    assert main(["generate", "--family", "erdos", "--out", str(empty)]) == 2  # no --nodes
    with pytest.raises(SystemExit):
        main(["solve"])  # argparse usage error


def test_cli_check_detects_improving_alpha_cycle(tmp_path, capsys):
    g = A.build_graph(
        5,
        [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0), (1, 4, 1.0)],
        {(0, 1, 4): 100.0},
    )
    path = tmp_path / "detour.aqg"
    A.write_aqg(g, path)
    assert main(["check", str(path), "0", "4"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    assert "simple=False" in out
    assert main(["solve", str(path), "0", "4", "--check-alpha"]) == 0
    out = capsys.readouterr().out
    assert "alpha-cycle improving" in out


def test_cli_bench_writes_outputs(tmp_path):
    assert main(["bench", "--family", "erdos", "--sizes", "10,14", "--reps", "1",
                 "--seed", "2", "--out", str(tmp_path), "--name", "run"]) == 0
    assert (tmp_path / "run.csv").exists()
    assert (tmp_path / "run.gp").exists()


def test_cli_bench_rejects_bad_algorithm(tmp_path):
    assert main(["bench", "--family", "erdos", "--sizes", "10", "--algo", "magic",
                 "--out", str(tmp_path)]) == 2


def test_cli_solve_diamond_lambda_zero(tmp_path, capsys):
    g = A.build_graph(
        4,
        [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 10.0)],
        {(0, 1, 3): 10.0},
    )
    path = tmp_path / "d.aqg"
    A.write_aqg(g, path)
    assert main(["solve", str(path), "0", "3", "--algo", "aqastar"]) == 0
    assert "cost 11.0" in capsys.readouterr().out
    assert main(["solve", str(path), "0", "3", "--lambda", "0"]) == 0
    assert "cost 2.0" in capsys.readouterr().out


def test_cli_generate_reports_published_grid_counts(tmp_path, capsys):
    out = tmp_path / "big.aqg"
    assert main(["generate", "--family", "grid", "--rows", "100", "--cols", "100",
                 "--quad", "turn", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "undirected_pairs=39402" in text
    assert "quad_arcs=624492" in text


def test_cli_bench_rejects_empty_algorithm_list(tmp_path):
    assert main(["bench", "--family", "erdos", "--sizes", "10", "--algo", "",
                 "--out", str(tmp_path)]) == 2


def test_cli_grid_from_elevation_csv(tmp_path):
    csv_path = tmp_path / "e.csv"
    csv_path.write_text("0,0,0\n0,1,0\n0,0,0\n")
    out = tmp_path / "g.aqg"
    assert main(["generate", "--family", "grid", "--elevation", str(csv_path),
                 "--quad", "zero", "--out", str(out)]) == 0
    g = A.read_aqg(out)
    assert g.node_count == 9
