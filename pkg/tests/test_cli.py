import json
from pathlib import Path

import pytest

from silentswarm import cli

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run_cli(*argv):
    return cli.main(list(argv))


class TestRun:
    def test_two_groups_forms_two_communities(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", str(SCENARIOS / "two_groups.yaml"),
            "--out", str(tmp_path),
        )
        out = capsys.readouterr().out
        assert code == cli.EXIT_OK
        assert "communities=2" in out
        assert (tmp_path / "trajectory.csv").exists()
        assert (tmp_path / "summary.json").exists()

    def test_late_joiner_single_community_of_six(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", str(SCENARIOS / "late_joiner.yaml"),
            "--out", str(tmp_path),
        )
        assert code == cli.EXIT_OK
        assert "communities=1" in capsys.readouterr().out
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert sorted(summary["communities"][0]) == list(range(6))

    def test_invalid_scenario_is_config_error(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", str(SCENARIOS / "invalid_safety.yaml"),
            "--out", str(tmp_path),
        )
        assert code == cli.EXIT_CONFIG
        assert "[ERROR]" in capsys.readouterr().out
        assert not (tmp_path / "summary.json").exists()

    def test_missing_scenario_file(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", str(tmp_path / "nope.yaml"),
            "--out", str(tmp_path),
        )
        assert code == cli.EXIT_CONFIG
        assert "error:" in capsys.readouterr().err

    def test_non_convergence_exit_code(self, tmp_path, capsys):
        scen = tmp_path / "hopeless.yaml"
        scen.write_text(
            "params:\n"
            "  env_half_extent: 2.5\n"
            "  goal_half_extent: 1.5\n"
            "  sensing_range: 1.6\n"
            "  t_max: 2.0\n"
            "robots:\n"
            "  count: 6\n"
        )
        code = run_cli(
            "run", "--scenario", str(scen), "--out", str(tmp_path / "out")
        )
        assert code == cli.EXIT_NO_CONVERGENCE
        assert "synergy_time=none" in capsys.readouterr().out
        # outputs are still written for inspection
        assert (tmp_path / "out" / "summary.json").exists()

    def test_seed_flag_overrides_scenario(self, tmp_path):
        scen = tmp_path / "seeded.yaml"
        scen.write_text(
            "seed: 3\n"
            "params:\n"
            "  env_half_extent: 2.5\n"
            "  goal_half_extent: 1.5\n"
            "  sensing_range: 1.6\n"
            "  t_max: 2.0\n"
            "robots:\n"
            "  count: 4\n"
        )
        run_cli("run", "--scenario", str(scen), "--out", str(tmp_path / "a"))
        run_cli(
            "run", "--scenario", str(scen), "--seed", "11",
            "--out", str(tmp_path / "b"),
        )
        a = json.loads((tmp_path / "a" / "summary.json").read_text())
        b = json.loads((tmp_path / "b" / "summary.json").read_text())
        assert a["seed"] == 3
        assert b["seed"] == 11

    def test_out_default_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SILENTSWARM_OUT", str(tmp_path / "envout"))
        monkeypatch.chdir(tmp_path)
        scen = tmp_path / "tiny.yaml"
        scen.write_text(
            "params:\n"
            "  env_half_extent: 2.5\n"
            "  goal_half_extent: 1.5\n"
            "  sensing_range: 1.6\n"
            "  t_max: 1.0\n"
            "robots:\n"
            "  count: 3\n"
        )
        run_cli("run", "--scenario", str(scen))
        assert (tmp_path / "envout" / "summary.json").exists()


class TestCheck:
    def test_flagship_passes_with_notes(self, capsys):
        code = run_cli("check", "--scenario", str(SCENARIOS / "flagship.yaml"))
        out = capsys.readouterr().out
        assert code == cli.EXIT_OK
        assert "[INFO]" in out
        assert "[ERROR]" not in out

    def test_invalid_safety_fails(self, capsys):
        code = run_cli("check", "--scenario", str(SCENARIOS / "invalid_safety.yaml"))
        out = capsys.readouterr().out
        assert code == cli.EXIT_CONFIG
        assert "[ERROR]" in out
        assert "safe_distance" in out

    def test_missing_file(self, capsys):
        code = run_cli("check", "--scenario", "/nonexistent.yaml")
        assert code == cli.EXIT_CONFIG
        assert "error:" in capsys.readouterr().err


@pytest.fixture(scope="module")
def sweep_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    scen = out / "small.yaml"
    scen.write_text(
        "params:\n"
        "  env_half_extent: 2.5\n"
        "  goal_half_extent: 1.5\n"
        "  sensing_range: 1.6\n"
        "robots:\n"
        "  count: 6\n"
    )
    code = run_cli(
        "sweep", "--scenario", str(scen),
        "--sweep", "min_community_size=2,3",
        "--repeats", "2", "--out", str(out),
    )
    return code, out


@pytest.fixture(scope="module")
def run_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("runs")
    scen = root / "small.yaml"
    scen.write_text(
        "params:\n"
        "  env_half_extent: 2.5\n"
        "  goal_half_extent: 1.5\n"
        "  sensing_range: 1.6\n"
        "robots:\n"
        "  count: 6\n"
    )
    for seed in (0, 1, 2):
        assert run_cli(
            "run", "--scenario", str(scen), "--seed", str(seed),
            "--out", str(root / f"run{seed}"), "--stride", "5",
        ) == cli.EXIT_OK
    return root


class TestSweep:
    def test_exit_and_files(self, sweep_out):
        code, out = sweep_out
        assert code == cli.EXIT_OK
        assert (out / "sweep_runs.csv").exists()
        assert (out / "sweep_summary.csv").exists()

    def test_csv_contents(self, sweep_out):
        _, out = sweep_out
        runs = (out / "sweep_runs.csv").read_text().splitlines()
        assert runs[0] == "param_value,run,seed,synergy_time,n_communities"
        assert len(runs) == 5  # header + 2 values x 2 repeats
        summary = (out / "sweep_summary.csv").read_text().splitlines()
        assert summary[0].startswith("param_value,st_median")
        assert len(summary) == 3

    def test_requires_count_scenario(self, tmp_path, capsys):
        code = run_cli(
            "sweep", "--scenario", str(SCENARIOS / "two_groups.yaml"),
            "--out", str(tmp_path),
        )
        assert code == cli.EXIT_CONFIG
        assert "robots.count" in capsys.readouterr().err

    def test_malformed_sweep_argument(self, tmp_path, capsys):
        scen = tmp_path / "s.yaml"
        scen.write_text(
            "params: {env_half_extent: 2.5, goal_half_extent: 1.5, "
            "sensing_range: 1.6}\nrobots: {count: 3}\n"
        )
        code = run_cli(
            "sweep", "--scenario", str(scen), "--sweep", "sensing_range",
            "--out", str(tmp_path),
        )
        assert code == cli.EXIT_CONFIG
        assert "--sweep expects" in capsys.readouterr().err


class TestReport:
    def test_report_over_runs(self, run_dirs, tmp_path, capsys):
        code = run_cli(
            "report", str(run_dirs / "run*"), "--out", str(tmp_path)
        )
        out = capsys.readouterr().out
        assert code == cli.EXIT_OK
        assert "swarm size 6 (3 runs)" in out
        assert "mean communities" in out
        doc = json.loads((tmp_path / "report.json").read_text())
        assert len(doc["groups"]) == 1
        group = doc["groups"][0]
        assert group["swarm_size"] == 6
        assert group["untraceability"]["n_runs"] == 3
        assert group["community_size_table"][0]["min_community_size"] == 3

    def test_empty_report_is_error(self, tmp_path, capsys):
        code = run_cli("report", str(tmp_path / "missing*"))
        assert code == cli.EXIT_CONFIG
        assert "no run directories" in capsys.readouterr().err

    def test_mixed_sizes_notice(self, run_dirs, tmp_path, capsys):
        scen = tmp_path / "s4.yaml"
        scen.write_text(
            "params: {env_half_extent: 2.5, goal_half_extent: 1.5, "
            "sensing_range: 1.6}\nrobots: {count: 4}\n"
        )
        run_cli(
            "run", "--scenario", str(scen), "--seed", "2",
            "--out", str(tmp_path / "run4"),
        )
        code = run_cli(
            "report", str(run_dirs / "run*"), str(tmp_path / "run4")
        )
        out = capsys.readouterr().out
        assert code == cli.EXIT_OK
        assert "mixed swarm sizes" in out
        assert "swarm size 4" in out
        assert "swarm size 6" in out
