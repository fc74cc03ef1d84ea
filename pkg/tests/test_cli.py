import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocallab.cli import (
    EXIT_CONFIG,
    EXIT_HYPOTHESES,
    EXIT_OK,
    Scenario,
    load_scenario,
    main,
    parse_scenario_text,
    run_scenario,
)
from nonlocallab.errors import ConfigError

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "..", "scenarios")


def write_cfg(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


GRONWALL_CFG = """
name=gw
mode=gronwall
gronwall.series=zero
gronwall.rate=2.0
gronwall.steps=50
"""

KERNEL_CFG = """
name=kr
mode=kernel-report
kernel.family=box
kernel.halfwidth=1.0
"""


class TestParsing:
    def test_round_trip(self):
        sc = parse_scenario_text(GRONWALL_CFG)
        again = parse_scenario_text(sc.serialize())
        assert sc == again

    def test_shipped_scenarios_round_trip(self):
        for fname in sorted(os.listdir(SCENARIO_DIR)):
            sc = load_scenario(os.path.join(SCENARIO_DIR, fname))
            assert parse_scenario_text(sc.serialize()) == sc

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_scenario_text(GRONWALL_CFG + "\nkernel.family=box\n")

    def test_missing_mode_rejected(self):
        with pytest.raises(ConfigError):
            parse_scenario_text("name=x\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_scenario_text("mode=gronwall\nmode=gronwall\n")

    def test_override_applied(self):
        sc = parse_scenario_text(GRONWALL_CFG, overrides=["gronwall.rate=5.0"])
        assert sc.get_float("gronwall.rate") == 5.0

    def test_comments_and_blank_lines(self):
        sc = parse_scenario_text("# a comment\n\n" + GRONWALL_CFG)
        assert sc.mode == "gronwall"

    @given(st.sampled_from(["gronwall", "kernel-report", "solve"]),
           st.text(alphabet="abcdefghij-", min_size=1, max_size=12))
    @settings(max_examples=25, deadline=None)
    def test_arbitrary_names_survive_round_trip(self, mode, name):
        text = f"name={name}\nmode=gronwall\n"
        sc = parse_scenario_text(text)
        assert parse_scenario_text(sc.serialize()).name == name.strip()


class TestExitCodes:
    def test_gronwall_ok(self, tmp_path):
        path = write_cfg(tmp_path, GRONWALL_CFG)
        assert run_scenario(path, str(tmp_path / "out")) == EXIT_OK

    def test_gronwall_premise_failure(self, tmp_path):
        path = write_cfg(tmp_path, GRONWALL_CFG)
        code = run_scenario(path, str(tmp_path / "out"),
                            overrides=["gronwall.series=linear"])
        assert code == EXIT_HYPOTHESES

    def test_kernel_report_ok(self, tmp_path):
        path = write_cfg(tmp_path, KERNEL_CFG)
        assert run_scenario(path, str(tmp_path / "out")) == EXIT_OK

    def test_missing_file_is_config_error(self, tmp_path):
        assert run_scenario(str(tmp_path / "nope.cfg")) == EXIT_CONFIG

    def test_solve_missing_kernel_is_config_error(self, tmp_path):
        path = write_cfg(tmp_path, "name=s\nmode=solve\noperator.name=heat\n")
        assert run_scenario(path, str(tmp_path / "out")) == EXIT_CONFIG

    def test_unknown_key_is_config_error(self, tmp_path):
        path = write_cfg(tmp_path, GRONWALL_CFG + "bogus.key=1\n")
        assert run_scenario(path, str(tmp_path / "out")) == EXIT_CONFIG

    def test_main_entry_point(self, tmp_path):
        path = write_cfg(tmp_path, GRONWALL_CFG)
        assert main(["run", path, "--out", str(tmp_path / "out")]) == EXIT_OK

    def test_counterexample_inverted_semantics(self, tmp_path):
        path = write_cfg(tmp_path, """
name=cex
mode=counterexample
kernel.family=box
kernel.halfwidth=1.0
counterexample.npoints=1025
counterexample.t_final=0.002
counterexample.delta=0.5
""")
        # overshoot cannot reach 1.5 in two steps: reproduction fails
        assert run_scenario(path, str(tmp_path / "out")) == EXIT_HYPOTHESES


class TestReports:
    def test_report_files_written(self, tmp_path):
        path = write_cfg(tmp_path, KERNEL_CFG)
        out = tmp_path / "out"
        assert run_scenario(path, str(out)) == EXIT_OK
        report = (out / "report.kv").read_text()
        assert "condition=" in report and "pass=" in report
        assert (out / "summary.txt").exists()

    def test_report_line_format(self, tmp_path):
        path = write_cfg(tmp_path, KERNEL_CFG)
        out = tmp_path / "out"
        run_scenario(path, str(out))
        for line in (out / "report.kv").read_text().splitlines():
            parts = line.split("; ")
            assert parts[0].startswith("condition=")
            assert parts[1].startswith("ref=")
            assert parts[2].startswith("pass=")
            assert parts[3].startswith("margin=")

    def test_determinism(self, tmp_path):
        path = write_cfg(tmp_path, KERNEL_CFG)
        a, b = tmp_path / "a", tmp_path / "b"
        run_scenario(path, str(a))
        run_scenario(path, str(b))
        assert (a / "report.kv").read_bytes() == (b / "report.kv").read_bytes()

    def test_solve_writes_csv(self, tmp_path):
        path = write_cfg(tmp_path, """
name=s
mode=solve
kernel.family=gaussian
kernel.sigma=1.0
grid.halfwidth=10.0
grid.npoints=65
operator.name=heat
profile.name=gaussian-bump
solver.dt=0.01
solver.t_final=0.05
""")
        out = tmp_path / "out"
        assert run_scenario(path, str(out)) == EXIT_OK
        assert (out / "solution" / "index.csv").exists()
        assert (out / "solution" / "level_00000.csv").exists()
