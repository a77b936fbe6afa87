"""Command line behavior: subcommands, exit codes, file round trips."""

import subprocess
import sys

import pytest

from capkc.assignment import read_assignment
from capkc.cli import main
from capkc.graph_core import (
    HARD,
    WeightedMetricInstance,
    read_instance,
    write_instance,
)
from capkc.x_rounding import parse_solution_text, read_solution


def path_instance(tmp_path, caps, k, name="inst.txt"):
    n = len(caps)
    inst = WeightedMetricInstance.from_weighted_edges(
        n, [(i, i + 1, 1) for i in range(n - 1)], caps, k, HARD
    )
    target = tmp_path / name
    write_instance(inst, target)
    return target


class TestSolve:
    def test_path_needs_radius_two(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5, 5, 5], 1)
        out = tmp_path / "sol.txt"
        assert main(["solve", str(inst), "--output", str(out)]) == 0
        report = capsys.readouterr().out
        assert "status: solved" in report
        assert "threshold: 2" in report
        assert "stretch: 1" in report
        assert "radius: 2" in report
        sol = read_solution(out)
        assert sol.centers == {2: 1}
        assert main(["verify", str(inst), str(out)]) == 0
        assert capsys.readouterr().out.startswith("valid:")

    def test_solution_to_stdout_when_no_output(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5], 1)
        assert main(["solve", str(inst)]) == 0
        report = capsys.readouterr().out
        tail = report[report.index("solution ") :]
        assert parse_solution_text(tail).open_count() == 1

    def test_infeasible_reports_component_needs(self, tmp_path, capsys):
        assert main(["gen", "fig1", "--out", str(tmp_path / "f.txt")]) == 0
        code = main(["solve", str(tmp_path / "f.txt")])
        assert code == 2
        report = capsys.readouterr().out
        assert "status: infeasible" in report
        assert report.count("needs 2 centers") == 2

    def test_exact_mode(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5, 5, 5], 1)
        assert main(["solve", str(inst), "--mode", "exact"]) == 0
        report = capsys.readouterr().out
        assert "method: exact" in report
        assert "radius: 2" in report

    def test_stretch_assertion_failure_exits_one(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5, 5, 5], 1)
        code = main(["solve", str(inst), "--max-stretch-assert", "0"])
        assert code == 1
        assert "stretch assertion failed" in capsys.readouterr().err

    def test_emits_certificate_and_lp_dump(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [2, 2, 2, 2, 2, 2], 3)
        cert = tmp_path / "cert.txt"
        dump = tmp_path / "lp.txt"
        code = main(
            [
                "solve",
                str(inst),
                "--output",
                str(tmp_path / "s.txt"),
                "--emit-certificate",
                str(cert),
                "--emit-lp-dump",
                str(dump),
            ]
        )
        assert code == 0
        assert cert.read_text().startswith("# component 0 1 2 3 4 5")
        assert dump.read_text()
        capsys.readouterr()

    def test_seed_recorded(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5], 1)
        assert main(["solve", str(inst), "--seed", "42"]) == 0
        assert "seed: 42" in capsys.readouterr().out

    def test_soft_mode_runs(self, tmp_path, capsys):
        target = tmp_path / "r.txt"
        assert (
            main(
                [
                    "gen", "random", "--n", "10", "--k", "3",
                    "--cap-lo", "4", "--cap-hi", "4",
                    "--seed", "3", "--mode", "soft", "--out", str(target),
                ]
            )
            == 0
        )
        out = tmp_path / "s.txt"
        assert main(["solve", str(target), "--output", str(out)]) == 0
        assert main(["verify", str(target), str(out)]) == 0
        capsys.readouterr()

    def test_k_beyond_vertices_infeasible(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5], 4)
        assert main(["solve", str(inst)]) == 2
        assert "exceeds" in capsys.readouterr().out

    def test_missing_file(self, capsys):
        assert main(["solve", "no-such-file.txt"]) == 3
        assert "error:" in capsys.readouterr().err

    def test_malformed_instance_reports_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("instance 3 1 hard\nedge 0 zero 1\n")
        assert main(["solve", str(bad)]) == 3
        err = capsys.readouterr().err
        assert "error:" in err and "line" in err


class TestVerify:
    def test_tampered_solution_rejected(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5, 5, 5], 1)
        out = tmp_path / "sol.txt"
        assert main(["solve", str(inst), "--output", str(out)]) == 0
        text = out.read_text().replace("assign 4 2", "assign 4 0")
        (tmp_path / "bad.txt").write_text(text)
        assert main(["verify", str(inst), str(tmp_path / "bad.txt")]) == 2
        output = capsys.readouterr().out
        assert "invalid:" in output

    def test_junk_solution_file(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5], 1)
        (tmp_path / "junk.txt").write_text("hello\n")
        assert main(["verify", str(inst), str(tmp_path / "junk.txt")]) == 3
        capsys.readouterr()


class TestGen:
    def test_fig1_witness_round_trip(self, tmp_path, capsys):
        inst_path = tmp_path / "f.txt"
        wit_path = tmp_path / "w.txt"
        code = main(
            [
                "gen", "fig1",
                "--out", str(inst_path),
                "--witness-out", str(wit_path),
            ]
        )
        assert code == 0
        inst = read_instance(inst_path)
        assert inst.vertex_count == 12
        witness = read_assignment(wit_path, 12)
        assert witness.sum_y() == 3
        capsys.readouterr()

    def test_gap_instance_size(self, tmp_path, capsys):
        target = tmp_path / "g.txt"
        assert main(["gen", "gap", "--k", "24", "--out", str(target)]) == 0
        assert read_instance(target).vertex_count == 523
        capsys.readouterr()

    def test_x3c(self, tmp_path, capsys):
        target = tmp_path / "x.txt"
        code = main(
            [
                "gen", "x3c",
                "--universe", "a,b,c",
                "--sets", "a,b,c",
                "--out", str(target),
            ]
        )
        assert code == 0
        assert read_instance(target).vertex_count == 12
        capsys.readouterr()

    def test_witness_out_without_witness(self, tmp_path, capsys):
        code = main(
            [
                "gen", "x3c",
                "--universe", "a,b,c",
                "--sets", "a,b,c",
                "--out", str(tmp_path / "x.txt"),
                "--witness-out", str(tmp_path / "w.txt"),
            ]
        )
        assert code == 3
        assert "no witness" in capsys.readouterr().err

    def test_stdout_instance(self, capsys):
        assert main(["gen", "fig1"]) == 0
        assert capsys.readouterr().out.strip()


class TestOracle:
    def test_exact_search(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5, 5, 5], 1)
        assert main(["oracle", str(inst)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("radius: 2")

    def test_fixed_radius_query(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5, 5, 5], 1)
        assert main(["oracle", str(inst), "--radius", "2"]) == 0
        capsys.readouterr()
        assert main(["oracle", str(inst), "--radius", "1"]) == 2
        assert "infeasible at radius 1" in capsys.readouterr().out

    def test_gap_demo_infeasible_everywhere(self, tmp_path, capsys):
        assert main(["gen", "fig1", "--out", str(tmp_path / "f.txt")]) == 0
        assert main(["oracle", str(tmp_path / "f.txt")]) == 2
        assert "infeasible at every radius" in capsys.readouterr().out

    def test_bad_radius_token(self, tmp_path, capsys):
        inst = path_instance(tmp_path, [5, 5, 5], 1)
        assert main(["oracle", str(inst), "--radius", "fast"]) == 3
        assert "bad --radius" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "capkc", "gen", "fig1"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.strip()
