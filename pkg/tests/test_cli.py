"""Command-line behaviour: artifacts on disk, exit codes, determinism."""

import subprocess
import sys
from importlib.resources import files

import pytest

from turfbbn.cli import main
from turfbbn.netdoc import deserialize_network_with_strengths
from turfbbn.report import REVERSE_COLUMNS, SCENARIO_COLUMNS

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

FORWARD_FILES = ("scenario_report.tsv", "scenario_report.txt", "scenario_report.png")
REVERSE_FILES = ("reverse_report.tsv", "reverse_report.txt", "reverse_report.png")


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, standin_paths):
    """One learn run whose outputs the command tests inspect."""
    root = tmp_path_factory.mktemp("cli")
    out = root / "network.json"
    code = main(["learn", str(standin_paths["ma"]), str(standin_paths["sizes"]),
                 "--out", str(out)])
    assert code == 0
    presets = root / "presets.scenarios"
    presets.write_text(
        (files("turfbbn") / "data" / "table1.scenarios").read_text(),
        encoding="utf-8")
    return {"root": root, "network": out, "presets": presets}


class TestLearn:
    def test_writes_network_dot_and_figure(self, workspace):
        root = workspace["root"]
        assert workspace["network"].exists()
        assert (root / "network.dot").read_text().startswith("digraph")
        assert (root / "network.png").read_bytes().startswith(PNG_MAGIC)

    def test_network_round_trips_with_strengths(self, workspace):
        network, strengths = deserialize_network_with_strengths(
            workspace["network"].read_text())
        assert len(network.dag.variables) == 9
        names = {v.name for v in network.dag.variables}
        assert {"illegal_proportion", "relative_size"} <= names
        assert strengths is not None
        assert set(strengths) == set(network.dag.edges)

    def test_missing_input_exits_one(self, tmp_path, capsys):
        code = main(["learn", str(tmp_path / "nope.csv"),
                     str(tmp_path / "also_nope.csv")])
        assert code == 1
        assert "nope.csv" in capsys.readouterr().err


class TestScenariosCommand:
    def test_reports_and_figures(self, workspace, tmp_path):
        code = main(["scenarios", str(workspace["network"]),
                     str(workspace["presets"]), "--out-dir", str(tmp_path)])
        assert code == 0
        for name in FORWARD_FILES + REVERSE_FILES:
            assert (tmp_path / name).exists(), name
        tsv = (tmp_path / "scenario_report.tsv").read_text()
        assert tsv.splitlines()[0] == "\t".join(SCENARIO_COLUMNS)
        assert len(tsv.splitlines()) == 8
        reverse = (tmp_path / "reverse_report.tsv").read_text()
        assert reverse.splitlines()[1] == "\t".join(REVERSE_COLUMNS)
        assert (tmp_path / "scenario_report.png").read_bytes().startswith(PNG_MAGIC)

    def test_no_reverse_flag(self, workspace, tmp_path):
        code = main(["scenarios", str(workspace["network"]),
                     str(workspace["presets"]), "--out-dir", str(tmp_path),
                     "--no-reverse"])
        assert code == 0
        for name in REVERSE_FILES:
            assert not (tmp_path / name).exists()

    def test_failing_row_exits_one_but_still_reports(self, workspace, tmp_path):
        mixed = tmp_path / "mixed.scenarios"
        mixed.write_text(
            "[ghost]\nevent: salinity in {high}\n"
            "[fine]\nevent: relative_size in {gt_0.59}\n",
            encoding="utf-8")
        code = main(["scenarios", str(workspace["network"]), str(mixed),
                     "--out-dir", str(tmp_path)])
        assert code == 1
        tsv = (tmp_path / "scenario_report.tsv").read_text()
        assert "UnknownVariable" in tsv
        assert "fine" in tsv

    def test_threshold_must_sit_on_a_cut(self, workspace, tmp_path, capsys):
        code = main(["scenarios", str(workspace["network"]),
                     str(workspace["presets"]), "--out-dir", str(tmp_path),
                     "--e-hat-threshold", "0.55"])
        assert code == 1
        assert "ThresholdNotACutPoint" in capsys.readouterr().err

    def test_alternate_cut_threshold_accepted(self, workspace, tmp_path):
        code = main(["scenarios", str(workspace["network"]),
                     str(workspace["presets"]), "--out-dir", str(tmp_path),
                     "--e-hat-threshold", "0.5"])
        assert code == 0

    def test_unparseable_scenario_file_exits_one(self, workspace, tmp_path, capsys):
        broken = tmp_path / "broken.scenarios"
        broken.write_text("event: before any header\n", encoding="utf-8")
        code = main(["scenarios", str(workspace["network"]), str(broken),
                     "--out-dir", str(tmp_path)])
        assert code == 1
        assert "ParseError" in capsys.readouterr().err


class TestExportDot:
    def test_stdout(self, workspace, capsys):
        assert main(["export-dot", str(workspace["network"])]) == 0
        out = capsys.readouterr().out
        assert out.startswith("digraph")
        assert '"illegal_proportion"' in out

    def test_to_file(self, workspace, tmp_path, capsys):
        target = tmp_path / "net.dot"
        assert main(["export-dot", str(workspace["network"]),
                     "--out", str(target)]) == 0
        assert target.read_text().startswith("digraph")
        assert "wrote" in capsys.readouterr().out


class TestSynthData:
    def test_deterministic_files(self, tmp_path):
        for tag in ("a", "b"):
            code = main(["synth-data",
                         "--ma-csv", str(tmp_path / f"ma_{tag}.csv"),
                         "--sizes-csv", str(tmp_path / f"sizes_{tag}.csv"),
                         "--coves", "4", "--areas", "6"])
            assert code == 0
        assert (tmp_path / "ma_a.csv").read_bytes() == (tmp_path / "ma_b.csv").read_bytes()
        assert (tmp_path / "sizes_a.csv").read_bytes() == (tmp_path / "sizes_b.csv").read_bytes()

    def test_bad_cohort_shape_exits_one(self, tmp_path, capsys):
        code = main(["synth-data", "--ma-csv", str(tmp_path / "m.csv"),
                     "--sizes-csv", str(tmp_path / "s.csv"), "--coves", "0"])
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestEntryPoint:
    def test_no_arguments_shows_usage(self, capsys):
        # same exit code as the standalone runner: bare invocation is a usage error
        assert main([]) == 1
        streams = capsys.readouterr()
        assert "Usage" in streams.out + streams.err

    def test_unknown_command(self, capsys):
        assert main(["transmogrify"]) == 1

    def test_internal_errors_map_to_two(self, standin_paths, monkeypatch, capsys):
        import turfbbn.cli as cli_module

        def boom(path):
            raise RuntimeError("wires crossed")

        monkeypatch.setattr(cli_module, "ingest_ma_csv", boom)
        code = main(["learn", str(standin_paths["ma"]),
                     str(standin_paths["sizes"])])
        assert code == 2
        assert "internal error" in capsys.readouterr().err

    def test_module_is_executable(self):
        proc = subprocess.run(
            [sys.executable, "-m", "turfbbn.cli", "--help"],
            capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0
        assert "learn" in proc.stdout and "scenarios" in proc.stdout
