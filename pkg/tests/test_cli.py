"""CLI subcommands and exit codes."""

import json

import pytest

from toolforge.cli import cli_main
from toolforge.episodes import load_episode
from toolforge.mesh import parse_mesh_text

from conftest import FIXTURES


def run_cli(*argv):
    return cli_main(list(argv))


class TestExitCodes:
    def test_no_args_usage(self, capsys):
        assert run_cli() == 2
        capsys.readouterr()

    def test_unknown_subcommand(self, capsys):
        assert run_cli("frobnicate") == 2
        capsys.readouterr()

    def test_missing_required_flag(self, capsys):
        assert run_cli("interpret") == 2
        capsys.readouterr()


class TestInterpret:
    def test_text_output(self, capsys, cake_scene_path):
        assert run_cli("interpret", "--scene", str(cake_scene_path)) == 0
        out = capsys.readouterr().out
        assert "knife" in out
        assert "tool_prompt" in out

    def test_csv_output(self, capsys, cake_scene_path):
        assert run_cli("interpret", "--scene", str(cake_scene_path), "--format", "csv") == 0
        out = capsys.readouterr().out
        assert "tool_name" in out and "knife" in out

    def test_missing_scene_exits_1(self, capsys, tmp_path):
        assert run_cli("interpret", "--scene", str(tmp_path / "none.json")) == 1
        assert "error" in capsys.readouterr().err

    def test_no_target_exits_1(self, capsys, scenes_dir):
        assert run_cli("interpret", "--scene", str(scenes_dir / "no_target.json")) == 1
        capsys.readouterr()


class TestGenmesh:
    def test_writes_mesh_file(self, tmp_path, capsys):
        out = tmp_path / "knife.obj"
        code = run_cli(
            "genmesh", "--prompt", "Create a 3D model of a knife", "--mesh-out", str(out)
        )
        assert code == 0
        capsys.readouterr()
        mesh = parse_mesh_text(out.read_text(encoding="utf-8"))
        assert len(mesh.faces) > 0

    def test_stdout_mesh(self, capsys):
        assert run_cli("genmesh", "--prompt", "Create a 3D model of a knife") == 0
        out = capsys.readouterr().out
        assert out.startswith("v ")


class TestMesh:
    def test_validate_good_mesh_exit_0(self, capsys):
        path = FIXTURES / "meshes" / "cube.obj"
        assert run_cli("mesh", "validate", str(path)) == 0
        assert "watertight" in capsys.readouterr().out

    def test_validate_broken_mesh_exit_1(self, capsys, tmp_path):
        path = tmp_path / "open.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", encoding="utf-8")
        assert run_cli("mesh", "validate", str(path)) == 1
        capsys.readouterr()

    def test_scale_writes_output(self, capsys, tmp_path):
        out = tmp_path / "scaled.obj"
        code = run_cli(
            "mesh", "scale", str(FIXTURES / "meshes" / "cube.obj"),
            "--target-size-mm", "40", "--fit-ratio", "1.5", "--mesh-out", str(out),
        )
        assert code == 0
        capsys.readouterr()
        from toolforge.mesh import max_extent

        assert max_extent(parse_mesh_text(out.read_text())) == pytest.approx(60.0)


class TestSlice:
    def test_slice_cube(self, capsys, tmp_path):
        out = tmp_path / "cube.gcode"
        code = run_cli(
            "slice", str(FIXTURES / "meshes" / "cube.obj"), "--gcode-out", str(out)
        )
        assert code == 0
        capsys.readouterr()
        text = out.read_text(encoding="utf-8")
        assert text.startswith("; toolforge print")
        assert "G1" in text


class TestActRun:
    def test_expert_succeeds_exit_0(self, capsys, tmp_path):
        save = tmp_path / "ep.json"
        code = run_cli("act", "run", "--task", "cut", "--save", str(save))
        assert code == 0
        capsys.readouterr()
        episode = load_episode(save)
        assert episode.success

    def test_null_fails_exit_1(self, capsys):
        assert run_cli("act", "run", "--task", "cut", "--policy", "null") == 1
        capsys.readouterr()

    def test_custom_scene(self, capsys, cake_scene_path):
        code = run_cli("act", "run", "--task", "pick_place", "--scene", str(cake_scene_path))
        assert code == 0
        capsys.readouterr()


class TestRecordAndReport:
    def test_record_then_report(self, capsys, tmp_path):
        out_dir = tmp_path / "dataset"
        code = run_cli("record", "--task", "both", "--count", "2", "--output", str(out_dir))
        assert code == 0
        capsys.readouterr()
        files = sorted(out_dir.glob("*.json"))
        names = [f.name for f in files]
        assert "manifest.json" in names
        assert len([n for n in names if n != "manifest.json"]) == 4

        code = run_cli("report", "--dataset", str(out_dir))
        assert code == 0
        out = capsys.readouterr().out
        assert "episode_count" in out and "4" in out

    def test_report_csv(self, capsys, tmp_path):
        out_dir = tmp_path / "dataset"
        run_cli("record", "--task", "cut", "--count", "1", "--output", str(out_dir))
        capsys.readouterr()
        assert run_cli("report", "--dataset", str(out_dir), "--format", "csv") == 0
        out = capsys.readouterr().out
        assert "episode_count" in out


class TestEval:
    def test_eval_seen_text(self, capsys, tmp_path):
        code = run_cli(
            "eval", "--task", "cut", "--categories", "seen", "--n", "3",
            "--output", str(tmp_path),
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "100% (3/3)" in out

    def test_eval_report_file(self, capsys, tmp_path):
        report = tmp_path / "report.csv"
        code = run_cli(
            "eval", "--task", "cut", "--categories", "seen,physical", "--n", "2",
            "--format", "csv", "--report-out", str(report), "--output", str(tmp_path),
        )
        assert code == 0
        capsys.readouterr()
        assert "section,name" in report.read_text(encoding="utf-8")

    def test_eval_bad_category_exit_1(self, capsys, tmp_path):
        code = run_cli(
            "eval", "--task", "cut", "--categories", "temporal", "--output", str(tmp_path)
        )
        assert code == 1
        capsys.readouterr()


class TestPipeline:
    def test_pipeline_success_exit_0(self, capsys, cake_scene_path, tmp_path):
        code = run_cli(
            "pipeline", "--scene", str(cake_scene_path), "--task", "cut",
            "--output", str(tmp_path / "out"),
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "success" in out

    def test_pipeline_failure_exit_1(self, capsys, scenes_dir, tmp_path):
        code = run_cli(
            "pipeline", "--scene", str(scenes_dir / "mug.json"), "--task", "cut",
            "--output", str(tmp_path / "out"),
        )
        assert code == 1
        capsys.readouterr()

    def test_pipeline_with_config_file(self, capsys, cake_scene_path, tmp_path):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("[pipeline]\nconfig_version = 1\nfit_ratio = 2.0\n", encoding="utf-8")
        code = run_cli(
            "pipeline", "--scene", str(cake_scene_path), "--task", "cut",
            "--config", str(cfg), "--output", str(tmp_path / "out"),
        )
        assert code == 0
        capsys.readouterr()
        from toolforge.mesh import max_extent

        mesh = parse_mesh_text((tmp_path / "out" / "knife.obj").read_text())
        assert max_extent(mesh) == pytest.approx(160.0, rel=1e-9)
