"""End-to-end CLI behavior via the click runner."""

import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from submax.cli import main
from submax.scg import Trajectory


@pytest.fixture
def runner():
    return CliRunner()


def gen_small_im(runner, tmp_path, **overrides):
    path = tmp_path / "zkc.json"
    args = [
        "gen", "im", "--zkc", "--cascades", "5", "--p", "0.5",
        "--partitions", "2", "--k", "3", "--seed", "1", "-o", str(path),
    ]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return path


class TestGen:
    def test_zkc_instance(self, runner, tmp_path):
        path = gen_small_im(runner, tmp_path)
        blob = json.loads(path.read_text())
        assert blob["family"] == "IM"
        assert blob["n"] == 34
        assert len(blob["payload"]["cascades"]) == 5
        assert blob["matroid"]["kind"] == "partition"
        assert blob["matroid"]["caps"] == [3, 3]

    def test_bipartite_instance(self, runner, tmp_path):
        path = tmp_path / "sbpl.json"
        result = runner.invoke(main, [
            "gen", "im", "--bipartite", "--nodes", "80", "--powerlaw",
            "--cascades", "4", "--partitions", "4", "--k", "1",
            "--seed", "2", "-o", str(path),
        ])
        assert result.exit_code == 0, result.output
        blob = json.loads(path.read_text())
        assert blob["n"] == 80
        # Four seed blocks of the left side plus the zero-cap right side.
        assert blob["matroid"]["caps"] == [1, 1, 1, 1, 0]

    def test_too_small_bipartite_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, [
            "gen", "im", "--bipartite", "--nodes", "3",
            "-o", str(tmp_path / "x.json"),
        ])
        assert result.exit_code == 2
        assert "too small" in result.output

    def test_missing_source_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["gen", "im"])
        assert result.exit_code == 2

    def test_gen_other_families(self, runner, tmp_path):
        for args, name in (
            (["gen", "sm", "--tokens", "6", "--partitions", "2"], "sm.json"),
            (["gen", "fl", "--facilities", "5", "--customers", "4"], "fl.json"),
            (["gen", "cn", "--nodes", "4", "--catalogue", "2"], "cn.json"),
        ):
            path = tmp_path / name
            result = runner.invoke(main, args + ["-o", str(path)])
            assert result.exit_code == 0, result.output
            assert path.exists()


class TestRunCompare:
    def test_sweep_produces_manifest_and_pareto(self, runner, tmp_path):
        inst = gen_small_im(runner, tmp_path)
        outdir = tmp_path / "out"
        result = runner.invoke(main, [
            "run", "-i", str(inst), "-e", "SAMP:2", "-e", "POLY:1",
            "-T", "10", "--seed", "3", "-o", str(outdir),
        ])
        assert result.exit_code == 0, result.output
        manifest = json.loads((outdir / "manifest.json").read_text())
        assert len(manifest["runs"]) == 2
        assert all(r["status"] == "ok" for r in manifest["runs"])
        for record in manifest["runs"]:
            traj = Trajectory.from_csv(outdir / record["csv"], n=34)
            assert traj.iterations == 10
            walls = [row.wall_ms for row in traj.rows]
            assert all(b >= a for a, b in zip(walls, walls[1:]))

        pareto = tmp_path / "pareto.csv"
        result = runner.invoke(main, [
            "compare", "-m", str(outdir / "manifest.json"),
            "-o", str(pareto),
        ])
        assert result.exit_code == 0, result.output
        lines = pareto.read_text().strip().splitlines()
        assert lines[0] == "estimator,param,utility,total_wall_ms"
        assert len(lines) == 3
        # SAMP rows come before POLY rows.
        assert lines[1].startswith("SAMP,2") and lines[2].startswith("POLY,1")

    def test_poly_reruns_bit_identical(self, runner, tmp_path):
        inst = gen_small_im(runner, tmp_path)
        texts = []
        for sub in ("a", "b"):
            outdir = tmp_path / sub
            result = runner.invoke(main, [
                "run", "-i", str(inst), "-e", "POLY:2", "-T", "12",
                "--seed", "5", "-o", str(outdir),
            ])
            assert result.exit_code == 0, result.output
            texts.append((outdir / "traj_POLY2_seed5.csv").read_text())
        strip = lambda text: [
            [c for j, c in enumerate(line.split(",")) if j != 1]
            for line in text.splitlines()
        ]
        assert strip(texts[0]) == strip(texts[1])

    def test_failed_run_recorded_not_fatal(self, runner, tmp_path):
        inst = gen_small_im(runner, tmp_path)
        outdir = tmp_path / "out"
        # EXACT cannot enumerate 34 nodes; SAMP still succeeds.
        result = runner.invoke(main, [
            "run", "-i", str(inst), "-e", "EXACT", "-e", "SAMP:1",
            "-T", "5", "-o", str(outdir),
        ])
        assert result.exit_code == 0, result.output
        manifest = json.loads((outdir / "manifest.json").read_text())
        by_label = {r["estimator"]: r for r in manifest["runs"]}
        assert by_label["EXACT"]["status"] == "failed"
        assert "enumeration limit" in by_label["EXACT"]["error"]
        assert by_label["SAMP"]["status"] == "ok"


class TestVerifyRoundOpt:
    def test_verify_margins_and_exit(self, runner, tmp_path):
        path = tmp_path / "sm.json"
        result = runner.invoke(main, [
            "gen", "sm", "--tokens", "8", "--partitions", "2",
            "--realizations", "3", "-o", str(path),
        ])
        assert result.exit_code == 0, result.output
        tsv = tmp_path / "margins.tsv"
        result = runner.invoke(main, [
            "verify", "-i", str(path), "-L", "1", "-L", "2", "-L", "3",
            "--points", "5", "-o", str(tsv),
        ])
        assert result.exit_code == 0, result.output
        lines = tsv.read_text().strip().splitlines()
        assert lines[0].startswith("z_id\tdegree")
        assert len(lines) == 1 + 3 * 3  # 3 realizations x 3 degrees

    def test_round_on_integral_trajectory(self, runner, tmp_path):
        path = tmp_path / "sm.json"
        runner.invoke(main, [
            "gen", "sm", "--tokens", "6", "--partitions", "2", "--k", "2",
            "-o", str(path),
        ])
        outdir = tmp_path / "out"
        result = runner.invoke(main, [
            "run", "-i", str(path), "-e", "EXACT", "-T", "8",
            "-o", str(outdir),
        ])
        assert result.exit_code == 0, result.output
        rounded = tmp_path / "set.json"
        result = runner.invoke(main, [
            "round", "-t", str(outdir / "traj_EXACT_seed0.csv"),
            "-i", str(path), "-o", str(rounded),
        ])
        assert result.exit_code == 0, result.output
        chosen = json.loads(rounded.read_text())
        assert isinstance(chosen, list) and len(chosen) <= 2

    def test_opt_modular_toy(self, runner, tmp_path):
        path = tmp_path / "sm.json"
        runner.invoke(main, [
            "gen", "sm", "--tokens", "5", "--partitions", "5", "--k", "2",
            "--seed", "4", "-o", str(path),
        ])
        result = runner.invoke(main, ["opt", "-i", str(path)])
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        blob = json.loads(path.read_text())
        values = np.array(blob["payload"]["values"]).mean(axis=0)
        top2 = sorted(np.argsort(-values)[:2].tolist())
        assert report["best_set"] == top2

    def test_missing_instance_exits_2(self, runner):
        result = runner.invoke(main, ["opt", "-i", "/nonexistent.json"])
        assert result.exit_code == 2
