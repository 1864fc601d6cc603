import json
import math

import numpy as np
import pytest

from mvmds import Ensemble, fileio
from mvmds.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_line_spaces(tmp_path):
    x = tmp_path / "x.csv"
    y = tmp_path / "y.csv"
    fileio.write_distance_csv(x, np.array([[0.0, 1.0], [1.0, 0.0]]))
    fileio.write_distance_csv(y, np.array([[0.0, 2.0], [2.0, 0.0]]))
    return str(x), str(y)


class TestGh:
    def test_line_spaces(self, tmp_path, capsys):
        x, y = write_line_spaces(tmp_path)
        code, out, _ = run(["gh", "--x", x, "--y", y], capsys)
        assert code == 0
        assert "mgh = 0.5" in out

    def test_capacity_guard_exit_code(self, tmp_path, capsys):
        big = tmp_path / "big.csv"
        fileio.write_distance_csv(big, np.zeros((16, 16)))
        code, _, err = run(["gh", "--x", str(big), "--y", str(big)], capsys)
        assert code == 3
        assert "guard" in err

    def test_json_output(self, tmp_path, capsys):
        x, y = write_line_spaces(tmp_path)
        out_path = tmp_path / "gh.json"
        code, _, _ = run(["gh", "--x", x, "--y", y, "--out", str(out_path)], capsys)
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["mgh"] == 0.5


class TestSrgw:
    def test_two_point_value_printed(self, tmp_path, capsys):
        y, x = write_line_spaces(tmp_path)  # x: d=2, y: d=1
        code, out, _ = run(["srgw", "--x", x, "--y", y], capsys)
        assert code == 0
        assert "0.353553" in out

    def test_coupling_files(self, tmp_path, capsys):
        x, y = write_line_spaces(tmp_path)
        prefix = str(tmp_path / "cpl")
        code, _, _ = run(["srgw", "--x", x, "--y", y, "--out", prefix], capsys)
        assert code == 0
        plan, _ = fileio.read_distance_csv(prefix + ".coupling.csv")
        assert plan.shape == (2, 2)
        sidecar = json.loads((tmp_path / "cpl.json").read_text())
        assert sidecar["monge_map"] is not None
        trace = sidecar["objective_trace"]
        assert all(a >= b for a, b in zip(trace, trace[1:]))


class TestSynthAndEmbed:
    def test_flow(self, tmp_path, capsys):
        data = tmp_path / "circ.csv"
        code, _, _ = run(["synth", "--kind", "circle", "--n", "10", "--radius",
                          "2.0", "--seed", "3", "--out", str(data)], capsys)
        assert code == 0
        prefix = str(tmp_path / "emb")
        code, out, _ = run(["embed", "--input", str(data), "--manifold", "circle:r=1",
                            "--learn-scale", "--grid", "50", "--lr", "0.02",
                            "--max-steps", "400", "--seed", "42",
                            "--out", prefix], capsys)
        assert code == 0
        assert "dis2 =" in out
        ids, coords, circ, scale = fileio.read_embedding_csv(prefix + ".csv")
        assert len(ids) == 10 and circ is not None
        meta = json.loads((tmp_path / "emb.meta.json").read_text())
        assert meta["seed"] == 42
        assert (tmp_path / "emb.svg").exists()
        hist = (tmp_path / "emb.hist.csv").read_text().splitlines()
        assert len(hist) == 21

        svg_out = tmp_path / "replot.svg"
        code, _, _ = run(["plot", "--embedding", prefix + ".csv", "--manifold",
                          "circle:r=1", "--out", str(svg_out)], capsys)
        assert code == 0
        assert svg_out.read_text().startswith("<svg ")

    def test_sphere_embed_three_coordinates(self, tmp_path, capsys):
        data = tmp_path / "sph.csv"
        run(["synth", "--kind", "sphere", "--n", "8", "--radius", "6371",
             "--seed", "1", "--out", str(data)], capsys)
        prefix = str(tmp_path / "emb_s")
        code, _, _ = run(["embed", "--input", str(data), "--manifold",
                          "sphere:r=6371", "--lr", "0.1", "--grid", "40",
                          "--max-steps", "200", "--seed", "0", "--out", prefix], capsys)
        assert code == 0
        _, coords, circ, _ = fileio.read_embedding_csv(prefix + ".csv")
        assert coords.shape == (8, 3)
        assert circ is None

    def test_missing_input_is_exit_2(self, tmp_path, capsys):
        code, _, err = run(["embed", "--input", str(tmp_path / "nope.csv"),
                            "--manifold", "circle:r=1", "--seed", "0",
                            "--out", str(tmp_path / "x")], capsys)
        assert code == 2

    def test_malformed_csv_reports_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("0,1\n1,zero\n")
        code, _, err = run(["embed", "--input", str(bad), "--manifold",
                            "circle:r=1", "--seed", "0",
                            "--out", str(tmp_path / "x")], capsys)
        assert code == 2
        assert "line 2" in err

    def test_rotated_synth(self, tmp_path, capsys):
        data = tmp_path / "rot.csv"
        code, out, _ = run(["synth", "--kind", "rotated", "--anchors", "6",
                            "--samples", "14", "--seed", "2", "--out", str(data)],
                           capsys)
        assert code == 0
        D, _ = fileio.read_distance_csv(data)
        assert D.shape == (14, 14)


class TestRedistrictCommand:
    def make_plans(self, tmp_path):
        rng = np.random.default_rng(0)
        xs, ys = np.meshgrid(np.arange(4), np.arange(4), indexing="ij")
        xs, ys = xs.ravel(), ys.ravel()
        plans = []
        for _ in range(12):
            ang = rng.uniform(0, math.pi)
            proj = xs * math.cos(ang) + ys * math.sin(ang)
            lab = np.where(proj <= np.median(proj), 1, 2)
            if lab.min() == lab.max():
                lab[0] = 3 - lab[0]
            plans.append(lab)
        path = tmp_path / "plans.csv"
        fileio.write_plans_csv(path, Ensemble(np.array(plans)))
        return str(path)

    def test_pipeline_outputs(self, tmp_path, capsys):
        plans = self.make_plans(tmp_path)
        prefix = str(tmp_path / "rd")
        code, out, _ = run(["redistrict", "--plans", plans, "--grid", "40",
                            "--max-steps", "200", "--seed", "7",
                            "--out", prefix], capsys)
        assert code == 0
        manifest = json.loads((tmp_path / "rd.manifest.json").read_text())
        assert manifest["n_arcs"] == 8
        listed = {a["arc_index"]: a for a in manifest["arcs"]}
        assert set(listed) == set(range(8))
        for arc in manifest["arcs"]:
            if arc["file"] is not None:
                arc_path = tmp_path / arc["file"]
                lines = arc_path.read_text().splitlines()
                assert lines[0] == "unit_id,fraction"
                assert len(lines) == 17
        assert (tmp_path / "rd.svg").exists()
        assert (tmp_path / "rd.embedding.csv").exists()
