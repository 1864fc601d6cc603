import numpy as np
import pytest

from mvmds import Ensemble, ParseError
from mvmds import fileio

from conftest import euclidean_metric


class TestDistanceCsv:
    def test_roundtrip_without_labels(self, rng, tmp_path):
        D = euclidean_metric(rng, 5)
        path = tmp_path / "d.csv"
        fileio.write_distance_csv(path, D)
        back, labels = fileio.read_distance_csv(path)
        assert labels is None
        assert np.array_equal(back, D)

    def test_roundtrip_with_labels(self, rng, tmp_path):
        D = euclidean_metric(rng, 3)
        path = tmp_path / "d.csv"
        fileio.write_distance_csv(path, D, labels=("a", "b", "c"))
        back, labels = fileio.read_distance_csv(path)
        assert labels == ("a", "b", "c")
        assert np.array_equal(back, D)

    def test_full_precision(self, tmp_path):
        D = np.array([[0.0, 1 / 3], [1 / 3, 0.0]])
        path = tmp_path / "d.csv"
        fileio.write_distance_csv(path, D)
        back, _ = fileio.read_distance_csv(path)
        assert back[0, 1] == D[0, 1]

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n1,zero\n")
        with pytest.raises(ParseError, match="line 2"):
            fileio.read_distance_csv(path)

    def test_nonsquare_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1,2\n1,0,1\n")
        with pytest.raises(ParseError):
            fileio.read_distance_csv(path)


class TestWeightsFile:
    def test_read(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("0.25\n0.75\n")
        assert np.array_equal(fileio.read_weights_file(path), [0.25, 0.75])

    def test_bad_value(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("0.5\nhuh\n")
        with pytest.raises(ParseError, match="line 2"):
            fileio.read_weights_file(path)


class TestPlansCsv:
    def test_roundtrip(self, tmp_path):
        E = Ensemble(np.array([[1, 2, 2], [2, 1, 1]]),
                     unit_ids=("a", "b", "c"), plan_ids=("p0", "p1"))
        path = tmp_path / "plans.csv"
        fileio.write_plans_csv(path, E)
        back = fileio.read_plans_csv(path)
        assert np.array_equal(back.assignments, E.assignments)
        assert back.unit_ids == E.unit_ids
        assert back.plan_ids == E.plan_ids

    def test_header_without_id_column(self, tmp_path):
        path = tmp_path / "plans.csv"
        path.write_text("a,b\nplan0,1,2\nplan1,2,1\n")
        E = fileio.read_plans_csv(path)
        assert E.unit_ids == ("a", "b")
        assert E.plan_ids == ("plan0", "plan1")

    def test_bad_label(self, tmp_path):
        path = tmp_path / "plans.csv"
        path.write_text("plan_id,a,b\np0,1,x\np1,2,1\n")
        with pytest.raises(ParseError, match="line 2"):
            fileio.read_plans_csv(path)


class TestEmbeddingCsv:
    def test_roundtrip_circle(self, tmp_path):
        path = tmp_path / "emb.csv"
        coords = np.array([[0.5], [1.5], [3.0]])
        circ = np.array([0.1, 0.2, 0.3])
        fileio.write_embedding_csv(path, ["x", "y", "z"], coords, 2.5, circular=circ)
        ids, back, circ_back, scale = fileio.read_embedding_csv(path)
        assert ids == ["x", "y", "z"]
        assert np.array_equal(back, coords)
        assert np.array_equal(circ_back, circ)
        assert scale == 2.5

    def test_roundtrip_sphere(self, tmp_path):
        path = tmp_path / "emb.csv"
        coords = np.random.default_rng(0).normal(size=(4, 3))
        fileio.write_embedding_csv(path, list("abcd"), coords, 6371.0)
        ids, back, circ, scale = fileio.read_embedding_csv(path)
        assert circ is None
        assert np.array_equal(back, coords)
        assert scale == 6371.0


class TestHistogram:
    def test_counts_over_unit_interval(self):
        counts = fileio.histogram_counts([0.0, 0.049, 0.05, 0.951, 0.999], bins=20)
        assert counts.sum() == 5
        assert counts[0] == 2 and counts[1] == 1 and counts[19] == 2

    def test_csv_format(self, tmp_path):
        path = tmp_path / "h.csv"
        fileio.write_histogram_csv(path, [0.0, 0.5], bins=4)
        lines = path.read_text().splitlines()
        assert lines[0] == "bin_start,bin_end,count"
        assert lines[1].endswith(",1")
        assert len(lines) == 5


class TestSvg:
    def test_circle_scatter_stable_and_wellformed(self):
        a = fileio.svg_circle_scatter([0.0, 0.25, 0.5])
        b = fileio.svg_circle_scatter([0.0, 0.25, 0.5])
        assert a == b
        assert a.startswith("<svg ") and a.rstrip().endswith("</svg>")
        assert a.count("<circle") == 4  # outline + three points

    def test_plane_and_sphere_scatter(self, rng):
        plane = fileio.svg_plane_scatter(rng.random((5, 2)))
        assert plane.count("<circle") == 5
        pts = rng.normal(size=(6, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        sphere = fileio.svg_sphere_scatter(pts)
        assert sphere.count("<circle") == 6
