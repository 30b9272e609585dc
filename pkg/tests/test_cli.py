import json

import numpy as np
import pytest

from pald import cli


def write_line_csv(tmp_path):
    path = tmp_path / "line.csv"
    path.write_text("x\n0\n1\n3\n")
    return path


def write_clusters_csv(tmp_path, name="train.csv"):
    rng = np.random.default_rng(3)
    rows = ["x,y,label"]
    for cx, lab in ((0.0, "A"), (4.0, "B")):
        for p in rng.normal([cx, 0.0], 0.3, size=(15, 2)):
            rows.append(f"{p[0]},{p[1]},{lab}")
    path = tmp_path / name
    path.write_text("\n".join(rows) + "\n")
    return path


def run(args):
    return cli.main(args)


class TestBuild:
    def test_build_prints_and_saves(self, tmp_path, capsys):
        src = write_line_csv(tmp_path)
        out = tmp_path / "line.paldcache"
        assert run(["build", "--input", str(src), "--cache", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "n=3" in printed and "0.194444" in printed
        assert out.read_text().startswith("PALDCACHE v1\n")

    def test_missing_file(self, tmp_path, capsys):
        rc = run(["build", "--input", str(tmp_path / "nope.csv"), "--cache", str(tmp_path / "o")])
        assert rc != 0
        err = capsys.readouterr().err
        assert err.startswith("error:") and "nope.csv" in err

    def test_duplicate_rows(self, tmp_path, capsys):
        src = tmp_path / "dup.csv"
        src.write_text("1,2\n1,2\n3,4\n")
        rc = run(["build", "--input", str(src), "--cache", str(tmp_path / "o")])
        assert rc != 0
        assert "error:" in capsys.readouterr().err


class TestQuery:
    def test_json_schema(self, tmp_path, capsys):
        src = tmp_path / "two.csv"
        src.write_text("0\n1\n")
        out = tmp_path / "q.json"
        rc = run(["query", "--input", str(src), "--point", "3",
                  "--format", "json", "--out", str(out)])
        assert rc == 0
        body = json.loads(out.read_text())
        assert set(body) == {"cohesion_to", "cohesion_from", "self_cohesion", "epsilon",
                             "tau_updated", "strong_neighbors", "is_outlier"}
        assert body["is_outlier"] is True
        assert body["tau_updated"] == pytest.approx(7 / 36)

    def test_query_saved_cache_with_distance_vector(self, tmp_path):
        src = write_line_csv(tmp_path)
        cache_file = tmp_path / "line.paldcache"
        run(["build", "--input", str(src), "--cache", str(cache_file)])
        out = tmp_path / "q.json"
        rc = run(["query", "--cache", str(cache_file), "--point", "10,9,7",
                  "--format", "json", "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["is_outlier"] is True

    def test_dimension_mismatch(self, tmp_path, capsys):
        src = write_line_csv(tmp_path)
        rc = run(["query", "--input", str(src), "--point", "1,2"])
        assert rc != 0
        assert "error:" in capsys.readouterr().err


class TestClusterCommand:
    def test_line_singletons(self, tmp_path):
        src = write_line_csv(tmp_path)
        out = tmp_path / "c.json"
        rc = run(["cluster", "--input", str(src), "--format", "json", "--out", str(out)])
        assert rc == 0
        body = json.loads(out.read_text())
        assert body["clusters"] == [[0], [1], [2]]

    def test_fused_distances(self, tmp_path):
        d1 = tmp_path / "d1.csv"
        d2 = tmp_path / "d2.csv"
        d1.write_text("0,1,3\n1,0,2\n3,2,0\n")
        d2.write_text("0,2,6\n2,0,4\n6,4,0\n")
        out = tmp_path / "c.json"
        rc = run(["cluster", "--distances", f"{d1},{d2}", "--weights", "0.5,0.5",
                  "--format", "json", "--out", str(out)])
        assert rc == 0
        body = json.loads(out.read_text())
        # both views rank pairs identically, so fusion matches the single view
        assert body["threshold"] == pytest.approx(7 / 36)
        assert body["clusters"] == [[0], [1], [2]]

    def test_fused_weights_must_sum_to_one(self, tmp_path, capsys):
        d1 = tmp_path / "d1.csv"
        d1.write_text("0,1,3\n1,0,2\n3,2,0\n")
        rc = run(["cluster", "--distances", f"{d1},{d1}", "--weights", "0.9,0.9"])
        assert rc != 0
        assert "error:" in capsys.readouterr().err


class TestAnomalyCommand:
    def test_end_to_end(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        train = tmp_path / "train.csv"
        rows = ["x,y"] + [f"{p[0]},{p[1]}" for p in rng.normal(0, 0.2, size=(20, 2))]
        train.write_text("\n".join(rows) + "\n")
        test = tmp_path / "test.csv"
        rows = ["x,y,anomaly"]
        rows += [f"{p[0]},{p[1]},0" for p in rng.normal(0, 0.2, size=(8, 2))]
        rows += ["30,30,1", "-40,10,1", "50,-50,1"]
        test.write_text("\n".join(rows) + "\n")
        out = tmp_path / "report.json"
        rc = run(["anomaly", "--input", str(train), "--test", str(test),
                  "--score", "pald", "--format", "json", "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["roc_auc"] == 1.0


class TestClassifyCommand:
    def test_cross_validation(self, tmp_path, capsys):
        train = write_clusters_csv(tmp_path)
        out = tmp_path / "cv.json"
        rc = run(["classify", "--input", str(train), "--method", "count_to",
                  "--folds", "5", "--seed", "0", "--format", "json", "--out", str(out)])
        assert rc == 0
        body = json.loads(out.read_text())
        assert body["accuracy"] >= 0.9
        assert len(body["per_fold"]) == 5

    def test_train_test_split(self, tmp_path, capsys):
        train = write_clusters_csv(tmp_path)
        test = tmp_path / "test.csv"
        test.write_text("x,y\n0.1,0.1\n4.1,0.2\n")
        out = tmp_path / "pred.csv"
        rc = run(["classify", "--input", str(train), "--test", str(test), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "index,predicted,tie"
        assert lines[1].startswith("0,A") and lines[2].startswith("1,B")


class TestBenchCommand:
    def test_schema_and_positivity(self, tmp_path):
        out = tmp_path / "bench.csv"
        rc = run(["bench", "--sizes", "7,15", "--reps", "1", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "n,batch_s,build_s,query_s,lazy_network_s,total_online_s,reps"
        for line in lines[1:]:
            fields = line.split(",")
            assert int(fields[0]) in (7, 15)
            assert all(float(v) > 0 for v in fields[1:6])
            assert fields[6] == "1"

    def test_size_floor(self, tmp_path, capsys):
        rc = run(["bench", "--sizes", "2", "--reps", "1"])
        assert rc != 0
        assert "error:" in capsys.readouterr().err


class TestBoundaryCommand:
    def test_grid_csv(self, tmp_path):
        train = write_clusters_csv(tmp_path)
        out = tmp_path / "grid.csv"
        rc = run(["boundary", "--input", str(train), "--grid", "5",
                  "--bounds=-30,34,-30,30", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "x,y,class"
        assert len(lines) == 26
        classes = {line.split(",")[2] for line in lines[1:]}
        assert "" in classes  # unclassified far cells
