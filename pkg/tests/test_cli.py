import json
import math
import subprocess
import sys

import numpy as np
import pytest

from modern_hopfield.cli import main
from modern_hopfield.io import InputError, dumps, read_matrix, write_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def orthogonal(tmp_path):
    d = 20
    M = 3 * math.sqrt(d - 1)
    X = M * np.eye(d)
    patterns = tmp_path / "patterns.csv"
    queries = tmp_path / "queries.csv"
    write_matrix(patterns, X)
    write_matrix(queries, X[[0, 5, 11]])
    return patterns, queries


class TestIO:
    def test_round_trip_bits(self, tmp_path, rng):
        A = rng.normal(size=(7, 5)) * 10.0 ** rng.integers(-300, 300, size=(7, 5))
        path = tmp_path / "m.csv"
        write_matrix(path, A)
        assert np.array_equal(read_matrix(path), A)

    def test_header(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        np.testing.assert_array_equal(read_matrix(path, header=True), [[1, 2], [3, 4]])

    @pytest.mark.parametrize("text", ["1,2\n3\n", "", "1,x\n", "1,nan\n", "inf,1\n"])
    def test_bad_files(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(InputError):
            read_matrix(path)

    def test_missing(self, tmp_path):
        with pytest.raises(InputError):
            read_matrix(tmp_path / "nope.csv")

    def test_dumps_infinity(self):
        assert json.loads(dumps({"x": np.float64(math.inf), "y": np.arange(2)})) == {"x": "inf", "y": [0, 1]}


class TestRetrieve:
    def test_three_lines(self, capsys, orthogonal):
        p, q = orthogonal
        code, out, _ = run(capsys, "retrieve", "--patterns", str(p), "--queries", str(q), "--beta", "1")
        assert code == 0
        records = [json.loads(line) for line in out.splitlines()]
        assert len(records) == 3
        assert [r["query_index"] for r in records] == [0, 1, 2]
        assert all(r["converged"] and r["updates_used"] == 1 for r in records)
        assert [r["nearest_pattern"] for r in records] == [0, 5, 11]
        assert len(records[0]["energy_trace"]) == 2
        assert records[0]["regime"]["master_inequality_certified"] is True

    def test_out_file_and_determinism(self, capsys, orthogonal, tmp_path):
        p, q = orthogonal
        outs = []
        for name in ("a.jsonl", "b.jsonl"):
            target = tmp_path / name
            assert run(capsys, "retrieve", "--patterns", str(p), "--queries", str(q), "--beta", "0.3",
                       "--normalize", "input", "--out", str(target))[0] == 0
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]

    def test_ragged(self, capsys, tmp_path, orthogonal):
        bad = tmp_path / "ragged.csv"
        bad.write_text("1,2,3\n4,5\n")
        code, _, err = run(capsys, "retrieve", "--patterns", str(bad), "--queries", str(orthogonal[1]), "--beta", "1")
        assert code == 2 and "columns" in err

    def test_shape_mismatch(self, capsys, tmp_path, orthogonal):
        q = tmp_path / "q.csv"
        q.write_text("1,2\n")
        code, _, err = run(capsys, "retrieve", "--patterns", str(orthogonal[0]), "--queries", str(q), "--beta", "1")
        assert code == 2 and err

    def test_beta_nonpositive(self, capsys, orthogonal):
        p, q = orthogonal
        assert run(capsys, "retrieve", "--patterns", str(p), "--queries", str(q), "--beta", "0")[0] == 2


class TestCapacity:
    def test_exact(self, capsys):
        code, out, _ = run(capsys, "capacity", "--beta", "1", "--K", "3", "--d", "20", "--p", "0.001")
        rec = json.loads(out)
        assert code == 0 and set(rec) == {"a", "b", "c_hat", "feasible", "N_lower"}
        assert 3.1546 <= rec["c_hat"] <= 3.5

    def test_lower(self, capsys):
        _, out, _ = run(capsys, "capacity", "--beta", "1", "--K", "3", "--d", "20", "--p", "0.001", "--method", "lower")
        assert json.loads(out)["c_hat"] >= 3.1444

    def test_dimension(self, capsys):
        code, out, _ = run(capsys, "capacity", "--beta", "1", "--K", "3", "--p", "0.001", "--method", "dimension",
                           "--c", "2")
        rec = json.loads(out)
        assert code == 0 and rec["d_real"] < 24 and rec["d_ceil"] == math.ceil(rec["d_real"])
        assert rec["solution"] == "closed_form"

    def test_dimension_lambert(self, capsys):
        _, out, _ = run(capsys, "capacity", "--beta", "1", "--K", "1", "--p", "1", "--method", "dimension", "--c", "1")
        assert json.loads(out)["solution"] == "lambert"

    def test_missing_c(self, capsys):
        assert run(capsys, "capacity", "--beta", "1", "--K", "3", "--p", "0.001", "--method", "dimension")[0] == 2

    def test_missing_d(self, capsys):
        assert run(capsys, "capacity", "--beta", "1", "--K", "3", "--p", "0.001")[0] == 2

    def test_bad_p(self, capsys):
        assert run(capsys, "capacity", "--beta", "1", "--K", "3", "--d", "20", "--p", "2")[0] == 2


class TestAnalyzeHeads:
    def test_dir(self, capsys, tmp_path):
        write_matrix(tmp_path / "sharp.csv", np.eye(128))
        write_matrix(tmp_path / "flat.csv", np.full((3, 128), 1 / 128))
        code, out, _ = run(capsys, "analyze-heads", "--attention", str(tmp_path))
        rep = json.loads(out)
        assert code == 0
        assert rep["sharp"]["class"] == "IV"
        assert rep["flat"]["class"] == "I" and rep["flat"]["k_median"] == 116
        assert len(rep["flat"]["frobenius_norms"]) == 3

    def test_missing(self, capsys, tmp_path):
        assert run(capsys, "analyze-heads", "--attention", str(tmp_path / "none"))[0] == 2

    def test_not_simplex(self, capsys, tmp_path):
        write_matrix(tmp_path / "bad.csv", [[0.5, 0.7]])
        assert run(capsys, "analyze-heads", "--attention", str(tmp_path / "bad.csv"))[0] == 2


class TestGaussianHead:
    def test_supports(self, capsys):
        code, out, _ = run(capsys, "gaussian-head", "--n", "3")
        A = np.array([[float(v) for v in line.split(",")] for line in out.splitlines()])
        assert code == 0 and A.shape == (3, 3)
        assert np.argmax(A[0]) == 0
        assert np.max(np.abs(A.sum(axis=1) - 1)) <= 1e-12

    def test_seeded_files(self, capsys, tmp_path):
        for name in ("a.csv", "b.csv"):
            run(capsys, "gaussian-head", "--n", "16", "--init", "random", "--seed", "3", "--out", str(tmp_path / name))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        A = read_matrix(tmp_path / "a.csv")
        write_matrix(tmp_path / "c.csv", A)
        assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "a.csv").read_bytes()

    def test_n_one(self, capsys):
        assert run(capsys, "gaussian-head", "--n", "1")[0] == 2


class TestEnergy:
    def test_identical(self, capsys, tmp_path, rng):
        x = rng.normal(size=4)
        write_matrix(tmp_path / "p.csv", np.tile(x, (3, 1)))
        write_matrix(tmp_path / "q.csv", x)
        code, out, _ = run(capsys, "energy", "--patterns", str(tmp_path / "p.csv"), "--query", str(tmp_path / "q.csv"),
                           "--beta", "1")
        assert code == 0 and abs(json.loads(out)["energy"]) <= 1e-12

    def test_mixture_ratio_constant(self, capsys, tmp_path, rng):
        write_matrix(tmp_path / "p.csv", rng.normal(size=(4, 3)))
        write_matrix(tmp_path / "q.csv", rng.normal(size=(5, 3)))
        _, out, _ = run(capsys, "energy", "--patterns", str(tmp_path / "p.csv"), "--query", str(tmp_path / "q.csv"),
                        "--beta", "0.7", "--mixture")
        ratios = [json.loads(line)["ratio"] for line in out.splitlines()]
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-8)

    def test_beta_zero(self, capsys, tmp_path):
        write_matrix(tmp_path / "p.csv", np.eye(2))
        assert run(capsys, "energy", "--patterns", str(tmp_path / "p.csv"), "--query", str(tmp_path / "p.csv"),
                   "--beta", "-1")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "modern_hopfield", "capacity", "--beta", "1", "--K", "1",
                           "--d", "75", "--p", "0.001"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert 1.3718 <= json.loads(proc.stdout)["c_hat"] <= 1.6


def test_no_command(capsys):
    assert run(capsys)[0] == 2
