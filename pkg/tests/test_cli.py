import json

import numpy as np
import pytest

from pdmeans.cli import dumps_17g, main
from pdmeans.matfun import thompson_distance, validate_spd

from conftest import random_spd_matrix


def write_matrix_file(path, matrices, weights=None, t=None):
    doc = {"dim": len(matrices[0]), "matrices": matrices}
    if weights is not None:
        doc["weights"] = weights
    if t is not None:
        doc["t"] = t
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def pair_file(tmp_path):
    return write_matrix_file(
        tmp_path / "pair.json",
        [[[2.0, 1.0], [1.0, 1.0]], [[1.0, 0.0], [0.0, 3.0]]],
        weights=[0.5, 0.5],
    )


class TestDumps17g:
    def test_floats_have_17_digits(self):
        text = dumps_17g({"x": 1.0 / 3.0})
        assert '"x": 0.33333333333333331' in text

    def test_round_trip_is_valid_json(self):
        doc = {"a": [1.5, 2, None], "b": {"c": True, "d": "text"}, "e": []}
        parsed = json.loads(dumps_17g(doc))
        assert parsed["a"] == [1.5, 2, None]
        assert parsed["b"]["c"] is True

    def test_integers_stay_integers(self):
        assert dumps_17g({"n": 7}) == '{\n  "n": 7\n}'

    def test_floats_keep_a_decimal_marker(self):
        assert json.loads(dumps_17g({"x": 2.0}))["x"] == 2.0
        assert "2.0" in dumps_17g({"x": 2.0})


class TestCompute:
    def test_arith_diagonal(self, tmp_path, capsys):
        path = write_matrix_file(
            tmp_path / "m.json",
            [[[1.0, 0.0], [0.0, 1.0]], [[3.0, 0.0], [0.0, 5.0]]],
        )
        assert main(["compute", "arith", path]) == 0
        doc = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(doc["result"], [[2.0, 0.0], [0.0, 3.0]])
        assert doc["bounds"]["m"] == pytest.approx(1.0)
        assert doc["bounds"]["M"] == pytest.approx(5.0)

    def test_karcher_matches_geo2(self, pair_file, capsys):
        assert main(["compute", "karcher", pair_file]) == 0
        karcher_doc = json.loads(capsys.readouterr().out)
        assert main(["compute", "geo2", pair_file, "--t", "0.5"]) == 0
        geo_doc = json.loads(capsys.readouterr().out)
        a = validate_spd(karcher_doc["result"])
        b = validate_spd(geo_doc["result"])
        assert thompson_distance(a, b) <= 1e-7
        assert karcher_doc["converged"]

    def test_power_commuting_matches_scalar(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        d1, d2 = rng.uniform(0.5, 4.0, 3), rng.uniform(0.5, 4.0, 3)
        path = write_matrix_file(
            tmp_path / "m.json",
            [np.diag(d1).tolist(), np.diag(d2).tolist()],
            weights=[0.25, 0.75],
            t=0.5,
        )
        assert main(["compute", "power", path]) == 0
        doc = json.loads(capsys.readouterr().out)
        expected = (0.25 * d1 ** 0.5 + 0.75 * d2 ** 0.5) ** 2
        np.testing.assert_allclose(np.diag(doc["result"]), expected, rtol=1e-8)

    def test_output_round_trips_as_spd(self, pair_file, capsys):
        for mean in ("arith", "harm", "geo2", "power", "karcher", "lawson_lim", "chaotic"):
            args = ["compute", mean, pair_file]
            if mean in ("power",):
                args += ["--t", "0.5"]
            assert main(args) == 0
            doc = json.loads(capsys.readouterr().out)
            validate_spd(doc["result"])

    def test_validation_error_names_matrix(self, tmp_path, capsys):
        path = write_matrix_file(
            tmp_path / "bad.json",
            [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 2.0], [2.0, 1.0]]],
        )
        assert main(["compute", "karcher", path]) == 2
        assert "matrix 1" in capsys.readouterr().err

    def test_missing_file_is_config_error(self, capsys):
        assert main(["compute", "arith", "/nonexistent.json"]) == 2

    def test_no_convergence_exit_code(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        mats = [random_spd_matrix(rng, 2).entries.tolist() for _ in range(3)]
        path = write_matrix_file(tmp_path / "m.json", mats, t=0.5)
        code = main(["compute", "lawson_lim", path, "--tol-fixed-point", "1e-30"])
        assert code == 3

    def test_geo2_needs_two_matrices(self, tmp_path, capsys):
        path = write_matrix_file(tmp_path / "m.json", [np.eye(2).tolist()] * 3)
        assert main(["compute", "geo2", path]) == 2


class TestVerifyCommand:
    def test_single_check_passes(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(
            ["verify", "--checks", "SK_scalar", "--count", "2", "--out", str(out)]
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["results"][0]["check_id"] == "SK_scalar"
        assert report["results"][0]["passes"] == 2
        assert "SK_scalar" in capsys.readouterr().out

    def test_unknown_check_exits_2(self, tmp_path, capsys):
        code = main(
            ["verify", "--checks", "UNKNOWN", "--count", "1", "--out", str(tmp_path / "r.json")]
        )
        assert code == 2
        assert "SK_scalar" in capsys.readouterr().err

    def test_reports_byte_identical_modulo_wall_clock(self, tmp_path, capsys):
        paths = [tmp_path / "r1.json", tmp_path / "r2.json"]
        for path in paths:
            code = main(
                [
                    "verify",
                    "--checks",
                    "SK_scalar,T21_K,L31_norm",
                    "--count",
                    "4",
                    "--seed",
                    "7",
                    "--out",
                    str(path),
                ]
            )
            assert code == 0
        docs = [json.loads(p.read_text()) for p in paths]
        for doc in docs:
            doc.pop("wall_clock_s")
        assert dumps_17g(docs[0]) == dumps_17g(docs[1])

    def test_bad_range_exits_2(self, tmp_path, capsys):
        code = main(
            ["verify", "--dims", "9..2", "--count", "1", "--out", str(tmp_path / "r.json")]
        )
        assert code == 2
