import json
from fractions import Fraction

import numpy as np
import pytest

from posforms import cli
from posforms import serialization as ser
from posforms.decomposability import sample_decomposable_gram
from posforms.weak import omega_family

FAST = ["--starts", "40", "--maxiter", "300", "--samples", "300"]


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(ser.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def family_literal(a, j=1, k=6):
    a = Fraction(a) if isinstance(a, str) else a
    return ser.form_to_json(omega_family(j, k, a))


class TestAnalyze:
    def test_certified_form(self, tmp_path, capsys):
        path = write(tmp_path, "om.json", family_literal("3/2"))
        code, out, _ = run(capsys, "analyze", path, "--exact", "--json", *FAST)
        assert code == 0
        r = json.loads(out)
        v = r["verdicts"]
        assert v["weak"]["status"] == "certified" and v["strict_weak"]["status"] == "certified"
        assert v["hermitian"]["status"] == "refuted" and v["strong"]["status"] == "refuted"
        assert r["screen"]["nonstrict"]["passed"]

    def test_byte_identical(self, tmp_path, capsys):
        path = write(tmp_path, "om.json", family_literal(1.2, 1, 2))
        outs = [run(capsys, "analyze", path, "--json", *FAST)[1] for _ in range(2)]
        assert outs[0] == outs[1] and "timing_seconds" not in outs[0]

    def test_zero_form(self, tmp_path, capsys):
        path = write(tmp_path, "z.json", {"n": 4, "p": 2, "q": 2, "terms": []})
        code, out, _ = run(capsys, "analyze", path, "--json", *FAST)
        v = json.loads(out)["verdicts"]
        assert code == 0
        for cone in ("weak", "hermitian", "strong"):
            assert v[cone]["status"] == "certified"

    def test_decomposable_sum(self, tmp_path, capsys):
        A = sample_decomposable_gram(np.random.default_rng(3), 12).sum(axis=0) + 0.5 * np.eye(6)
        path = write(tmp_path, "m.json", ser.matrix_to_json(A))
        code, out, _ = run(capsys, "analyze", path, "--json", *FAST)
        r = json.loads(out)
        assert code == 0 and r["strong_certificate"]["kind"] == "decomposition"
        assert r["verdicts"]["strong"]["status"] == "numerically_positive"

    def test_text_and_reduce(self, tmp_path, capsys):
        path = write(tmp_path, "om.json", family_literal(0.5))
        code, out, _ = run(capsys, "analyze", path, "--reduce", "--timing", *FAST)
        assert code == 0 and "transfer frame e1" in out and "time:" in out

    def test_other_dimensions(self, tmp_path, capsys):
        path = write(tmp_path, "f.json", {"n": 3, "p": 1, "q": 1,
                                          "terms": [{"I": [1], "J": [1], "re": 0, "im": 1}]})
        code, out, _ = run(capsys, "analyze", path, "--json")
        assert code == 0 and set(json.loads(out)["verdicts"]) == {"hermitian", "strict_hermitian"}


class TestErrors:
    def test_not_real(self, tmp_path, capsys):
        path = write(tmp_path, "f.json", {"n": 4, "p": 2, "q": 2,
                                          "terms": [{"I": [1, 2], "J": [3, 4], "re": 1}]})
        code, _, err = run(capsys, "analyze", path)
        assert code == 2 and "not real" in err

    @pytest.mark.parametrize("content", ["{bad", '{"n": 4}', '{"matrix": [[1]]}'])
    def test_malformed(self, tmp_path, capsys, content):
        path = tmp_path / "bad.json"
        path.write_text(content)
        assert run(capsys, "analyze", str(path))[0] == 2

    def test_missing_file(self, capsys):
        assert run(capsys, "analyze", "/nonexistent/file.json")[0] == 2

    def test_bad_family_indices(self, capsys):
        assert run(capsys, "family", "3", "2")[0] == 2
        assert run(capsys, "family", "1", "6", "--moduli", "x")[0] == 2

    def test_non_hermitian_matrix(self, tmp_path, capsys):
        M = np.zeros((6, 6))
        M[0, 1] = 1
        assert run(capsys, "analyze", write(tmp_path, "m.json", ser.matrix_to_json(M)))[0] == 2


class TestFamily:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "family", "1", "6", "--json")
        rows = json.loads(out)["rows"]
        assert code == 0 and len(rows) == 15
        by_mod = {str(r["modulus"]): r for r in rows if r["phase_over_pi"] == 0}
        assert [by_mod["3/2"][c] for c in cli.COLUMNS] == [True, True, False, False, False, False]
        assert [by_mod["2"][c] for c in cli.COLUMNS] == [True, False, False, False, False, False]
        assert [by_mod["1/2"][c] for c in cli.COLUMNS] == [True] * 6
        assert by_mod["5/2"]["label"] == "|a|>2"

    def test_text(self, capsys):
        code, out, _ = run(capsys, "family", "1", "2", "--moduli", "1/2,3/2", "--phases", "0")
        assert code == 0 and len(out.strip().splitlines()) == 3 and "✗" in out and "✓" in out

    def test_numeric(self, capsys):
        code, out, _ = run(capsys, "family", "1", "6", "--moduli", "3/2,5/2", "--phases", "1/4",
                           "--numeric", "--json", *FAST)
        rows = json.loads(out)["rows"]
        assert code == 0 and all(r["disagreements"] == [] for r in rows)
        assert rows[1]["numeric"]["weak"] == "refuted"


class TestPair:
    def test_negative_exit(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", family_literal(2))
        b = write(tmp_path, "b.json", family_literal(-2))
        code, out, _ = run(capsys, "pair", a, b, "--exact", "--json")
        assert code == 3 and json.loads(out)["pair"] == -2
        code, out, _ = run(capsys, "pair", a, a, "--exact")
        assert code == 0 and out == "pair = 14\n"

    def test_bidegree_error(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", family_literal(2))
        b = write(tmp_path, "b.json", {"n": 4, "p": 1, "q": 1, "terms": []})
        assert run(capsys, "pair", a, b)[0] == 2


class TestReduce:
    def test_coordinate_frame(self, tmp_path, capsys):
        path = write(tmp_path, "om.json", family_literal("3/2"))
        code, out, _ = run(capsys, "reduce", path, "--frame", "1", "--exact", "--json", *FAST)
        r = json.loads(out)
        assert code == 0 and r["reconstruction_ok"] and not r["eta_is_zero"]
        assert all(t["passed"] for t in r["transfers"])

    def test_vector_frame(self, tmp_path, capsys):
        path = write(tmp_path, "om.json", family_literal(0.5))
        code, out, _ = run(capsys, "reduce", path, "--v0", "[1, 1, 0, 0]", "--alpha", "[1, 0, 0, 0]")
        assert code == 0 and "reconstruction exact: True" in out
        code, _, _ = run(capsys, "reduce", path, "--v0", "[1, 1, 0, 0]", "--alpha", "[2, 0, 0, 0]",
                         "--normalize")
        assert code == 0
        code, _, err = run(capsys, "reduce", path, "--v0", "[1, 0, 0, 0]", "--alpha", "[0, 1, 0, 0]")
        assert code == 2 and "degenerate" in err
        assert run(capsys, "reduce", path)[0] == 2
        assert run(capsys, "reduce", path, "--frame", "7")[0] == 2


class TestCertifyStrong:
    @pytest.mark.parametrize("a,result,kind", [("1/2", "certified", "duality_inequality"),
                                               ("3/2", "refuted", "refutation_witness")])
    def test_results(self, tmp_path, capsys, a, result, kind):
        path = write(tmp_path, "om.json", family_literal(a))
        code, out, _ = run(capsys, "certify-strong", path, "--json", *FAST)
        r = json.loads(out)
        assert code == 0 and r["result"] == result and r["certificate"]["kind"] == kind

    def test_wrong_dimension(self, tmp_path, capsys):
        path = write(tmp_path, "f.json", {"n": 3, "p": 1, "q": 1, "terms": []})
        assert run(capsys, "certify-strong", path)[0] == 2


def test_inclusion_checker():
    from posforms.verdicts import PositivityVerdict, Status

    def v(st):
        return PositivityVerdict("x", False, st, "")
    assert cli.check_inclusions({("strong", False): v(Status.CERTIFIED),
                                 ("weak", False): v(Status.REFUTED)})
    assert not cli.check_inclusions({("weak", False): v(Status.CERTIFIED),
                                     ("strong", False): v(Status.REFUTED)})
    assert cli.check_inclusions({("weak", True): v(Status.NUMERICALLY_POSITIVE),
                                 ("weak", False): v(Status.REFUTED)})
