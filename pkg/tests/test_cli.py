import json

import pytest

from walshform import cli
from walshform.stepfun import StepFun2D
from walshform.verify import random_triple


def write(tmp_path, obj, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(argv):
    return cli.main(argv)


def read(path):
    with open(path) as fh:
        return json.load(fh)


def test_evaluate_zero(tmp_path):
    z = [["0", "0"], ["0", "0"]]
    inp = write(tmp_path, {"M": 1, "F1": z, "F2": z, "F3": z})
    out = str(tmp_path / "out.json")
    assert run(["evaluate", "--input", inp, "--method", "both", "--output", out]) == 0
    res = read(out)
    assert res["lambda_exact"] == "0" and res["agree"] is True and res["M"] == 1


def test_evaluate_v0(tmp_path):
    g = [["1", "0"], ["0", "0"]]
    inp = write(tmp_path, {"M": 1, "F1": g, "F2": g, "F3": g})
    out = str(tmp_path / "out.json")
    assert run(["evaluate", "--input", inp, "--output", out]) == 0
    res = read(out)
    assert res["lambda_exact"] == "1/16" and res["agree"]
    assert res["lambda_approx"] == "0.0625"
    assert set(res["methods"]) == {"direct", "tiles"}


def test_evaluate_random_file_with_rationals(tmp_path):
    F = random_triple(2, 3, 0)
    inp = write(tmp_path, cli.dump_function_file(*F))
    out = str(tmp_path / "out.json")
    assert run(["evaluate", "--input", inp, "--method", "tiles", "--output", out]) == 0
    assert "agree" not in read(out)


def test_evaluate_shape_error(tmp_path):
    bad = [["0"] * 4 for _ in range(3)] + [["0"] * 3]
    good = [["0"] * 4 for _ in range(4)]
    inp = write(tmp_path, {"M": 2, "F1": bad, "F2": good, "F3": good})
    out = str(tmp_path / "out.json")
    assert run(["evaluate", "--input", inp, "--output", out]) == 1
    assert read(out)["error"]["type"] == "shape"


@pytest.mark.parametrize(
    "payload,kind",
    [
        ({"M": 0, "F1": [["0.5"]], "F2": [["1"]], "F3": [["1"]]}, "parse"),
        ({"M": 0, "F1": [[0.5]], "F2": [["1"]], "F3": [["1"]]}, "parse"),
        ({"M": 0, "F1": [["1"]], "F2": [["1"]]}, "schema"),
        ({"M": -1}, "schema"),
    ],
)
def test_evaluate_input_errors(tmp_path, payload, kind):
    inp = write(tmp_path, payload)
    out = str(tmp_path / "out.json")
    assert run(["evaluate", "--input", inp, "--output", out]) == 1
    assert read(out)["error"]["type"] == kind


def test_evaluate_disagreement_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "lambda_w_direct", lambda *a, **k: 12345)
    g = [["1", "0"], ["0", "0"]]
    inp = write(tmp_path, {"M": 1, "F1": g, "F2": g, "F3": g})
    out = str(tmp_path / "out.json")
    assert run(["evaluate", "--input", inp, "--output", out]) == 2
    assert read(out)["agree"] is False


def test_function_file_roundtrip():
    F = random_triple(2, 11, 0)
    data = json.loads(json.dumps(cli.dump_function_file(*F)))
    assert cli.parse_function_file(data) == F


def test_verify_pass_and_report(tmp_path):
    rep = str(tmp_path / "r.json")
    assert run(["verify", "--M", "2", "--trials", "50", "--seed", "1", "--report", rep]) == 0
    r = read(rep)
    assert r["overall"] is True and r["config"]["seed"] == 1
    for c in r["checks"]:
        assert c["run"] == 50 and c["fail"] == 0 and c["pass"] == 50


def test_verify_m0(tmp_path):
    rep = str(tmp_path / "r.json")
    assert run(["verify", "--M", "0", "--trials", "1", "--report", rep]) == 0
    assert any("multitile set is empty" in n for n in read(rep)["notes"])


def test_verify_check_selector(tmp_path):
    rep = str(tmp_path / "r.json")
    assert run(["verify", "--checks", "lemma", "--M", "3", "--trials", "2", "--report", rep]) == 0
    r = read(rep)
    assert [c["name"] for c in r["checks"]] == ["lemma"]
    assert r["config"]["checks"] == ["lemma"]


def test_verify_bad_selector(tmp_path):
    rep = str(tmp_path / "r.json")
    assert run(["verify", "--checks", "bogus", "--report", rep]) == 1


def test_search_cli_deterministic(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert run(["search", "--M", "2", "--iters", "0", "--seed", "7", "--output", a]) == 0
    assert run(["search", "--M", "2", "--iters", "0", "--seed", "7", "--output", b]) == 0
    with open(a) as fa, open(b) as fb:
        assert fa.read() == fb.read()
    res = read(a)
    assert res["exact_recheck"] is True and res["best_ratio"] <= 7 + 1e-9
    F = cli.parse_function_file(res["best_input"])
    assert F == random_triple(2, (7, "search", 0, 0), 0)


def test_packets_unit_m1(tmp_path):
    out = str(tmp_path / "p.json")
    assert run(["packets", "--M", "1", "--interval", "0,1", "--output", out]) == 0
    assert read(out)["rows"] == [[1, 1], [1, -1]]


@pytest.mark.parametrize("spec,M", [("0,1", 3), ("1/4,1/2", 3), ("2:3", 4), ("0,1", 0)])
def test_packets_orthogonal(tmp_path, spec, M):
    out = str(tmp_path / "p.json")
    assert run(["packets", "--M", str(M), "--interval", spec, "--output", out]) == 0
    res = read(out)
    rows = res["rows"]
    N = 1 << (M - res["k"])
    assert rows[0] == [1] * N
    for a in range(N):
        for b in range(N):
            assert sum(x * y for x, y in zip(rows[a], rows[b])) == (N if a == b else 0)


@pytest.mark.parametrize("spec", ["0,3/4", "1,2", "banana", "0:5"])
def test_packets_bad_interval(tmp_path, spec):
    out = str(tmp_path / "p.json")
    assert run(["packets", "--M", "2", "--interval", spec, "--output", out]) == 1


def test_usage_error_exit_code():
    assert run(["verify", "--M", "notanint"]) == 1


def test_stdout_output(capsys):
    assert run(["packets", "--M", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["rows"] == [[1, 1], [1, -1]]
