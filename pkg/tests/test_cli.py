import json
import os
import subprocess
import sys

import pytest
from hypothesis import given

from fpsumfree.cli import main
from fpsumfree.constructions import fixture
from fpsumfree.setfile import SetFileError, dumps_setfile, load_setfile, parse_setfile, save_setfile
from strategies import group_and_sets


@given(group_and_sets(1, max_size=30))
def test_setfile_round_trip(data):
    spec, A = data
    text = dumps_setfile(A)
    B = parse_setfile(json.loads(text))
    assert B == A
    assert dumps_setfile(B) == text


def test_setfile_sorts_elements_by_index():
    A = parse_setfile({"p": 5, "n": 2, "elements": [[0, 1], [1, 0]]})
    assert json.loads(dumps_setfile(A))["elements"] == [[1, 0], [0, 1]]


@pytest.mark.parametrize(
    "data,needle",
    [
        ([], "top level"),
        ({"p": 5, "n": 2}, "'elements'"),
        ({"p": "5", "n": 2, "elements": []}, "'p'"),
        ({"p": 6, "n": 2, "elements": []}, "prime"),
        ({"p": 5, "n": 2, "elements": [[1, 2, 3]]}, "elements[0]"),
        ({"p": 5, "n": 2, "elements": [[1, 0], [5, 0]]}, "elements[1][0]"),
        ({"p": 5, "n": 2, "elements": [[1, 0], [1, 0]]}, "duplicate"),
        ({"p": 5, "n": 2, "elements": [[1, True]]}, "elements[0][1]"),
    ],
)
def test_setfile_diagnostics(data, needle):
    with pytest.raises(SetFileError) as exc:
        parse_setfile(data, "f.json")
    assert needle in str(exc.value)


def test_load_reports_json_position(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"p": 5,\n "n": 2,,}')
    with pytest.raises(SetFileError) as exc:
        load_setfile(str(f))
    assert "line 2" in str(exc.value)
    with pytest.raises(SetFileError):
        load_setfile(str(tmp_path / "missing.json"))


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in ("f5_pentagon", "nonnormal_f5_3", "f7_full_size", "avw_f5_2", "f2_extremal"):
        path = tmp_path / f"{name}.json"
        save_setfile(fixture(name).set, str(path))
        out[name] = str(path)
    zero = tmp_path / "zero.json"
    zero.write_text('{"p": 5, "n": 2, "elements": [[0, 0], [1, 1]]}')
    out["zero"] = str(zero)
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": 5, "n": 2, "elements": [[5, 1]]}')
    out["bad"] = str(bad)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_check(files, capsys):
    assert run(capsys, "check", files["f5_pentagon"])[:2] == (0, "SUM-FREE\n")
    code, out, _ = run(capsys, "check", files["zero"])
    assert code == 1 and "[0, 0] + [0, 0] = [0, 0]" in out
    code, _, err = run(capsys, "check", files["bad"])
    assert code == 2 and "elements[0][0]" in err


def test_normal(files, capsys):
    code, out, _ = run(capsys, "normal", files["nonnormal_f5_3"])
    assert code == 1 and json.loads(out) == {"normal": False, "witness": None}
    code, out, _ = run(capsys, "normal", files["avw_f5_2"])
    assert code == 0 and json.loads(out)["witness"]["coefficients"] == [1, 0]
    code, _, err = run(capsys, "normal", files["f7_full_size"])
    assert code == 2 and "p=7" in err


def test_cover_and_affine(files, capsys):
    code, out, _ = run(capsys, "cover", files["f7_full_size"], "--k", "3")
    assert code == 0 and json.loads(out)["witness"]["residues"] == [2, 3, 4]
    assert run(capsys, "cover", files["f7_full_size"], "--k", "2")[0] == 1
    assert run(capsys, "cover", files["f7_full_size"], "--k", "0")[0] == 2
    code, out, _ = run(capsys, "affine", files["f2_extremal"])
    assert code == 1 and json.loads(out)["contained"] is False


@pytest.mark.parametrize("factors,value", [("5,5", "10"), ("7,7", "14"), ("2,2,2", "4")])
def test_lambda(capsys, factors, value):
    assert run(capsys, "lambda", "--factors", factors)[:2] == (0, value + "\n")


@pytest.mark.parametrize("factors", ["", ",", "a,b", "1"])
def test_lambda_bad_factors(capsys, factors):
    assert run(capsys, "lambda", "--factors", factors)[0] == 2


def test_sumset_and_sym(files, capsys):
    code, out, _ = run(capsys, "sumset", files["avw_f5_2"])
    assert code == 0
    S = parse_setfile(json.loads(out))
    assert {c[0] for c in S.coords()} == {4, 0, 1}
    code, out, _ = run(capsys, "sumset", files["avw_f5_2"], files["avw_f5_2"], "--difference")
    assert {c[0] for c in parse_setfile(json.loads(out)).coords()} == {0, 1, 4}
    code, out, _ = run(capsys, "sym", files["avw_f5_2"])
    assert json.loads(out) == {"basis": [[0, 1]], "dim": 1, "size": 5}


def test_search_max_nonnormal(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--mode", "max_nonnormal", "--p", "5", "--n", "2", "--output", str(tmp_path / "w"))
    rep = json.loads(out)
    assert code == 0 and rep["best_size"] == 5 and rep["exhaustive"] is True
    files = sorted(os.listdir(tmp_path / "w"))
    assert len(files) == len(rep["witnesses"])
    for k, name in enumerate(files):
        W = load_setfile(str(tmp_path / "w" / name))
        assert [list(c) for c in W.coords()] == rep["witnesses"][k]


def test_search_f5_3_reaches_28(capsys):
    code, out, _ = run(capsys, "search", "--mode", "max_nonnormal", "--p", "5", "--n", "3", "--budget", "10^4")
    rep = json.loads(out)
    assert code == 0 and rep["best_size"] >= 28 and rep["exhaustive"] is False


def test_search_unseeded_f5_3(capsys):
    code, out, _ = run(capsys, "search", "--p", "5", "--n", "3", "--budget", "2e4", "--no-seed-construction")
    assert code == 0 and json.loads(out)["nodes_expanded"] == 20000


def test_search_resume_matches_uninterrupted(capsys, tmp_path):
    args = ["search", "--mode", "max_sumfree", "--p", "7", "--n", "2", "--budget", "3000"]
    _, ref, _ = run(capsys, *args)
    ck = tmp_path / "ck.ndjson"
    run(capsys, *args, "--checkpoint", str(ck))
    lines = ck.read_text().splitlines()
    ck.write_text("\n".join(lines[:2]) + "\n")
    _, resumed, _ = run(capsys, *args, "--checkpoint", str(ck))
    assert resumed == ref


@pytest.mark.parametrize(
    "argv",
    [
        ["search", "--mode", "bogus", "--p", "5", "--n", "2"],
        ["search", "--p", "4", "--n", "2"],
        ["search", "--p", "5", "--n", "2", "--budget", "0"],
        ["search", "--p", "7", "--n", "2"],
        ["search", "--p", "5", "--n", "3", "--symmetry", "full_canonical"],
        ["enumerate", "--p", "5", "--n", "2", "--threads", "0"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_enumerate_and_greedy(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", "5", "--n", "2", "--min-size", "8")
    rep = json.loads(out)
    assert code == 0 and rep["exhaustive"] and rep["counts_by_size"] == {"8": 3, "9": 1, "10": 1}
    code, out, _ = run(capsys, "enumerate", "--p", "5", "--n", "2", "--min-size", "10", "--symmetry", "none")
    assert json.loads(out)["counts_by_size"] == {"10": 12}
    _, a, _ = run(capsys, "search", "--mode", "sample_greedy", "--p", "11", "--n", "2", "--seed", "3", "--count", "5")
    _, b, _ = run(capsys, "search", "--mode", "sample_greedy", "--p", "11", "--n", "2", "--seed", "3", "--count", "5")
    assert a == b and len(json.loads(a)["sizes"]) == 5


def test_threads_env_fallback(capsys, monkeypatch):
    args = ["search", "--mode", "max_sumfree", "--p", "5", "--n", "2"]
    _, ref, _ = run(capsys, *args)
    monkeypatch.setenv("SUMFREE_THREADS", "2")
    assert run(capsys, *args)[1] == ref
    monkeypatch.setenv("SUMFREE_THREADS", "zero")
    assert run(capsys, *args)[0] == 2


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "fpsumfree", "check", files["f5_pentagon"]], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "SUM-FREE\n"
