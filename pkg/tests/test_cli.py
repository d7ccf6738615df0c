import json
import subprocess
import sys

import numpy as np
import pytest

from loja.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_round_trip(capsys):
    code, out, _ = run(capsys, "parse", "--expr", "(x1 - floor(x1))^floor(x1)")
    assert code == 0
    assert json.loads(out) == {"arity": 1, "source": "(x1 - floor(x1))^floor(x1)"}


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "parse", "--expr", "x1 +")
    assert code == 2 and "line 1, column 5" in err


def test_usage_error_exit_code(capsys):
    assert run(capsys, "fit", "--f", "nothing")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_missing_file_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "eval", "--fn", str(tmp_path / "missing.fn"), "--at", "1")
    assert code == 2 and "error" in err


def test_eval_csv(capsys, files):
    pts = files("p.csv", "0.5\n2.25\n")
    code, out, _ = run(capsys, "eval", "--expr", "x1 - floor(x1)", "--points", pts, "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["x1,value", "0.5,0.5", "2.25,0.25"]


def test_fit_exit_codes(capsys, files):
    f, g = files("f.fn", "x1^2"), files("g.fn", "x1")
    code, out, _ = run(capsys, "fit", "--f", f, "--g", g, "--domain", "0,1", "--samples", "500",
                       "--check-star", "--check-bounded")
    rep = json.loads(out)
    assert code == 0 and rep["feasible"] and rep["g_bounded"] == "pass"
    assert rep["alpha"] == pytest.approx(2.0, rel=1e-2)
    g2 = files("g2.fn", "piecewise{ x1 < 1 : 1/(1-x1) ; x1 == 1 : 1 }")
    code, out, _ = run(capsys, "fit", "--f", g, "--g", g2, "--domain", "0,0.99999999",
                       "--samples", "500", "--check-bounded")
    assert code == 1 and json.loads(out)["g_bounded"] == "fail"


def test_fit_reverse(capsys, files):
    f, g = files("f.fn", "x1^2"), files("g.fn", "x1")
    code, out, _ = run(capsys, "fit", "--f", f, "--g", g, "--domain", "0,1", "--reverse",
                       "--samples", "500")
    assert code == 0 and json.loads(out)["alpha"] == 1


def test_zeroset_out_file(capsys, files, tmp_path):
    fn = files("f.fn", "x1*(x1 - 0.5)")
    out_path = tmp_path / "z.json"
    code, out, _ = run(capsys, "zeroset", "--fn", fn, "--domain=-1,1", "--samples", "801",
                       "--eps", "1e-6", "--out", str(out_path))
    assert code == 0 and out == ""
    rep = json.loads(out_path.read_text())
    np.testing.assert_allclose(sorted(r[0] for r in rep["representatives"]), [0.0, 0.5], atol=1e-2)


def test_multifunction_commands(capsys, files):
    b1 = files("b1.fn", "piecewise{ x1 > -1 && x1 <= 1 : x1^2 }")
    b2 = files("b2.fn", "piecewise{ x1 > -1 && x1 <= 1 : x1^2 + 1 }")
    common = ["--branches", f"{b1},{b2}", "--domain=-1,1", "--samples", "801", "--at", "1"]
    code, out, _ = run(capsys, "preimage", *common, "--kind", "strong")
    assert code == 0 and json.loads(out)["points"] == [[1.0]]
    code, out, _ = run(capsys, "classify", *common[:-2], "--at", "0.5")
    assert code == 0 and json.loads(out)["continuous"] is True
    code, out, _ = run(capsys, "mfloja", *common, "--K", "0,1")
    assert code == 0 and json.loads(out)["feasible"]


def test_multifunction_jsonl(capsys, files):
    lines = [json.dumps({"x": [x], "values": [[0.0], [1.0]] if x == 0.5 else [[0.0 if x < 0.5 else 1.0]]})
             for x in np.linspace(0, 1, 101).round(12)]
    mf = files("m.jsonl", "\n".join(lines) + "\n")
    code, out, _ = run(capsys, "classify", "--mf", mf, "--at", "0.5")
    flags = json.loads(out)
    assert code == 0 and flags["upper"] and not flags["lower"]


def test_set_distances(capsys, files):
    a, b, e = files("a.csv", "0\n"), files("b.csv", "0\n2\n"), files("e.csv", "# dim=1\n")
    assert json.loads(run(capsys, "hausdorff", "--a", a, "--b", b)[1]) == {"hausdorff": 2.0}
    assert json.loads(run(capsys, "hausdorff", "--a", a, "--b", e)[1]) == {"hausdorff": 3.0}
    d = json.loads(run(capsys, "kuratowski", "--a", a, "--b", b)[1])["kuratowski"]
    assert d == pytest.approx(np.sqrt(2))


def test_medial_commands(capsys, files):
    X = files("x.csv", "-1,0\n1,0\n")
    code, out, _ = run(capsys, "medial", "--X", X, "--domain=-2,2;-2,2", "--samples", "441",
                       "--format", "csv")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "x1,x2,multiplicity,gap"
    assert all(float(r.split(",")[0]) == 0.0 for r in rows[1:])
    code, out, _ = run(capsys, "nregion", "--X", X, "--domain=-2,2;-2,2", "--samples", "441",
                       "--at", "1,0")
    assert code == 0 and min(p[0] for p in json.loads(out)["points"]) >= 0
    X01 = files("x01.csv", "0\n1\n")
    code, out, _ = run(capsys, "medloja", "--X", X01, "--domain", "0,0.45", "--at", "0.25",
                       "--samples", "200")
    assert code == 0 and "degenerate" in json.loads(out)["flags"]


def test_paper_suite_subsets(capsys):
    code, out, err = run(capsys, "paper-suite", "--only", "ex4_9", "--param", "M=12")
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1
    alpha = next(v for v in _walk(rep["results"]) if isinstance(v, dict) and "alpha" in v)["alpha"]
    assert alpha >= 8
    code, out, _ = run(capsys, "paper-suite", "--only", "ex3_8")
    assert "\"g_bounded\": \"fail\"" in out
    assert run(capsys, "paper-suite", "--only", "nope")[0] == 2
    assert run(capsys, "paper-suite", "--only", "ex4_9", "--param", "M")[0] == 2


def _walk(obj):
    yield obj
    if isinstance(obj, dict):
        for v in obj.values():
            yield from _walk(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _walk(v)


def test_plot_data(capsys, tmp_path):
    out_csv = tmp_path / "env.csv"
    code, _, _ = run(capsys, "paper-suite", "--only", "c4", "--plot", "envelope",
                     "--plot-out", str(out_csv))
    lines = out_csv.read_text().splitlines()
    assert code == 0 and lines[0] == "x,y,series" and len(lines) > 10
    code, _, err = run(capsys, "paper-suite", "--only", "c4", "--plot", "axis")
    assert code == 2 and "no 'axis' data" in err


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "loja.cli", "parse", "--expr", "2*x1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["source"] == "(2.0 * x1)"
