import io
import json
import shlex
from pathlib import Path

import pytest

from dlok0.cli import eval_k0, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def test_normalform():
    assert call("k0", "normalform", "--expr", "chi(0<x & x<1)") == (0, "X(0;1) - X(1;1) - 1\n")


def test_equiv_not_equivalent():
    code, out = call("equiv", "--f1", "x>0", "--f2", "x>1", "--json")
    assert code == 1
    data = json.loads(out)
    assert data["equivalent"] is False
    assert data["witness_params"] == ["1", "0"]


def test_equiv_holds():
    code, _ = call("equiv", "--f1", "x<y", "--f2", "y<x")
    assert code == 0


def test_verify_factorial():
    code, out = call("verify", "factorial", "--n", "3", "--a", "0", "--b", "1")
    assert code == 0
    assert out.startswith("holds: 6 * f_3(1,0)")


@pytest.mark.parametrize("argv", [
    ["verify", "convolution", "--n", "2", "--a", "0", "--c", "1", "--b", "2"],
    ["verify", "iprime", "--k", "3", "--l", "2"],
    ["verify", "cc1", "--f1", "x>0", "--f2", "x<0"],
    ["verify", "php", "--f1", "x>1", "--f2", "x>0"],
    ["verify", "cancellativity", "--trials", "30"],
    ["verify", "delannoy", "--max", "3"],
])
def test_verifiers_hold(argv):
    assert call(*argv)[0] == 0


def test_cc1_fails_for_comparable_sets():
    assert call("verify", "cc1", "--f1", "x>1", "--f2", "x>0")[0] == 1


def test_chi_json_is_stable():
    code, out = call("chi", "-f", "x < y", "--params", "0", "--json")
    assert code == 0
    assert out == ('{"colors": [{"coeff": 1, "gaps": [2, 0]}, {"coeff": 1, "gaps": [1, 1]}, '
                   '{"coeff": 1, "gaps": [1, 0]}, {"coeff": 1, "gaps": [0, 2]}, '
                   '{"coeff": 1, "gaps": [0, 1]}], "params": ["0"]}\n')
    assert call("chi", "-f", "x < y", "--params", "0", "--json")[1] == out


def test_split_and_qe():
    assert call("split", "-f", "x>0", "--params", "1,0")[1] == "1 > x > 0\n1 = x > 0\nx > 1 > 0\n"
    assert call("qe", "-f", "E y. (x<y & y<1)")[1] == "x < 1\n"
    assert call("parse", "-f", "0<x<1")[1] == "(0 < x & x < 1)\n"


def test_k0_arithmetic():
    code, out = call("k0", "mul", "--expr", "X(0;1)", "--expr", "X(0;1)", "--json")
    assert json.loads(out)["normal_form"] == "2*X(0;2) + X(0;1)"
    assert eval_k0("chi(x>0) - X(0;1)") == eval_k0("0")
    assert eval_k0("2*(chi(x=0) + 1)") == eval_k0("4")


def test_zeta_and_inverse():
    code, out = call("zeta", "--poly", "X(-inf;1)", "--params", "0", "--json")
    char = out.strip()
    assert json.loads(char)["params"] == ["0"]
    assert call("zeta-inv", "--char", char) == (0, "X(-inf;1)\n")


def test_random_set_is_seeded():
    a = call("random-set", "--n", "2", "--params", "0", "--seed", "3", "--json")
    assert a == call("random-set", "--n", "2", "--params", "0", "--seed", "3", "--json")


@pytest.mark.parametrize("argv", [
    ["parse", "-f", "x <"],
    ["k0", "add", "--expr", "1"],
    ["k0", "normalform", "--expr", "chi(x<"],
    ["zeta-inv"],
    ["zeta-inv", "--char", "{not json"],
    ["verify", "iprime", "--k", "1", "--l", "2"],
    ["verify", "php", "--f1", "x>0", "--f2", "x>1"],
    ["chi", "-f", "x>0", "--params", "a"],
    ["nosuchcommand"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert call(*argv)[0] == 2


def readme_examples():
    path = Path(__file__).resolve().parent.parent / "README.md"
    examples = []
    inside = False
    for line in path.read_text().splitlines():
        if line.startswith("```"):
            inside = line == "```console"
            continue
        if not inside:
            continue
        if line.startswith("$ dlok0 "):
            examples.append([line[len("$ dlok0 "):], []])
        elif examples:
            examples[-1][1].append(line)
    return examples


@pytest.mark.parametrize("command, expected", readme_examples(), ids=lambda v: v if isinstance(v, str) else "")
def test_readme_examples(command, expected):
    code, out = call(*shlex.split(command))
    assert code in (0, 1)
    assert out == "\n".join(expected) + "\n"
