import itertools
import json
import subprocess
import sys

import pytest

from ndcurry.cli import main, parse_arg


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_arg():
    assert parse_arg("[1, 2,3]") == (1, 2, 3)
    assert parse_arg("[]") == ()
    assert parse_arg("4") == 4


# -- values ---------------------------------------------------------------------------------

def test_values_perm_nd(capsys):
    code, out, _ = run(capsys, "values", "perm", "[1,2,3]", "--encoding", "nd")
    assert code == 0
    lines = out.split()
    assert sorted(lines) == lines
    assert {tuple(json.loads(l)) for l in lines} == set(itertools.permutations((1, 2, 3)))


def test_values_eo_with_plan_literal(capsys):
    code, out, _ = run(capsys, "values", "eo", "4", "--encoding", "plan", "--plan", "=1")
    assert (code, out) == (0, "4\n")


def test_values_min_nd(capsys):
    code, out, _ = run(capsys, "values", "min", "[3,1,2]", "--encoding", "nd")
    assert (code, out) == (0, "1\n")


def test_values_plan_exploration_json(capsys):
    code, out, _ = run(capsys, "values", "perm", "[1,2]", "--encoding", "plan", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["values"] == [[1, 2], [2, 1]] and data["plans"] == 2


def test_values_plan_depth(capsys):
    code, out, _ = run(capsys, "values", "perm", "[0,1,2]", "--encoding", "plan", "--depth", "3")
    assert code == 0 and len(out.split()) == 6


def test_expect_values(capsys):
    assert run(capsys, "values", "min", "[]", "--expect-values")[0] == 1
    assert run(capsys, "values", "min", "[]")[0] == 0
    assert run(capsys, "values", "min", "[2]", "--expect-values")[0] == 0


@pytest.mark.parametrize("argv", [
    ["values", "nosuch", "1"],
    ["values", "perm"],
    ["values", "perm", "[1,2"],
    ["values", "eo", "-1"],
    ["values", "eo", "4", "--plan", "=1"],
    ["values", "eo", "4", "--encoding", "plan", "--plan", "=2"],
    ["values", "eo", "4", "--encoding", "plan", "--plan", "=1", "--depth", "1"],
    ["values", "perm", "[1,2,3]", "--encoding", "plan", "--depth", "5"],
    ["values", "last", "[1]", "--encoding", "plan"],
    ["plans", "sort", "[1]"],
    ["bogus"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("ndcurry: error:") or "usage" in err.lower()


# -- plans ---------------------------------------------------------------------------------------

def test_plans_table(capsys):
    code, out, _ = run(capsys, "plans", "eo", "4")
    assert code == 0
    rows = [line.split("->") for line in out.strip().splitlines()]
    assert {r[1].strip() for r in rows} == {"4", "5"}


def test_plans_json_depth(capsys):
    code, out, _ = run(capsys, "plans", "min", "[3,1,2]", "--depth", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["plans"]) == 8
    assert {r["output"] for r in data["plans"]} == {None, 1}


# -- eval --------------------------------------------------------------------------------------

def test_eval_calltime(capsys):
    code, out, _ = run(capsys, "eval", "peano", "double (0 ? S 0)",
                       "--semantics", "calltime", "--strategy", "lazy")
    assert (code, out) == (0, "[0, 2] failed=0 fuel_exhausted=0\n")


def test_eval_runtime_lazy(capsys):
    code, out, _ = run(capsys, "eval", "peano.core", "double (0 ? S 0)",
                       "--semantics", "runtime", "--strategy", "lazy", "--format", "json")
    assert code == 0 and json.loads(out)["value_set"] == ["0", "1", "2"]


def test_eval_lazy_head(capsys):
    code, out, _ = run(capsys, "eval", "lists.core", "head (Cons 0 (tail Nil))", "--strategy", "lazy")
    assert (code, out) == (0, "[0] failed=0 fuel_exhausted=0\n")
    code, out, _ = run(capsys, "eval", "lists", "head (Cons 0 (tail Nil))", "--strategy", "eager",
                       "--expect-values")
    assert code == 1 and "failed=1" in out


def test_eval_program_file(capsys, tmp_path):
    src = tmp_path / "coin.core"
    src.write_text("flip = True ? False\n")
    code, out, _ = run(capsys, "eval", str(src), "flip")
    assert code == 0 and out.startswith("[True, False]")


def test_eval_fuel_reported(capsys):
    code, out, _ = run(capsys, "eval", "perm", "perm [1,2,3]", "--fuel", "3")
    assert code == 0 and "fuel_exhausted=0" not in out


@pytest.mark.parametrize("argv", [
    ["eval", "peano", "double ("],
    ["eval", "peano", "nosuch 1"],
    ["eval", "missing.core", "x"],
    ["eval", "peano", "1", "--fuel", "0"],
    ["eval", "peano", "1", "--semantics", "both"],
])
def test_eval_errors_exit_2(capsys, argv):
    code, _out, err = run(capsys, *argv)
    assert code == 2 and err


def test_eval_parse_error_names_location(capsys, tmp_path):
    src = tmp_path / "bad.core"
    src.write_text("f x = x\nf (C y y) = y\n")
    code, _out, err = run(capsys, "eval", str(src), "f 1")
    assert code == 2 and "2:" in err and "non-linear" in err


# -- laws -----------------------------------------------------------------------------------------

def test_laws_filter_sortperm(capsys):
    code, out, _ = run(capsys, "laws", "--filter", "sortPerm")
    assert code == 0
    assert out.splitlines()[-1] == "1/1 laws pass"


def test_laws_unknown_filter(capsys):
    code, _out, err = run(capsys, "laws", "--filter", "nosuch")
    assert code == 2 and "nosuch" in err


@pytest.mark.parametrize("bound", ["nosuch=1", "seed=x", "tree_depth=9", "seed"])
def test_laws_bad_bound(capsys, bound):
    assert run(capsys, "laws", "--filter", "even-double", "--bound", bound)[0] == 2


def test_laws_json_is_byte_identical(capsys):
    argv = ["laws", "--filter", "sortPerm", "--filter", "last-det", "--filter", "semantics",
            "--seed", "3", "--format", "json", "--no-timing"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0
    data = json.loads(first[1])
    assert [d["name"] for d in data] == ["sortPerm", "last-det", "semantics-contrast"]
    assert all(set(d) == {"name", "status", "cases", "counterexample", "millis"} for d in data)


def test_laws_mutant_exit_1_with_counterexample(capsys):
    code, out, _ = run(capsys, "laws", "--mutant", "off-by-one-insert", "--filter", "insert",
                       "--format", "json")
    data = json.loads(out)
    assert code == 1 and data[0]["status"] == "fail" and data[0]["counterexample"]["kind"]


def test_laws_unknown_mutant(capsys):
    assert run(capsys, "laws", "--mutant", "nosuch")[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "ndcurry", "values", "eo", "4"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.split() == ["4", "5"]
    bad = subprocess.run([sys.executable, "-m", "ndcurry", "laws", "--filter", "nosuch"],
                         capture_output=True, text=True)
    assert bad.returncode == 2 and bad.stderr and not bad.stdout
