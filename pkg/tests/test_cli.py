import subprocess
import sys

import pytest

from contrans import cli, translate_cpc as cpc
from contrans.formula import connectives_of
from contrans.report import Report


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def checks(out):
    return [ln.split("\t") for ln in out.splitlines() if ln.startswith("CHECK\t")]


def test_translate_k3_cpc(capsys, tmp_path):
    path = tmp_path / "k3.tab"
    code, out, err = run(capsys, "translate", "--logic", "k3", "--target", "cpc", "--n", "6", "--out", str(path))
    assert code == 0
    assert out.startswith("# target=cpc steps=6 oracle_queries=")
    assert "dag_nodes=4416" in out
    table = cpc.read_table(path.read_text())
    assert sorted(table) == list(range(6))


def test_translate_to_stdout_keeps_summary_on_stderr(capsys):
    code, out, err = run(capsys, "translate", "--logic", "k3", "--target", "cpc", "--n", "2")
    assert code == 0
    assert out.splitlines()[-1] == "alpha 1 -> #" + out.splitlines()[-1].split("#")[-1]
    assert err.startswith("# target=cpc steps=2")


def test_translate_lp_bck_is_implication_only(capsys):
    code, out, _ = run(capsys, "translate", "--logic", "lp", "--target", "bck", "--n", "3")
    assert code == 0
    table = cpc.read_table(out)
    assert connectives_of(list(table.values())) == {"imp"}


@pytest.mark.parametrize("argv, message", [
    (["translate", "--logic", "toy_inconsistent", "--target", "cpc-mc", "--n", "3"], "consistent"),
    (["translate", "--logic", "k3", "--target", "cpc", "--n", "9"], "cap 8"),
    (["translate", "--logic", "k3", "--target", "fl", "--n", "6"], "cap 5"),
    (["translate", "--logic", "nope", "--target", "cpc", "--n", "2"], "unknown logic"),
    (["translate", "--target", "cpc", "--n", "2"], "--logic"),
    (["translate", "--logic", "k3", "--n", "2"], "--target"),
    (["verify"], "verify needs"),
    (["verify", "--suite", "fragment"], "--connectives"),
    (["verify", "--suite", "fragment", "--connectives", "frob"], "unknown connective"),
    (["verify", "--lp-refute", "missing.map"], "no candidate map"),
    (["verify", "--target", "kleene-cnf", "--vars", "5"], "--seed"),
])
def test_config_errors_exit_2(capsys, argv, message):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert message in err


def test_bad_logic_file_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.logic"
    bad.write_text("values: 0 1\ndesignated: 1\nop and/2\n0 1\n")
    code, _, err = run(capsys, "translate", "--logic", str(bad), "--target", "cpc", "--n", "2")
    assert code == 2 and "needs 4 entries" in err


def test_theory_file_source(capsys, tmp_path):
    theory = tmp_path / "t.logic"
    theory.write_text("formulas: a b\nmodel: a\n")
    code, out, _ = run(capsys, "verify", "--logic", str(theory), "--target", "cpc-mc", "--n", "2")
    assert code == 0
    assert all(c[3] == "PASS" for c in checks(out))


def test_axiom_spot_check_failure_exits_2(capsys, monkeypatch):
    from contrans.oracle import AxiomReport

    monkeypatch.setattr(cli, "check_consequence_axioms",
                        lambda oracle, n: AxiomReport(1, True, [("cut", (0,), (1,))]))
    code, _, err = run(capsys, "translate", "--logic", "k3", "--target", "cpc", "--n", "3")
    assert code == 2 and "cut" in err


def test_verify_k3_cpc(capsys):
    code, out, _ = run(capsys, "verify", "--logic", "k3", "--target", "cpc", "--n", "6")
    assert code == 0
    rows = checks(out)
    assert [r[1] for r in rows] == ["conservative-sc", "conservative-mc", "prefix-invariant", "gamma-implies-delta",
                                    "valuation-lemma", "most-general", "disjunction-property"]
    assert all(r[3] == "PASS" for r in rows)


@pytest.mark.parametrize("target, n", [("fl", "4"), ("bck", "3"), ("kleene-cnf", "6"),
                                       ("implication-fragment", "4"), ("monotone-lp", "4")])
def test_verify_other_targets(capsys, target, n):
    logic = [] if target in cli.CLASSICAL_TARGETS else ["--logic", "cpc2"]
    code, out, _ = run(capsys, "verify", *logic, "--target", target, "--n", n, "--depth", "2")
    assert code == 0
    assert checks(out) and all(r[3] == "PASS" for r in checks(out))


def test_failed_check_exits_1(capsys, monkeypatch):
    def broken(table, n=None):
        rep = Report("prefix-invariant", "forced")
        rep.checked = 1
        rep.fail(((0,), (1,)))
        return rep

    monkeypatch.setattr(cpc, "check_prefix_invariant", broken)
    code, out, _ = run(capsys, "verify", "--logic", "k3", "--target", "cpc", "--n", "3")
    assert code == 1
    line = next(r for r in checks(out) if r[1] == "prefix-invariant")
    assert line[3] == "FAIL" and "((0,), (1,))" in line[5]


def test_suite_definability(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lemma35")
    assert code == 0
    assert checks(out)[0][5] == "agree=16/16"


def test_suites_independent_of_jobs(capsys):
    outs = []
    for jobs in ("1", "3"):
        code, out, _ = run(capsys, "verify", "--suite", "all", "--jobs", jobs, "--depth", "2")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_fragment_verdicts(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "fragment", "--connectives", "and,or,top,bot")
    assert code == 0
    assert "VERDICT\tuniversal=False\treason=M" in out


@pytest.mark.parametrize("name, kind", [("identity.map", "direct"), ("candidates/collapse.map", "subset")])
def test_lp_refute(capsys, name, kind):
    code, out, _ = run(capsys, "verify", "--lp-refute", name)
    assert code == 0
    assert f"WITNESS\tkind = {kind}" in out
    assert checks(out)[0][3] == "PASS"


def test_bench_is_deterministic(capsys):
    runs = [run(capsys, "bench", "--logic", "k3", "--target", "cpc", "--n", "6")[1] for _ in range(2)]
    assert runs[0] == runs[1]
    rows = [ln.split("\t") for ln in runs[0].splitlines()[1:]]
    assert [int(r[2]) for r in rows] == [2, 8, 32, 128, 512, 2048]
    dag = [int(r[3]) for r in rows]
    assert dag == sorted(dag)


def test_bench_kernels(capsys):
    code, out, _ = run(capsys, "bench", "--kernels", "--n", "4", "--repeat", "1")
    assert code == 0
    assert checks(out)[0][1] == "kernels-agree"


def test_report_to_file(capsys, tmp_path):
    path = tmp_path / "report.txt"
    code, out, _ = run(capsys, "verify", "--suite", "affine", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("CHECK\taffine-chain")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "contrans", "verify", "--suite", "affine"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
