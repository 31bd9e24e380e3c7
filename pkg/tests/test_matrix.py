import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contrans import kernels
from contrans.formula import SignatureError, parse, var
from contrans.matrix import (
    LogicFileError, UnboundVariable, bundled_names, definable_functions, designation_masks, entails,
    entails_mc, equivalent, evaluate, fl_suite, format_logic, is_commutative, is_integral, is_tautology,
    is_zero_bounded, load_matrix, parse_logic, valuation_grid, validate_fl_algebra, value_table,
)
from contrans.kleene import prec_monotone_violations

K3, LP, BOOL = load_matrix("k3"), load_matrix("lp"), load_matrix("bool")


def test_valuation_grid_first_variable_slowest():
    g = valuation_grid(3, 2)
    assert g.tolist() == [[0, 0, 0, 1, 1, 1, 2, 2, 2], [0, 1, 2, 0, 1, 2, 0, 1, 2]]
    assert valuation_grid(2, 0).shape == (0, 1)
    with pytest.raises(MemoryError):
        valuation_grid(3, 30)


@pytest.mark.parametrize("m, gamma, phi, expected", [
    (K3, [], "p0 | ~p0", False),
    (LP, [], "p0 | ~p0", True),
    (K3, ["p0", "~p0"], "p1", True),
    (LP, ["p0", "~p0"], "p1", False),
    (K3, ["p0 & p1"], "p1", True),
    (LP, ["p0", "~p0 | p1"], "p1", False),
    (BOOL, ["p0", "p0 -> p1"], "p1", True),
    (BOOL, [], "((p0 -> p1) -> p0) -> p0", True),
    (BOOL, ["p0 | p1"], "p0", False),
])
def test_entailment_examples(backend, m, gamma, phi, expected):
    assert entails(m, [parse(g) for g in gamma], parse(phi)) is expected


@pytest.mark.parametrize("m, gamma, delta, expected", [
    (K3, ["p0 | p1"], ["p0", "p1"], True),
    (K3, [], ["p0", "~p0"], False),
    (LP, [], ["p0", "~p0"], True),
    (LP, ["p0", "~p0"], [], False),
    (K3, ["p0", "~p0"], [], True),
])
def test_multiple_conclusion_examples(backend, m, gamma, delta, expected):
    assert entails_mc(m, [parse(g) for g in gamma], [parse(d) for d in delta]) is expected


def test_evaluate_matches_kernel(backend):
    phi = parse("~(p0 & p1) | p2 & ~p0")
    order, vals = value_table(K3, [phi], [0, 1, 2])
    grid = valuation_grid(3, 3)
    for j in range(grid.shape[1]):
        v = {i: int(grid[i, j]) for i in range(3)}
        assert K3.algebra.values[vals[0, j]] == evaluate(K3, phi, v)


def test_backends_agree():
    phis = [parse(s) for s in ("p0 -> p1 -> p0", "~(p0 | ~p2) & p1", "(p0 <-> p1) | F")]
    results = []
    for name in sorted(kernels.BACKENDS):
        prev = kernels.BACKEND
        kernels.use_backend(name)
        try:
            results.append(value_table(load_matrix("l3"), phis[:2], [0, 1, 2])[1])
        finally:
            kernels.use_backend(prev)
    assert all(np.array_equal(results[0], r) for r in results)
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_evaluation_errors():
    with pytest.raises(UnboundVariable):
        evaluate(K3, parse("p0 & p1"), {0: "1"})
    with pytest.raises(SignatureError):
        value_table(K3, [parse("p0 -> p1")])


def test_designation_masks_and_tautology():
    order, (m0, m1), full = designation_masks(BOOL, [parse("p0"), parse("p1")], [0, 1])
    assert order == (0, 1) and full == 0b1111
    assert m0 == 0b1100 and m1 == 0b1010
    assert is_tautology(BOOL, parse("p0 | ~p0"))
    assert not is_tautology(K3, parse("p0 | ~p0"))
    assert equivalent(K3, parse("~~p0"), parse("p0"))
    assert not equivalent(load_matrix("godel3"), parse("~~p0"), parse("p0"))


@settings(max_examples=30)
@given(st.sampled_from(bundled_names()))
def test_format_parse_roundtrip(name):
    m = load_matrix(name) if name not in ("toy_inconsistent", "toy_theory") else BOOL
    again = parse_logic(format_logic(m))
    assert again.algebra.values == m.algebra.values
    assert again.designated == m.designated
    for op in m.algebra.ops:
        assert np.array_equal(again.algebra.ops[op], m.algebra.ops[op])


@pytest.mark.parametrize("text, match", [
    ("values: 0 1\n", "designated"),
    ("values: 0 1\ndesignated: 2\n", "designated value"),
    ("values: 0 1\ndesignated: 1\nop and/2\n0 0 0\n", "needs 4 entries"),
    ("values: 0 1\ndesignated: 1\nop and/x\n", "bad operation header"),
    ("values: 0 1\ndesignated: 1\nop not/2\n0 0 0 0\n", "arity"),
    ("values: 0 1\ndesignated: 1\nop not/1\n0 2\n", "unknown value"),
    ("values: 0 1\ndesignated: 1\nstray line\n", "unexpected"),
])
def test_malformed_logic_files(text, match):
    with pytest.raises(LogicFileError, match=match):
        parse_logic(text)


def test_unknown_bundled_name():
    with pytest.raises(LogicFileError, match="no bundled logic"):
        load_matrix("nope")


@pytest.mark.parametrize("m", fl_suite(), ids=lambda m: m.name)
def test_bundled_fl_algebras_validate(m):
    assert validate_fl_algebra(m.algebra).ok


def test_fl_flags():
    by_name = {m.name: m.algebra for m in fl_suite()}
    luk3 = by_name["luk3"]
    assert is_commutative(luk3) and is_integral(luk3) and is_zero_bounded(luk3)
    assert not is_integral(by_name["sugihara3"])
    assert not is_commutative(by_name["nc4"])
    flew = {m.name for m in fl_suite(flew_only=True)}
    assert "luk3" in flew and "nc4" not in flew and "sugihara3" not in flew


def test_broken_residuum_reports_witness():
    text = format_logic(load_matrix("luk3", "fl"))
    text = text.replace("op imp/2\n1 1 1\nh 1 1\n0 h 1", "op imp/2\n1 1 1\nh h 1\n0 h 1")
    report = validate_fl_algebra(parse_logic(text).algebra)
    assert not report
    assert report.law == "residuation"
    assert len(report.witness) == 3


def test_k3_term_functions_are_prec_monotone():
    assert prec_monotone_violations(2) == []
    # p, ~p, p & ~p, p | ~p
    assert len(definable_functions(K3.algebra, 1, ["not", "and", "or"])) == 4


def test_boolean_clone_is_everything():
    assert len(definable_functions(load_matrix("bool").algebra, 2)) == 16


def test_pure_python_switch():
    import os
    import subprocess
    import sys
    env = dict(os.environ, CONTRANS_PURE_PYTHON="1")
    proc = subprocess.run([sys.executable, "-c", "import contrans; print(contrans.BACKEND)"],
                          capture_output=True, text=True, env=env)
    assert proc.stdout.strip() == "python"
