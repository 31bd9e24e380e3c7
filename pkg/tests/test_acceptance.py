"""Acceptance criteria, one test per criterion.

Each test carries ``@pytest.mark.criterion(number, title)``; the conftest prints
one PASS/FAIL line per criterion at the end of the run.
"""

import time

import pytest

from contrans import clones, kleene, substructural as sub, translate_cpc as cpc
from contrans.formula import dag_size, parse, rename, to_text, tree_size
from contrans.matrix import equivalent, fl_suite, validate_fl_algebra
from contrans.oracle import ModelOracle, load_source

SOURCES = ["k3", "lp", "l3", "godel3", "cpc2"]
BOOL = cpc.boolean_matrix()


def crit(number, title):
    return pytest.mark.criterion(number, title)


@crit(1, "beta_0 trichotomy on toy oracles")
@pytest.mark.parametrize("models, expected", [
    ([["a"], ["a", "b"]], "T"),   # |- a
    ([[], ["b"]], "F"),           # a |-
    ([["a"], []], "p0"),          # neither
])
def test_beta0_trichotomy(models, expected, record_property):
    oracle = ModelOracle(["a", "b"], models)
    t0 = time.perf_counter()
    beta0 = cpc.TranslationTable(oracle).build(1).betas[0]
    assert time.perf_counter() - t0 < 1
    assert equivalent(BOOL, beta0, parse(expected))
    record_property(expected, to_text(beta0))


@crit(2, "sc conservativity, N=6, five sources")
@pytest.mark.parametrize("source", SOURCES)
def test_sc_conservative(source, record_property):
    t0 = time.perf_counter()
    rep = cpc.verify_conservative(cpc.single_conclusion_table(load_source(source)), 6, "sc")
    elapsed = time.perf_counter() - t0
    assert rep.ok, rep.line()
    assert rep.checked == 64 * 6
    assert elapsed < 60
    record_property(source, f"{rep.checked} checks {elapsed:.2f}s")


@crit(3, "mc conservativity, N=5, five sources")
@pytest.mark.parametrize("source", SOURCES)
def test_mc_conservative(source, record_property):
    t0 = time.perf_counter()
    rep = cpc.verify_conservative(cpc.TranslationTable(load_source(source)), 5, "mc")
    elapsed = time.perf_counter() - t0
    assert rep.ok, rep.line()
    assert rep.checked == 32 * 32
    assert elapsed < 120
    record_property(source, f"{rep.checked} checks {elapsed:.2f}s")


@crit(4, "prefix invariant after every step up to n=7")
@pytest.mark.parametrize("source", ["k3", "lp", "godel3"])
def test_prefix_invariant_every_step(source, record_property):
    table = cpc.TranslationTable(load_source(source))
    total = 0
    for n in range(1, 8):
        table.build(n)
        rep = cpc.check_prefix_invariant(table, n)
        assert rep.ok, rep.line()
        total += rep.checked
    record_property(source, total)


@crit(5, "most-generality for f, renaming of f, CNF translation (cpc2, n<5)")
@pytest.mark.parametrize("which", ["f", "renamed", "cnf"])
def test_most_general(which, record_property):
    table = cpc.single_conclusion_table(load_source("cpc2"))
    n = 5
    g = {
        "f": table.translate,
        "renamed": lambda a: rename(table.translate(a), 7),
        "cnf": kleene.cnf_translate,
    }[which]
    rep = cpc.check_most_general(table, g, n)
    assert rep.ok and rep.checked == n, rep.line()
    record_property(which, "ok")


@crit(6, "disjunction property of the translation, N=5")
@pytest.mark.parametrize("source", SOURCES)
def test_disjunction_property(source, record_property):
    rep = cpc.check_disjunction_property(cpc.single_conclusion_table(load_source(source)), 5)
    assert rep.ok, rep.line()
    assert rep.info["instances"] > 0
    record_property(source, rep.info["instances"])


@crit(7, "substructural projections match the classical recursion")
@pytest.mark.parametrize("source", ["k3", "cpc2"])
@pytest.mark.parametrize("kind, n", [("fl", 5), ("bck", 4)])
def test_projections(source, kind, n, record_property):
    oracle = load_source(source)
    table = (sub.FLTranslationTable if kind == "fl" else sub.BCKTranslationTable)(oracle)
    rep = sub.check_projection(table, n)
    assert rep.ok and rep.checked == n, rep.line()
    record_property(f"{kind}/{source}", f"n<={n - 1}")


@crit(8, "FL/BCK finite-model soundness over the validated algebra suite")
@pytest.mark.parametrize("source", ["k3", "cpc2"])
def test_finite_model_soundness(source, record_property):
    suite = fl_suite()
    for m in suite:
        assert validate_fl_algebra(m.algebra).ok, m.name
    oracle = load_source(source)
    fl = sub.fl_model_check(sub.FLTranslationTable(oracle), 5, suite)
    bck = sub.bck_model_check(sub.BCKTranslationTable(oracle), 3)
    lu = sub.check_lu_closure(sub.FLTranslationTable(oracle), 5, suite)
    for rep in (fl, bck, lu):
        assert rep.ok, rep.line()
    record_property(source, f"fl={fl.checked} bck={bck.checked} algebras={len(suite)}")


@crit(9, "r_n recurrence")
def test_r_values(record_property):
    assert sub.r_values(4)[:4] == [0, 1, 3, 25]
    record_property("r", sub.r_values(4)[:4])


@crit(10, "implication definability: containment test agrees with clone closure")
def test_definability_agreement(record_property):
    agree = 0
    for f in clones.all_functions(2):
        by_containment = clones.implication_definable([f])
        by_closure = clones.closure_contains_implication([f], 2) or clones.closure_contains_implication([f], 3)
        agree += by_containment == by_closure
    assert agree == 16
    record_property("agree", "16/16")


@crit(11, "affine chain bound")
@pytest.mark.parametrize("arity", [1, 2, 3])
def test_affine_chain(arity, record_property):
    assert clones.affine_chain_max(arity) == 3
    assert clones.affine_order_violations(arity) == []
    record_property(f"arity{arity}", 3)


@crit(12, "monotone fragment into LP via p & ~p (3 vars, depth<=3)")
def test_monotone_lp(record_property):
    rep = clones.monotone_lp_by_depth(3, 3)
    assert rep.ok and rep.checked > 0, rep.line()
    record_property("checked", rep.checked)


@crit(13, "translation into the implication fragment (2 vars, depth<=3)")
def test_implication_fragment(record_property):
    rep = clones.implication_by_depth(2, 3)
    assert rep.ok and rep.checked > 0, rep.line()
    record_property("checked", rep.checked)


@crit(14, "CNF translation into K3 (3 vars, depth<=3) and the clause lemma")
@pytest.mark.slow
def test_kleene_cnf(record_property):
    rep = kleene.k_conservative_by_depth(3, 3)
    lemma = kleene.check_clause_lemma(3)
    assert rep.ok, rep.line()
    assert lemma.ok, lemma.line()
    record_property("checked", f"{rep.checked} + {lemma.checked}")


@crit(15, "LP refuter witnesses re-verify")
@pytest.mark.parametrize("name", ["identity", "cnf", "double_negation", "collapse"])
def test_lp_refuter(name, record_property):
    ref = kleene.lp_refute(kleene.load_candidate(f"{name}.map"))
    assert ref.claims
    assert ref.verify()
    assert ref.minimality()
    record_property(name, f"{ref.kind} n={ref.n}")


@crit(16, "blowup report (per-step growth, report only)")
def test_blowup_report(record_property):
    table = cpc.single_conclusion_table(load_source("k3")).build(8)
    rows = []
    for n in range(1, 9):
        queries = sum(s.queries for s in table.stats[:n])
        rows.append((n, queries, dag_size(table.betas[:n]), max(tree_size(b) for b in table.betas[:n])))
    for column in (1, 2, 3):
        values = [r[column] for r in rows]
        assert values == sorted(values)
    record_property("n=8", f"queries={rows[-1][1]} dag={rows[-1][2]} tree={rows[-1][3]:.3g}")
