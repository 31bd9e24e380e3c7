import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from contrans import substructural as sub, translate_cpc as cpc
from contrans.formula import connectives_of, parse, to_text, var, variables
from contrans.matrix import fl_suite
from contrans.oracle import ModelOracle, load_source

LABELS = ["a", "b", "c", "d", "e"]


@st.composite
def theories(draw):
    models = draw(st.lists(st.sets(st.sampled_from(LABELS)), max_size=6))
    return ModelOracle(LABELS, models, name="random")


def test_r_values():
    assert sub.r_values(4) == [0, 1, 3, 25, 601]


@pytest.mark.parametrize("n, count", [(0, 1), (1, 2), (2, 5), (3, 16)])
def test_sequences(n, count):
    seqs = sub.sequences(n)
    assert len(seqs) == count
    assert seqs[0] == ()
    assert all(len(set(s)) == len(s) for s in seqs)


def test_fl_first_step_shape():
    table = sub.FLTranslationTable(load_source("k3")).build(1)
    assert to_text(table.betas[0]) == "(p0 -> p0) & ((p1 -> p0) -> p0)"
    assert table.projection(0) is not table.betas[0]
    assert sub.classically_equivalent(table.projection(0), parse("p1"))


def test_bck_is_implication_only():
    table = sub.BCKTranslationTable(load_source("lp")).build(4)
    assert connectives_of(table.betas) == {"imp"}
    assert {"fus"} <= connectives_of(table.fusion_betas)
    assert sub.check_curry(table).ok


def test_variables_are_shifted():
    table = sub.FLTranslationTable(load_source("godel3")).build(3)
    assert sub.Q in variables(table.betas[2])
    assert variables(table.betas[2]) <= {0, 1, 2, 3}


@pytest.mark.parametrize("cls, cap", [(sub.FLTranslationTable, sub.FL_CAP), (sub.BCKTranslationTable, sub.BCK_CAP)])
def test_caps_count_the_top_index(cls, cap):
    table = cls(load_source("k3"), cap=1)
    table.build(2)
    with pytest.raises(ValueError, match="cap"):
        table.build(3)
    assert cls.cap == cap


@pytest.mark.parametrize("source", ["k3", "lp", "godel3"])
def test_projection_matches_classical_table(source):
    oracle = load_source(source)
    betas = cpc.single_conclusion_table(oracle).build(6).betas
    assert sub.check_projection_vs_cpc(oracle, betas).ok


@pytest.mark.parametrize("source", ["lp", "l3", "godel3", "toy_theory"])
def test_fl_checks_other_sources(source):
    table = sub.FLTranslationTable(load_source(source))
    for rep in (sub.check_projection(table, 4), sub.check_end_to_end(table, 4),
                sub.fl_model_check(table, 4), sub.check_lu_closure(table, 4)):
        assert rep.ok, rep.line()


@pytest.mark.parametrize("source", ["lp", "godel3", "toy_theory"])
def test_bck_checks_other_sources(source):
    table = sub.BCKTranslationTable(load_source(source))
    for rep in (sub.check_projection(table, 4), sub.check_end_to_end(table, 4),
                sub.bck_model_check(table, 3), sub.check_curry(table.build(4))):
        assert rep.ok, rep.line()


@settings(max_examples=20, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(theories())
def test_random_theories_fl(oracle):
    table = sub.FLTranslationTable(oracle)
    assert sub.check_end_to_end(table, 3).ok
    assert sub.check_projection(table, 3).ok
    assert sub.fl_model_check(table, 3).ok


@settings(max_examples=20, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(theories())
def test_random_theories_bck(oracle):
    table = sub.BCKTranslationTable(oracle)
    assert sub.check_end_to_end(table, 3).ok
    assert sub.bck_model_check(table, 2).ok


def test_model_check_detects_a_wrong_table():
    table = sub.FLTranslationTable(load_source("k3")).build(3)
    # swap two images: p0 |- T holds in K3, but the image of p0 does not entail the image of F
    table.betas[1], table.betas[2] = table.betas[2], table.betas[1]
    assert not sub.fl_model_check(table, 3).ok
    assert not sub.check_end_to_end(table, 3).ok


def test_flew_subsuite():
    names = {m.name for m in fl_suite(flew_only=True)}
    assert len(names) == 7
    assert names < {m.name for m in fl_suite()}


def test_table_stats():
    table = sub.FLTranslationTable(load_source("k3")).build(3)
    stats = sub.table_stats(table)
    assert [s[0] for s in stats] == [0, 1, 2]
    assert [s[2] for s in stats] == sorted(s[2] for s in stats)


def test_pi():
    assert to_text(sub.pi(var(1), var(0))) == "(p1 -> p0) -> p0"
