import itertools

import pytest

from contrans.formula import parse
from contrans.matrix import LogicFileError, load_matrix
from contrans.oracle import (
    InconsistentSource, MCLift, MatrixOracle, ModelOracle, check_consequence_axioms, load_source, parse_theory,
)


def test_native_mc_differs_from_lift():
    native = load_source("k3")
    lifted = MCLift(native)
    gamma, delta = [parse("p0 | p1")], [parse("p0"), parse("p1")]
    assert native.mc(gamma, delta)
    assert not lifted.mc(gamma, delta)
    # single conclusions agree
    assert lifted.sc(gamma, parse("p1 | p0")) == native.sc(gamma, parse("p1 | p0")) is True


@pytest.mark.parametrize("name", ["k3", "lp", "l3", "godel3", "cpc2", "toy_theory"])
def test_bundled_sources_satisfy_axioms(name):
    oracle = load_source(name)
    rep = check_consequence_axioms(oracle, 4 if name == "toy_theory" else 5)
    assert rep.ok and rep.consistent
    assert rep.checked > 0


class FlippedOracle(MatrixOracle):
    """K3 with a single sequent answer flipped."""

    def __init__(self, gamma, delta):
        super().__init__(load_matrix("k3"))
        self.flip = (frozenset(gamma), frozenset(delta))

    def _mc(self, gamma, delta):
        got = super()._mc(gamma, delta)
        return not got if (gamma, delta) == self.flip else got


def test_corrupted_oracle_is_caught():
    p0, top = parse("p0"), parse("T")
    assert not load_source("k3").mc([top], [p0])
    rep = check_consequence_axioms(FlippedOracle([top], [p0]), 4)
    assert not rep.ok
    assert rep.kinds() & {"cut", "monotonicity"}


def test_flipped_reflexivity_is_caught():
    p0 = parse("p0")
    rep = check_consequence_axioms(FlippedOracle([p0], [p0]), 3)
    assert "reflexivity" in rep.kinds()


@pytest.mark.parametrize("cap", [None, 1, 7])
def test_memo_is_transparent(cap):
    plain, capped = load_source("lp"), load_source("lp", cache_cap=cap)
    forms = plain.prefix(5)
    queries = [(g, phi) for r in range(3) for g in itertools.combinations(forms, r) for phi in forms]
    for _ in range(2):
        for gamma, phi in queries:
            assert plain.sc(gamma, phi) == capped.sc(gamma, phi)
    assert plain.evaluations == len(set((frozenset(g), p) for g, p in queries))
    if cap is not None:
        assert len(capped._sc_cache) <= cap
        assert capped.evaluations > plain.evaluations
    else:
        assert capped.evaluations == plain.evaluations


def test_inconsistent_source():
    oracle = load_source("toy_inconsistent")
    assert not oracle.consistent()
    with pytest.raises(InconsistentSource, match="consistent"):
        oracle.require_consistent()


def test_model_oracle_semantics():
    o = load_source("toy_theory")
    assert o.prefix(4) == ["rain", "wet", "cold", "snow"]
    assert o.sc(["rain"], "wet")
    assert o.sc(["snow"], "cold")
    assert not o.sc(["cold"], "wet")
    assert o.mc(["snow"], ["rain", "wet"])
    assert not o.mc([], ["rain", "cold"])
    with pytest.raises(IndexError):
        o.formula(4)


@pytest.mark.parametrize("text, match", [
    ("model: a\n", "formulas"),
    ("formulas: a b\nmodel: c\n", "unknown formulas"),
    ("formulas: a\nbogus: 1\n", "unknown key"),
    ("formulas: a\njunk\n", "unexpected"),
])
def test_theory_file_errors(text, match):
    with pytest.raises(LogicFileError, match=match):
        parse_theory(text)


def test_theory_file_by_path(tmp_path):
    p = tmp_path / "mine.logic"
    p.write_text("formulas: x y\nmodel: x\n")
    o = load_source(str(p))
    assert isinstance(o, ModelOracle) and o.name == "mine"
    assert o.sc([], "x") and not o.sc([], "y")
    with pytest.raises(LogicFileError):
        load_source(str(tmp_path / "missing.logic"))


def test_matrix_oracle_enumerates_its_signature():
    o = load_source("godel3")
    assert [str(f) for f in o.prefix(6)] == ["p0", "F", "p1", "~p0", "~F", "p2"]
    assert o.index(parse("~F")) == 4
