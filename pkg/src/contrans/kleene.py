"""Kleene's K3 and the logic of paradox LP over the same three-element algebra.

``cnf_translate`` maps classical logic conservatively into K3. ``lp_refute``
runs the argument that no map from classical logic into LP is conservative
against a concrete candidate, returning a machine-checked witness.
"""

from __future__ import annotations

import itertools
import typing as t
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .exhaustive import compare_consequence, depth_classes, var_table
from .formula import (
    Enumeration, Formula, Signature, SignatureError, apply, bot, conj, disj, parse, to_text, top, var,
    variables, walk,
)
from .matrix import FiniteMatrix, definable_functions, designation_masks, load_matrix, masks_entail, value_table
from .report import Report

Literal = tuple[int, bool]          # (variable index, positive?)
Clause = frozenset                  # of Literal


@lru_cache(maxsize=None)
def k3() -> FiniteMatrix:
    return load_matrix("k3")


@lru_cache(maxsize=None)
def lp() -> FiniteMatrix:
    return load_matrix("lp")


@lru_cache(maxsize=None)
def classical() -> FiniteMatrix:
    return load_matrix("bool")


def _negate(c: Clause) -> Clause:
    return frozenset((v, not s) for v, s in c)


def _complementary(c: Clause) -> bool:
    return any((v, not s) in c for v, s in c)


def _product(a: frozenset, b: frozenset) -> frozenset:
    return frozenset(u for u in (x | y for x in a for y in b) if not _complementary(u))


def _literal_key(lit: Literal) -> tuple[int, int]:
    return lit[0], 0 if lit[1] else 1


def _clause_key(c: Clause) -> tuple:
    return len(c), tuple(sorted(map(_literal_key, c)))


@dataclass(frozen=True)
class ClauseForm:
    """A set of clauses (``kind="cnf"``) or of terms (``kind="dnf"``); each a set of literals.

    Clauses never contain a variable together with its negation.
    """

    items: frozenset
    kind: str = "cnf"

    def __post_init__(self):
        if any(_complementary(c) for c in self.items):
            raise ValueError("a clause may not contain a literal and its negation")

    def ordered(self) -> list[list[Literal]]:
        return [sorted(c, key=_literal_key) for c in sorted(self.items, key=_clause_key)]

    def to_formula(self) -> Formula:
        inner, outer = (disj, conj) if self.kind == "cnf" else (conj, disj)
        lits = (lambda c: [var(v) if s else apply("not", var(v)) for v, s in c])
        return outer([inner(lits(c)) for c in self.ordered()])

    def __str__(self) -> str:
        return to_text(self.to_formula())


def _lit(i: int) -> tuple[frozenset, frozenset]:
    unit = frozenset([frozenset([(i, True)])])
    return unit, unit


_TRUE = (frozenset(), frozenset([frozenset()]))
_FALSE = (frozenset([frozenset()]), frozenset())


def nf_not(a):
    return frozenset(map(_negate, a[1])), frozenset(map(_negate, a[0]))


def nf_and(a, b):
    return a[0] | b[0], _product(a[1], b[1])


def nf_or(a, b):
    return _product(a[0], b[0]), a[1] | b[1]


def nf_imp(a, b):
    return nf_or(nf_not(a), b)


NF_RULES: dict[str, t.Callable] = {
    "not": nf_not, "and": nf_and, "fus": nf_and, "or": nf_or, "imp": nf_imp,
    "rimp": lambda a, b: nf_imp(b, a),
    "iff": lambda a, b: nf_and(nf_imp(a, b), nf_imp(b, a)),
    "top": lambda: _TRUE, "one": lambda: _TRUE, "bot": lambda: _FALSE, "zero": lambda: _FALSE,
}


def normal_forms(phi: Formula) -> tuple[ClauseForm, ClauseForm]:
    """Conjunctive and disjunctive normal forms by distribution, built bottom-up.

    Tautological clauses and contradictory terms are dropped; nothing else is simplified.
    """
    memo: dict[int, tuple[frozenset, frozenset]] = {}
    for node in walk(phi):
        if node.is_var:
            memo[node.uid] = _lit(node.index)
            continue
        rule = NF_RULES.get(node.conn.name)
        if rule is None:
            raise SignatureError(f"no normal-form rule for {node.conn.name!r}")
        memo[node.uid] = rule(*(memo[a.uid] for a in node.args))
    c, d = memo[phi.uid]
    return ClauseForm(c, "cnf"), ClauseForm(d, "dnf")


def cnf_translate(phi: Formula) -> Formula:
    return normal_forms(phi)[0].to_formula()


# ----------------------------------------------------------- K3 checking

def _k3_clause_mask(c: Clause, nvars: int) -> int:
    """Bitset of the K3 valuations (grid order) giving the clause the value 1."""
    grid = list(itertools.product(range(3), repeat=nvars))  # first variable slowest
    one = 2
    m = 0
    for j, v in enumerate(grid):
        if any(v[x] == (one if s else 0) for x, s in c):
            m |= 1 << j
    return m


def clause_form_mask(cf: frozenset, nvars: int, cache: dict | None = None) -> int:
    """K3 designation bitset of a CNF given as a clause set."""
    cache = {} if cache is None else cache
    full = (1 << 3 ** nvars) - 1
    m = full
    for c in cf:
        cm = cache.get(c)
        if cm is None:
            cm = cache[c] = _k3_clause_mask(c, nvars)
        m &= cm
    return m


def k3_no_tautology_without_constants(nvars: int = 2) -> bool:
    """Without truth constants no K3 term function is constantly 1."""
    alg = k3().algebra
    one = alg.index("1")
    return not any(all(x == one for x in f) for a in range(1, nvars + 1)
                   for f in definable_functions(alg, a, ["not", "and", "or"]))


CPC_SIGNATURE = ("not", "and", "or", "imp", "top", "bot")


def verify_k_conservative(n: int, varcap: int = 3) -> Report:
    """Γ ⊢ α_k classically iff f(Γ) ⊢ f(α_k) in K3, over all Γ within the first ``n`` formulas."""
    enum = Enumeration(Signature.of(*CPC_SIGNATURE, max_vars=varcap))
    src = enum.prefix(n)
    images = [cnf_translate(f) for f in src]
    pool = range(varcap)
    _, cm, cfull = designation_masks(classical(), src, pool)
    _, km, kfull = designation_masks(k3(), images, pool)
    rep = Report("k-conservative", f"N={n} vars<={varcap}")
    for x in range(1 << n):
        xs = [i for i in range(n) if x >> i & 1]
        for k in range(n):
            rep.checked += 1
            a = masks_entail([cm[i] for i in xs], [cm[k]], cfull)
            b = masks_entail([km[i] for i in xs], [km[k]], kfull)
            if a != b:
                rep.fail((tuple(to_text(src[i]) for i in xs), to_text(src[k]), a, b))
    return rep


def cnf_classes(nvars: int, depth: int) -> tuple[dict, list]:
    """Semantic classes of classical formulas of depth ``<= depth`` for the CNF check.

    Returns ``(pairs, reps)``: ``pairs`` maps each ``(truth table, clause set)`` of
    a translated formula to its K3 bitset; ``reps`` are representatives of the
    depth ``< depth`` classes with their full keys ``(table, cnf, dnf)``.
    """
    full = (1 << (1 << nvars)) - 1
    leaves = {(var_table(nvars, i), *_lit(i)): var(i) for i in range(nvars)}
    leaves[(full, *_TRUE)] = top()
    leaves[(0, *_FALSE)] = bot()
    ops = [
        ("not", 1, lambda a: (full & ~a[0], *nf_not(a[1:]))),
        ("and", 2, lambda a, b: (a[0] & b[0], *nf_and(a[1:], b[1:]))),
        ("or", 2, lambda a, b: (a[0] | b[0], *nf_or(a[1:], b[1:]))),
        ("imp", 2, lambda a, b: (full & (~a[0] | b[0]), *nf_imp(a[1:], b[1:]))),
    ]
    inner = depth_classes(leaves, ops, max(depth - 1, 0))[-1]
    finals: set[tuple[int, frozenset]] = {(k[0], k[1]) for k in inner}
    if depth > 0:
        keys = list(inner)
        prod_memo: dict = {}

        def prod(a, b):
            hit = prod_memo.get((a, b))
            if hit is None:
                hit = prod_memo[(a, b)] = _product(a, b)
            return hit

        for a in keys:
            finals.add((full & ~a[0], frozenset(map(_negate, a[2]))))
        for a, b in itertools.product(keys, repeat=2):
            finals.add((a[0] & b[0], a[1] | b[1]))
            finals.add((a[0] | b[0], prod(a[1], b[1])))
            finals.add((full & (~a[0] | b[0]), prod(frozenset(map(_negate, a[2])), b[1])))
    cache: dict = {}
    pairs = {key: clause_form_mask(key[1], nvars, cache) for key in finals}
    return pairs, list(inner.items())


def k_conservative_by_depth(nvars: int = 3, depth: int = 3) -> Report:
    """Exhaustive CNF conservativity over every finite Γ of formulas with ``nvars`` variables and depth ``<= depth``.

    Also re-derives each depth ``< depth`` class's CNF through :func:`cnf_translate` on its
    representative and evaluates it with the matrix engine, as a cross-check of the
    clause-set evaluation.
    """
    pairs, reps = cnf_classes(nvars, depth)
    rep = compare_consequence(((tb, km) for (tb, _), km in pairs.items()),
                              (1 << (1 << nvars)) - 1, (1 << 3 ** nvars) - 1,
                              "k-conservative-depth", f"vars={nvars} depth<={depth}")
    forms = [cnf_translate(f) for _, f in reps]
    _, kms, _ = designation_masks(k3(), forms, range(nvars))
    cache: dict = {}
    for (key, f), img, km in zip(reps, forms, kms):
        rep.checked += 1
        if str(ClauseForm(key[1])) != to_text(img) or km != clause_form_mask(key[1], nvars, cache):
            rep.fail(("cross-check", to_text(f)))
    return rep


def check_clause_lemma(nvars: int = 3) -> Report:
    """The valuation repair behind CNF conservativity, checked directly.

    For every K3 valuation ``v`` and clause ``φ`` with ``v(φ) != 1``, setting the
    ``*``-literals of ``φ`` to 0 and the other ``*`` variables arbitrarily (both
    uniform choices tried) gives a Boolean ``v'`` with ``v'(φ) = 0`` that keeps
    every clause with ``v``-value 1 true.
    """
    lits = [(i, s) for i in range(nvars) for s in (True, False)]
    clauses = [frozenset(c) for r in range(nvars + 1) for c in itertools.combinations(lits, r)
               if not _complementary(frozenset(c))]
    rep = Report("clause-lemma", f"vars={nvars} clauses={len(clauses)}")
    star, one = 1, 2

    def k3_val(v, c):
        vals = [v[x] if s else 2 - v[x] for x, s in c]
        return max(vals, default=0)

    for v in itertools.product(range(3), repeat=nvars):
        true_clauses = [c for c in clauses if k3_val(v, c) == one]
        for phi in clauses:
            if k3_val(v, phi) == one:
                continue
            for default in (0, 1):
                rep.checked += 1
                w = []
                for x in range(nvars):
                    if v[x] != star:
                        w.append(v[x] // 2)
                    elif (x, True) in phi:
                        w.append(0)
                    elif (x, False) in phi:
                        w.append(1)
                    else:
                        w.append(default)
                bool_val = (lambda c: any(w[x] == (1 if s else 0) for x, s in c))
                if bool_val(phi) or not all(bool_val(c) for c in true_clauses):
                    rep.fail((v, sorted(phi), default))
    return rep


def prec_monotone_violations(arity: int = 2) -> list:
    """A3 term functions that are not monotone for the order ``* < 0``, ``* < 1`` (expected: none)."""
    alg = k3().algebra
    s = alg.index("*")
    below = (lambda a, b: a == b or a == s)
    grid = list(itertools.product(range(3), repeat=arity))
    bad = []
    for f in definable_functions(alg, arity):
        for (i, x), (j, y) in itertools.product(enumerate(grid), repeat=2):
            if all(below(a, b) for a, b in zip(x, y)) and not below(f[i], f[j]):
                bad.append((f, x, y))
                break
    return bad


# ----------------------------------------------------------------- LP refuter

class IncompleteCandidate(LookupError):
    def __init__(self, formula: Formula):
        super().__init__(f"candidate map has no value for {to_text(formula)}")
        self.formula = formula


@dataclass
class Claim:
    """One entailment statement of the witness, with the value the argument relies on."""
    logic: str
    premises: tuple[Formula, ...]
    conclusion: Formula
    expected: bool

    def holds(self) -> bool:
        m = classical() if self.logic == "CPC" else lp()
        _, ms, full = designation_masks(m, [*self.premises, self.conclusion])
        return masks_entail(ms[:-1], [ms[-1]], full) == self.expected

    def __str__(self) -> str:
        sym = "|-" if self.expected else "|/-"
        return f"{{{', '.join(map(to_text, self.premises))}}} {sym}_{self.logic} {to_text(self.conclusion)}"


@dataclass
class Refutation:
    """Evidence that a candidate is not conservative from classical logic into LP.

    ``kind`` is ``"direct"`` when the candidate already fails to preserve the
    entailment ``φ_0..φ_n |- F``, and ``"subset"`` when the argument reaches a
    subset ``J`` whose images LP-entail ``f(F)`` although ``{φ_j : j in J}`` is satisfiable.
    """
    kind: str
    n: int
    phis: list[Formula]
    images: list[Formula]
    f_bot: Formula
    valuations: list[dict[int, str]]
    j: list[int] = field(default_factory=list)
    claims: list[Claim] = field(default_factory=list)

    @property
    def subset(self) -> list[int]:
        return sorted(set(self.j))

    def verify(self) -> bool:
        """Re-check every claimed (non-)entailment by brute force."""
        return all(c.holds() for c in self.claims)

    def minimality(self) -> bool:
        """``{φ_0..φ_n}`` is classically inconsistent and no subset of size ``<= n`` is."""
        _, ms, full = designation_masks(classical(), [*self.phis, bot()])
        if not masks_entail(ms[:-1], [ms[-1]], full):
            return False
        return not any(masks_entail([ms[i] for i in sub], [ms[-1]], full)
                       for r in range(self.n + 1) for sub in itertools.combinations(range(self.n + 1), r))

    def lines(self) -> list[str]:
        out = [f"n = {self.n}; f(F) = {to_text(self.f_bot)}", f"kind = {self.kind}"]
        if self.j:
            out.append(f"J = {self.subset}")
        out.extend(f"claim {c}" for c in self.claims)
        return out


def required_formulas(n: int) -> list[Formula]:
    """``φ_i = p_i`` for ``i < n`` and ``φ_n = ~(p_0 & ... & p_{n-1})``."""
    return [var(i) for i in range(n)] + [apply("not", conj([var(i) for i in range(n)]))]


def _lookup(candidate, phi: Formula) -> Formula:
    if callable(candidate) and not isinstance(candidate, t.Mapping):
        return candidate(phi)
    try:
        return candidate[phi]
    except KeyError:
        raise IncompleteCandidate(phi) from None


def lp_refute(candidate: t.Mapping[Formula, Formula] | t.Callable[[Formula], Formula]) -> Refutation:
    alg = lp().algebra
    zero, star = alg.index("0"), alg.index("*")
    f_bot = _lookup(candidate, bot())
    fvars = sorted(variables(f_bot))
    _, vals = value_table(lp(), [f_bot], fvars)
    grid = list(itertools.product(range(len(alg)), repeat=len(fvars)))
    zeros = [dict(zip(fvars, g)) for j, g in enumerate(grid) if vals[0, j] == zero]
    n = len(zeros)
    phis = required_formulas(n)
    images = [_lookup(candidate, p) for p in phis]
    labels = [{v: alg.values[x] for v, x in val.items()} for val in zeros]
    preserve = Claim("LP", tuple(images), f_bot, True)
    ref = Refutation("direct", n, phis, images, f_bot, labels)
    if not preserve.holds():
        ref.claims = [Claim("CPC", tuple(phis), bot(), True), Claim("LP", tuple(images), f_bot, False)]
        return ref
    pool = sorted(frozenset(fvars).union(*(variables(g) for g in images)))
    _, ivals = value_table(lp(), images, pool)
    for val in zeros:
        # v_i: the zero of f(F), with * on every other variable
        j_index = 0
        for pos, x in enumerate(pool):
            j_index = j_index * len(alg) + val.get(x, star)
        ji = next((j for j in range(n + 1) if ivals[j, j_index] == zero), None)
        if ji is None:
            raise AssertionError("no image vanishes at a zero of f(F) although the images entail f(F)")
        ref.j.append(ji)
    ref.kind = "subset"
    sub = ref.subset
    ref.claims = [
        Claim("CPC", tuple(phis), bot(), True),
        preserve,
        Claim("LP", tuple(images[j] for j in sub), f_bot, True),
        Claim("CPC", tuple(phis[j] for j in sub), bot(), False),
    ]
    return ref


def parse_candidate(text: str) -> dict[Formula, Formula]:
    """Lines ``<classical formula> => <LP formula>``; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=>" not in line:
            raise ValueError(f"line {lineno}: expected '<classical> => <LP>'")
        lhs, rhs = line.split("=>", 1)
        out[parse(lhs)] = parse(rhs)
    return out


def load_candidate(path: str | Path) -> dict[Formula, Formula]:
    p = Path(path)
    if not p.exists():
        from importlib import resources
        res = resources.files("contrans") / "data" / "candidates" / p.name
        if not res.is_file():
            raise FileNotFoundError(f"no candidate map {path}")
        return parse_candidate(res.read_text())
    return parse_candidate(p.read_text())


def random_formula(rng, nvars: int, depth: int, names: t.Sequence[str] = CPC_SIGNATURE) -> Formula:
    if depth == 0 or rng.random() < 0.2:
        pick = rng.randrange(nvars + 2)
        return var(pick) if pick < nvars else (top() if pick == nvars else bot())
    name = rng.choice([nm for nm in names if nm not in ("top", "bot")])
    arity = 1 if name == "not" else 2
    return apply(name, *(random_formula(rng, nvars, depth - 1, names) for _ in range(arity)))


def sample_cnf_equivalence(nvars: int, count: int, seed: int, depth: int = 5) -> Report:
    """Sampled check that ``cnf_translate`` is classically equivalent to its input and keeps the clause convention."""
    import random
    rng = random.Random(seed)
    rep = Report("cnf-equivalence-sampled", f"vars={nvars} count={count} seed={seed}")
    for _ in range(count):
        phi = random_formula(rng, nvars, depth)
        img = cnf_translate(phi)
        rep.checked += 1
        _, (a, b), _ = designation_masks(classical(), [phi, img], range(nvars))
        if a != b:
            rep.fail(to_text(phi))
    return rep
