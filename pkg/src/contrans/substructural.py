"""Translations into the {->, <-, &} fragment of FL and into BCK (pure implication).

Both tables keep ``q = p0`` as the spare variable and move the source's
``p_n`` to ``p_{n+1}``. Consequence on the FL side is only tested on finite
algebras, which is a necessary condition for provability, never a proof.
"""

from __future__ import annotations

import itertools
import typing as t
from functools import lru_cache

import numpy as np

from .formula import (
    Formula, apply, bot, conj, dag_size, disj, implies_chain, rimplies_chain, substitute, var, variables,
)
from .matrix import FiniteMatrix, designation_masks, fl_suite, masks_entail, value_table
from .oracle import ConsequenceOracle
from .report import Report
from .translate_cpc import boolean_matrix, members

Q = 0
FL_CAP = 4
BCK_CAP = 3


def r_values(n: int) -> list[int]:
    """Repetition counts ``r_0..r_n`` with ``r_0 = 0`` and ``r_{m+1} = 1 + m * 2**m * r_m``."""
    r = [0]
    for m in range(n):
        r.append(1 + m * 2 ** m * r[m])
    return r


def pi(p: Formula, q: Formula) -> Formula:
    """``(p -> q) -> q``"""
    return apply("imp", apply("imp", p, q), q)


def source_var(n: int) -> Formula:
    """Target variable standing for source index ``n`` (``p0`` is reserved for q)."""
    return var(n + 1)


@lru_cache(maxsize=None)
def sequences(n: int) -> tuple[tuple[int, ...], ...]:
    """Repetition-free sequences over ``range(n)`` in length-lex order."""
    out = []
    for m in range(n + 1):
        out.extend(itertools.permutations(range(n), m))
    return tuple(sorted(out, key=lambda s: (len(s), s)))


class _Table:
    cap = FL_CAP
    kind = "fl"

    def __init__(self, oracle: ConsequenceOracle, cap: int | None = None):
        self.oracle = oracle
        if cap is not None:
            self.cap = cap
        self.alphas: list = []
        self.betas: list[Formula] = []
        self.queries: list[int] = []

    def __len__(self) -> int:
        return len(self.betas)

    def build(self, n: int):
        if n > self.cap + 1:
            raise ValueError(f"prefix {n} exceeds the cap (max index {self.cap})")
        while len(self.betas) < n:
            self.build_step()
        return self

    def translate(self, phi) -> Formula:
        i = self.oracle.index(phi)
        self.build(i + 1)
        return self.betas[i]

    def sc(self, premises: t.Iterable[int], k: int) -> bool:
        return self.oracle.sc([self.alphas[i] for i in premises], self.alphas[k])

    def projection(self, i: int) -> Formula:
        """``beta_i`` with ``q`` replaced by falsum."""
        return substitute(self.betas[i], {Q: bot()})

    def build_step(self) -> Formula:
        raise NotImplementedError


class FLTranslationTable(_Table):
    """``beta_n = (q->q) & AND((Y -> beta_k) <- X) & ((AND(pi <- Z)) -> pi)`` with ``pi = pi(p_n, q)``."""

    cap = FL_CAP

    def build_step(self) -> Formula:
        n = len(self.betas)
        q = var(Q)
        self.alphas.append(self.oracle.formula(n))
        seqs = sequences(n)
        queries = 0
        parts = [apply("imp", q, q)]
        for k in range(n):
            for x in seqs:
                for y in seqs:
                    if set(x) & set(y):
                        continue
                    queries += 1
                    if self.sc((*x, *y, n), k):
                        inner = implies_chain([self.betas[i] for i in y], self.betas[k])
                        parts.append(rimplies_chain(inner, [self.betas[i] for i in x]))
        p = pi(source_var(n), q)
        zs = []
        for z in seqs:
            queries += 1
            if self.sc(z, n):
                zs.append(rimplies_chain(p, [self.betas[i] for i in z]))
        parts.append(apply("imp", conj(zs), p) if zs else p)
        beta = conj(parts)
        self.betas.append(beta)
        self.queries.append(queries)
        return beta


class BCKTranslationTable(_Table):
    """``beta_n = (eps_n -> q) -> q`` with the fusions of ``eps_n`` curried away.

    ``fusion_betas`` keeps the un-curried top layer of each step for comparison.
    """

    cap = BCK_CAP
    kind = "bck"

    def __init__(self, oracle: ConsequenceOracle, cap: int | None = None):
        super().__init__(oracle, cap)
        self.fusion_betas: list[Formula] = []

    def r(self, n: int) -> int:
        return r_values(n)[n]

    def build_step(self) -> Formula:
        n = len(self.betas)
        q, p = var(Q), source_var(n)
        self.alphas.append(self.oracle.formula(n))
        rn = self.r(n)
        queries = 0
        first = []
        for k in range(n):
            for x in range(1 << n):
                queries += 1
                if self.sc((*members(x), n), k):
                    prem = [self.betas[i] for i in members(x) for _ in range(rn)]
                    first.append(implies_chain(prem, self.betas[k]))
        zs = []
        for z in range(1 << n):
            queries += 1
            if self.sc(members(z), n):
                zs.append(implies_chain([self.betas[i] for i in members(z)], p))
        # (prod zs) -> p  curried: z1 -> (z2 -> ... -> p)
        second = implies_chain(zs, p)
        beta = apply("imp", implies_chain([*first, second], q), q)
        one = apply("one")
        product = (lambda fs: one if not fs else _fold_fus(fs))
        eps = apply("fus", product(first), apply("imp", product(zs), p))
        self.fusion_betas.append(apply("imp", apply("imp", eps, q), q))
        self.betas.append(beta)
        self.queries.append(queries)
        return beta


def _fold_fus(parts: list[Formula]) -> Formula:
    acc = parts[0]
    for f in parts[1:]:
        acc = apply("fus", acc, f)
    return acc


# ----------------------------------------------------- classical projection

class ClassicalProjection:
    """The self-referential classical formulas

    ``tr_n = AND_{X, k: alpha_X, alpha_n |- alpha_k} (AND beta_X -> beta_k) & (p_n | OR_{Z |- alpha_n} AND beta_Z)``

    with ``tr_i`` in place of ``beta_i`` and source variable ``n`` written ``p_{n + offset}``.
    """

    def __init__(self, oracle: ConsequenceOracle, offset: int = 0):
        self.oracle = oracle
        self.offset = offset
        self.alphas: list = []
        self.formulas: list[Formula] = []

    def build(self, n: int) -> ClassicalProjection:
        while len(self.formulas) < n:
            m = len(self.formulas)
            self.alphas.append(self.oracle.formula(m))
            a, tr = self.alphas, self.formulas
            parts = []
            for k in range(m):
                for x in range(1 << m):
                    xs = members(x)
                    if self.oracle.sc([a[i] for i in xs] + [a[m]], a[k]):
                        parts.append(apply("imp", conj([tr[i] for i in xs]), tr[k]))
            zs = [conj([tr[i] for i in members(z)]) for z in range(1 << m)
                  if self.oracle.sc([a[i] for i in members(z)], a[m])]
            parts.append(apply("or", var(m + self.offset), disj(zs)))
            self.formulas.append(conj(parts))
        return self

    def __getitem__(self, n: int) -> Formula:
        self.build(n + 1)
        return self.formulas[n]


def classical_projection_formula(oracle: ConsequenceOracle, n: int, offset: int = 0) -> Formula:
    return ClassicalProjection(oracle, offset)[n]


def classically_equivalent(a: Formula, b: Formula) -> bool:
    pool = sorted(variables(a) | variables(b))
    _, (ma, mb), _ = designation_masks(boolean_matrix(), [a, b], pool)
    return ma == mb


# ------------------------------------------------------------- verifiers

def check_projection(table: _Table, n: int) -> Report:
    """``beta_i(q/F)`` is classically equivalent to ``tr_i`` for every ``i < n``."""
    table.build(n)
    proj = ClassicalProjection(table.oracle, offset=1).build(n)
    rep = Report(f"projection-{table.kind}", f"{table.oracle.name} n<{n}")
    for i in range(n):
        rep.checked += 1
        if not classically_equivalent(table.projection(i), proj.formulas[i]):
            rep.fail(i)
    return rep


def check_projection_vs_cpc(oracle: ConsequenceOracle, cpc_betas: t.Sequence[Formula]) -> Report:
    """The classical translation's ``beta_n`` (single-conclusion build) is equivalent to ``tr_n``."""
    n = len(cpc_betas)
    proj = ClassicalProjection(oracle, offset=0).build(n)
    rep = Report("projection-cpc", f"{oracle.name} n<{n}")
    for i in range(n):
        rep.checked += 1
        if not classically_equivalent(cpc_betas[i], proj.formulas[i]):
            rep.fail(i)
    return rep


def _designated_everywhere(m: FiniteMatrix, formulas: list[Formula]) -> list[bool]:
    if not formulas:
        return []
    _, vals = value_table(m, formulas)
    return list(m.designated_flags[vals].all(axis=1))


def fl_model_check(table: FLTranslationTable, n: int, suite: t.Sequence[FiniteMatrix] | None = None) -> Report:
    """For each ``alpha_Z |- alpha_k`` (Z a repetition-free sequence), ``Z -> beta_k`` is designated
    under every valuation of every suite algebra. Passing is a necessary condition only."""
    table.build(n)
    suite = fl_suite() if suite is None else suite
    rep = Report("fl-model", f"{table.oracle.name} n<{n} algebras={len(suite)}")
    claims, labels = [], []
    for k in range(n):
        for z in sequences(n):
            if table.sc(z, k):
                claims.append(implies_chain([table.betas[i] for i in z], table.betas[k]))
                labels.append((z, k))
    for m in suite:
        for ok, label in zip(_designated_everywhere(m, claims), labels):
            rep.checked += 1
            if not ok:
                rep.fail((m.name, *label))
    return rep


def bck_model_check(table: BCKTranslationTable, n: int, suite: t.Sequence[FiniteMatrix] | None = None) -> Report:
    """At every stage ``m <= n``: ``alpha_W |- alpha_k`` (``k < m``, ``W`` a subset of ``m``) makes
    ``beta_W^{r_m} -> beta_k`` designated in every commutative integral 0-bounded suite algebra."""
    table.build(n)
    suite = fl_suite(flew_only=True) if suite is None else suite
    r = r_values(n)
    rep = Report("bck-model", f"{table.oracle.name} n<={n} algebras={len(suite)}")
    claims, labels = [], []
    for m in range(1, n + 1):
        for k in range(m):
            for w in range(1 << m):
                if table.sc(members(w), k):
                    prem = [table.betas[i] for i in members(w) for _ in range(r[m])]
                    claims.append(implies_chain(prem, table.betas[k]))
                    labels.append((m, tuple(members(w)), k))
    for mat in suite:
        for ok, label in zip(_designated_everywhere(mat, claims), labels):
            rep.checked += 1
            if not ok:
                rep.fail((mat.name, *label))
    return rep


def check_lu_closure(table: FLTranslationTable, n: int, suite: t.Sequence[FiniteMatrix] | None = None) -> Report:
    """Every ``v(beta_i)`` lies in ``L_u = {a : a*u <= a, u*a <= a}`` where ``u = v(q) -> v(q)``."""
    table.build(n)
    suite = fl_suite() if suite is None else suite
    rep = Report("lu-closure", f"{table.oracle.name} n<{n}")
    q = var(Q)
    uq = apply("imp", q, q)
    for m in suite:
        alg = m.algebra
        order, vals = value_table(m, [uq, *table.betas[:n]], sorted({Q} | {i + 1 for i in range(n)}))
        u, bs = vals[0], vals[1:]
        fus, meet = alg.ops["fus"], alg.ops["and"]
        for i, row in enumerate(bs):
            rep.checked += 1
            au, ua = fus[row, u], fus[u, row]
            if not (np.all(meet[au, row] == au) and np.all(meet[ua, row] == ua)):
                rep.fail((m.name, i))
    return rep


def check_end_to_end(table: _Table, n: int) -> Report:
    """``Gamma |- alpha_k`` iff the ``q -> F`` projections of the images entail classically."""
    table.build(n)
    projs = [table.projection(i) for i in range(n)]
    pool = sorted(frozenset().union(*(variables(f) for f in projs)) | {i + 1 for i in range(n)})
    _, ms, full = designation_masks(boolean_matrix(), projs, pool)
    rep = Report("end-to-end", f"{table.oracle.name} n<{n}")
    for x in range(1 << n):
        for k in range(n):
            rep.checked += 1
            src = table.sc(members(x), k)
            tgt = masks_entail([ms[i] for i in members(x)], [ms[k]], full)
            if src != tgt:
                rep.fail((tuple(members(x)), k, src, tgt))
    return rep


def check_curry(table: BCKTranslationTable, suite: t.Sequence[FiniteMatrix] | None = None) -> Report:
    """The implication-only ``beta_n`` takes the same value as its fusion form in commutative algebras."""
    suite = fl_suite(flew_only=True) if suite is None else suite
    rep = Report("bck-curry", table.oracle.name)
    for m in suite:
        for i, (a, b) in enumerate(zip(table.betas, table.fusion_betas)):
            rep.checked += 1
            _, vals = value_table(m, [a, b], sorted(variables(a) | variables(b)))
            if not np.array_equal(vals[0], vals[1]):
                rep.fail((m.name, i))
    return rep


def table_stats(table: _Table) -> list[tuple[int, int, int]]:
    """(step, oracle queries, cumulative DAG nodes) per built step."""
    return [(i, table.queries[i], dag_size(table.betas[:i + 1])) for i in range(len(table))]
