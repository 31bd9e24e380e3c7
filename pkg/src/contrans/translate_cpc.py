"""Conservative, most general translation of a finitary deductive system into classical logic.

The table is built one source formula at a time: ``beta_n = gamma_n | p_n & delta_n``
where ``gamma_n`` collects the earlier configurations that force ``alpha_n``
and ``delta_n`` those it must respect. All earlier ``beta_i`` are shared, so
the table is a single DAG.
"""

from __future__ import annotations

import itertools
import typing as t
from dataclasses import dataclass
from functools import lru_cache

from .formula import (
    Formula, apply, conj, disj, dag_size, parse, substitute, to_text, top, tree_size, var, variables, walk,
)
from .matrix import FiniteMatrix, designation_masks, load_matrix, masks_entail
from .oracle import ConsequenceOracle, MCLift
from .report import Report

DEFAULT_CAP = 8


class NotATranslation(ValueError):
    def __init__(self, witness):
        super().__init__(f"map is not a translation on the prefix: {witness}")
        self.witness = witness


@lru_cache(maxsize=None)
def boolean_matrix() -> FiniteMatrix:
    return load_matrix("bool")


def subset_masks(n: int) -> range:
    return range(1 << n)


def members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass
class StepStats:
    n: int
    queries: int
    holds_gamma: int
    holds_delta: int
    dag_nodes: int
    tree_size: int


class TranslationTable:
    """Inductively built map ``alpha_n -> beta_n`` into classical logic.

    With a native multiple-conclusion oracle this is the multiple-conclusion
    translation; wrap a single-conclusion oracle in :class:`MCLift` (see
    :func:`single_conclusion_table`) for the single-conclusion one.
    """

    def __init__(self, oracle: ConsequenceOracle, cap: int | None = None):
        oracle.require_consistent()
        self.oracle = oracle
        self.cap = cap
        self.alphas: list = []
        self.betas: list[Formula] = []
        self.gammas: list[Formula] = []
        self.deltas: list[Formula] = []
        self.stats: list[StepStats] = []

    def __len__(self) -> int:
        return len(self.betas)

    def build_step(self) -> Formula:
        n = len(self.betas)
        if self.cap is not None and n >= self.cap:
            raise ValueError(f"prefix cap {self.cap} reached")
        alpha = self.oracle.formula(n)
        alphas = self.alphas
        ands, ors = [top()], [None]
        for mask in range(1, 1 << n):
            hi = mask.bit_length() - 1
            rest = mask & ~(1 << hi)
            ands.append(self.betas[hi] if not rest else apply("and", ands[rest], self.betas[hi]))
            ors.append(self.betas[hi] if not rest else apply("or", ors[rest], self.betas[hi]))
        sets = [[alphas[i] for i in members(m)] for m in range(1 << n)]
        gamma_terms, delta_terms = [], []
        queries = 0
        for x, y in itertools.product(range(1 << n), repeat=2):
            ax, ay = sets[x], sets[y]
            queries += 2
            if self.oracle.mc(ax, [alpha, *ay]):
                gamma_terms.append(ands[x] if not y else
                                   (apply("not", ors[y]) if not x else apply("and", ands[x], apply("not", ors[y]))))
            if self.oracle.mc([*ax, alpha], ay):
                rhs = ors[y] if y else apply("bot")
                delta_terms.append(apply("imp", ands[x], rhs) if x else rhs)
        gamma = disj(gamma_terms)
        delta = conj(delta_terms)
        beta = apply("or", gamma, apply("and", var(n), delta))
        self.alphas.append(alpha)
        self.gammas.append(gamma)
        self.deltas.append(delta)
        self.betas.append(beta)
        self.stats.append(StepStats(n, queries, len(gamma_terms), len(delta_terms),
                                    dag_size(self.betas), tree_size(beta)))
        return beta

    def build(self, n: int) -> TranslationTable:
        while len(self.betas) < n:
            self.build_step()
        return self

    def translate(self, phi) -> Formula:
        """Image of a source formula; extends the table on demand."""
        i = self.oracle.index(phi)
        self.build(i + 1)
        return self.betas[i]

    def masks(self, n: int | None = None) -> tuple[list[int], int]:
        """Classical designation bitsets of ``beta_0..beta_{n-1}`` over ``p_0..p_{n-1}``."""
        n = len(self.betas) if n is None else n
        _, ms, full = designation_masks(boolean_matrix(), self.betas[:n], range(n))
        return ms, full


def single_conclusion_table(oracle: ConsequenceOracle, cap: int | None = None) -> TranslationTable:
    return TranslationTable(MCLift(oracle), cap)


def single_conclusion_translate(oracle: ConsequenceOracle, phi) -> Formula:
    return single_conclusion_table(oracle).translate(phi)


# -------------------------------------------------------------- verifiers

def check_prefix_invariant(table: TranslationTable, n: int | None = None) -> Report:
    """Source consequence among ``alpha_X, alpha_Y`` is matched classically by ``beta_X, beta_Y``."""
    n = len(table) if n is None else n
    ms, full = table.masks(n)
    rep = Report("prefix-invariant", f"{table.oracle.name} n={n}")
    alphas = table.alphas
    for x, y in itertools.product(range(1 << n), repeat=2):
        rep.checked += 1
        xs, ys = members(x), members(y)
        if table.oracle.mc([alphas[i] for i in xs], [alphas[i] for i in ys]):
            if not masks_entail([ms[i] for i in xs], [ms[i] for i in ys], full):
                rep.fail((tuple(xs), tuple(ys)))
    return rep


def verify_conservative(table: TranslationTable, n: int, mode: str = "mc") -> Report:
    """Exhaustively compare source and classical consequence on the first ``n`` formulas.

    ``mode="mc"``: all pairs of subsets Γ, Δ. ``mode="sc"``: all Γ and single conclusions.
    """
    table.build(n)
    ms, full = table.masks(n)
    alphas = table.alphas
    rep = Report(f"conservative-{mode}", f"{table.oracle.name} N={n}")
    for x in range(1 << n):
        xs = members(x)
        ax = [alphas[i] for i in xs]
        gm = [ms[i] for i in xs]
        if mode == "mc":
            for y in range(1 << n):
                ys = members(y)
                rep.checked += 1
                src = table.oracle.mc(ax, [alphas[i] for i in ys])
                tgt = masks_entail(gm, [ms[i] for i in ys], full)
                if src != tgt:
                    rep.fail((tuple(xs), tuple(ys), src, tgt))
        else:
            for k in range(n):
                rep.checked += 1
                src = table.oracle.sc(ax, alphas[k])
                tgt = masks_entail(gm, [ms[k]], full)
                if src != tgt:
                    rep.fail((tuple(xs), k, src, tgt))
    return rep


def check_gamma_delta(table: TranslationTable) -> Report:
    """``gamma_n -> delta_n`` is a classical tautology for every built step."""
    rep = Report("gamma-implies-delta", table.oracle.name)
    for n in range(len(table)):
        rep.checked += 1
        _, (g, d), full = designation_masks(boolean_matrix(), [table.gammas[n], table.deltas[n]], range(n + 1))
        if g & ~d & full:
            rep.fail(n)
    return rep


def check_valuation_lemma(table: TranslationTable, n: int | None = None) -> Report:
    """Every consistent split W | Z of the prefix yields ``v(beta_i) = v(p_i)`` for ``v = [W]``."""
    n = len(table) if n is None else n
    ms, _ = table.masks(n)
    alphas = table.alphas
    rep = Report("valuation-lemma", f"{table.oracle.name} n={n}")
    for w in range(1 << n):
        z = ((1 << n) - 1) & ~w
        if table.oracle.mc([alphas[i] for i in members(w)], [alphas[i] for i in members(z)]):
            continue
        rep.checked += 1
        # first variable varies slowest in the valuation grid
        j = sum(1 << (n - 1 - i) for i in members(w))
        for i in range(n):
            if (ms[i] >> j & 1) != (w >> i & 1):
                rep.fail((tuple(members(w)), i))
                break
    return rep


def check_most_general(table: TranslationTable, g: t.Callable[[t.Any], Formula], n: int) -> Report:
    """Given a translation ``g``, check ``g(alpha_i) <-> sigma(beta_i)`` with ``sigma(p_i) = g(alpha_i)``.

    Raises :class:`NotATranslation` if ``g`` fails to preserve consequence on the prefix.
    """
    table.build(n)
    alphas = table.alphas[:n]
    images = [g(a) for a in alphas]
    sigma = {i: images[i] for i in range(n)}
    instances = [substitute(table.betas[i], sigma) for i in range(n)]
    pool = sorted(frozenset().union(*(variables(f) for f in images)))
    _, ms, full = designation_masks(boolean_matrix(), images + instances, pool)
    img, inst = ms[:n], ms[n:]
    for x, y in itertools.product(range(1 << n), repeat=2):
        xs, ys = members(x), members(y)
        if table.oracle.mc([alphas[i] for i in xs], [alphas[i] for i in ys]):
            if not masks_entail([img[i] for i in xs], [img[i] for i in ys], full):
                raise NotATranslation((tuple(xs), tuple(ys)))
    rep = Report("most-general", f"{table.oracle.name} n<{n}")
    for i in range(n):
        rep.checked += 1
        if img[i] != inst[i]:
            rep.fail(i)
    return rep


def check_disjunction_property(table: TranslationTable, n: int) -> Report:
    """If ``f(Γ)`` entails a disjunction of images, it entails one disjunct.

    ``info["instances"]`` counts the (Γ, Δ) with ``|Δ| >= 2`` whose disjunction is entailed.
    """
    table.build(n)
    ms, full = table.masks(n)
    rep = Report("disjunction-property", f"{table.oracle.name} N={n}")
    hits = 0
    for x in range(1 << n):
        gm = [ms[i] for i in members(x)]
        for y in range(1, 1 << n):
            ys = members(y)
            if len(ys) < 2:
                continue
            rep.checked += 1
            if masks_entail(gm, [ms[i] for i in ys], full):
                hits += 1
                if not any(masks_entail(gm, [ms[i]], full) for i in ys):
                    rep.fail((tuple(members(x)), tuple(ys)))
    rep.info["instances"] = hits
    return rep


# ------------------------------------------------------------ table files

def _node_ref(node: Formula, ids: dict[int, int]) -> str:
    return f"p{node.index}" if node.is_var else f"#{ids[node.uid]}"


def export_table(betas: t.Sequence[Formula], labels: t.Sequence[int] | None = None) -> str:
    """DAG export: one ``#id := conn(args)`` line per shared node, then ``alpha n -> #id``."""
    labels = range(len(betas)) if labels is None else labels
    ids: dict[int, int] = {}
    lines = []
    for node in walk(betas):
        if node.is_var:
            continue
        ids[node.uid] = len(ids)
        args = ", ".join(_node_ref(a, ids) for a in node.args)
        lines.append(f"#{ids[node.uid]} := {node.conn.name}({args})")
    for label, b in zip(labels, betas):
        lines.append(f"alpha {label} -> {_node_ref(b, ids)}")
    return "\n".join(lines) + "\n"


def export_tree(betas: t.Sequence[Formula], labels: t.Sequence[int] | None = None) -> str:
    labels = range(len(betas)) if labels is None else labels
    return "".join(f"alpha {label} := {to_text(b)}\n" for label, b in zip(labels, betas))


def read_table(text: str) -> dict[int, Formula]:
    """Inverse of :func:`export_table` and :func:`export_tree`."""
    nodes: dict[str, Formula] = {}
    out: dict[int, Formula] = {}

    def ref(tok: str) -> Formula:
        tok = tok.strip()
        if tok.startswith("#"):
            return nodes[tok]
        return var(int(tok[1:]))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            if line.startswith("#"):
                lhs, rhs = (s.strip() for s in line.split(":=", 1))
                name, _, rest = rhs.partition("(")
                inner = rest.rsplit(")", 1)[0]
                args = [ref(a) for a in inner.split(",")] if inner.strip() else []
                nodes[lhs] = apply(name.strip(), *args)
            elif line.startswith("alpha ") and ":=" in line:
                head, body = line[6:].split(":=", 1)
                out[int(head)] = parse(body)
            elif line.startswith("alpha ") and "->" in line:
                head, tgt = line[6:].split("->", 1)
                out[int(head)] = ref(tgt)
            else:
                raise ValueError(line)
        except (ValueError, KeyError) as exc:
            raise ValueError(f"line {lineno}: malformed table entry ({exc})") from None
    return out
