"""Exhaustive consequence comparison over semantic classes of formulas.

Consequence ``Γ ⊨ φ`` in a finite matrix depends on Γ only through the
intersection of its designation bitsets, so comparing two consequence
relations over *all* finite Γ reduces to the (finite) closure of those
intersections. Pairs of bitsets are packed into one int so intersections
act componentwise.
"""

from __future__ import annotations

import itertools
import typing as t

from .formula import Formula, apply
from .report import Report

Key = t.Hashable


def depth_classes(leaves: t.Mapping[Key, Formula], ops: t.Sequence[tuple[str, int, t.Callable[..., Key]]],
                  depth: int) -> list[dict[Key, Formula]]:
    """Semantic classes of formulas of depth ``<= d`` for each ``d <= depth``.

    ``ops`` lists ``(connective, arity, combine)`` where ``combine`` maps child keys
    to the key of the compound. Each class keeps one representative formula.
    Returns the cumulative class maps per depth.
    """
    known: dict[Key, Formula] = dict(leaves)
    levels = [dict(known)]
    for _ in range(depth):
        snapshot = list(known.items())
        fresh: dict[Key, Formula] = {}
        for name, arity, combine in ops:
            for combo in itertools.product(snapshot, repeat=arity):
                key = combine(*(k for k, _ in combo))
                if key not in known and key not in fresh:
                    fresh[key] = apply(name, *(f for _, f in combo))
        known.update(fresh)
        levels.append(dict(known))
    return levels


def var_table(nvars: int, i: int) -> int:
    """Classical truth table (bitset) of ``p_i`` over ``nvars`` variables, first variable slowest."""
    return sum(1 << j for j, v in enumerate(itertools.product((0, 1), repeat=nvars)) if v[i])


def pack(src: int, tgt: int, width: int) -> int:
    return src | tgt << width


def meet_closure(masks: t.Iterable[int], full: int) -> set[int]:
    """All intersections of finite subsets of ``masks`` (the empty one is ``full``)."""
    gens = set(masks)
    seen = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for g in frontier:
            for m in gens:
                h = g & m
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def compare_consequence(pairs: t.Iterable[tuple[int, int]], src_full: int, tgt_full: int,
                        name: str = "conservative", instance: str = "") -> Report:
    """``Γ ⊨_src φ`` iff ``f(Γ) ⊨_tgt f(φ)`` for every finite Γ and φ drawn from ``pairs``.

    ``pairs`` holds ``(source mask of φ, target mask of f(φ))``.
    """
    width = src_full.bit_length()
    packed = {pack(s, t_, width) for s, t_ in pairs}
    rep = Report(name, instance)
    gammas = meet_closure(packed, pack(src_full, tgt_full, width))
    rep.info["classes"] = len(packed)
    rep.info["premise_sets"] = len(gammas)
    low = src_full
    for g in gammas:
        gs, gt = g & low, g >> width
        for phi in packed:
            rep.checked += 1
            src = not gs & ~phi & low
            tgt = not gt & ~(phi >> width) & tgt_full
            if src != tgt:
                rep.fail((gs, gt, phi & low, phi >> width))
                if len(rep.violations) > 20:
                    return rep
    return rep
