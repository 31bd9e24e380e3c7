"""Boolean functions, Post clone membership, clone closure, and the two fragment translations.

A k-ary function is a ``2**k``-bit integer: bit ``j`` is ``f(x)`` for the
input with ``x_i = (j >> i) & 1``.
"""

from __future__ import annotations

import itertools
import typing as t
from dataclasses import dataclass, field

from .formula import (
    CONNECTIVES, Formula, SignatureError, apply, bot, connectives_of, register_connective, rename,
    replace_connective, substitute, to_text, var, walk,
)
from .exhaustive import compare_consequence, depth_classes, var_table
from .matrix import designation_masks, load_matrix
from .report import Report

ARITY_CAP = 4


@dataclass(frozen=True)
class BooleanFunction:
    arity: int
    table: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.arity < 0 or self.table >> (1 << self.arity):
            raise ValueError(f"table {self.table:#x} does not fit arity {self.arity}")

    @classmethod
    def from_bits(cls, bits: str, name: str = "") -> BooleanFunction:
        """``bits[j]`` is the value on input ``j`` (little-endian inputs)."""
        k = (len(bits) - 1).bit_length() if len(bits) > 1 else 0
        if len(bits) != 1 << k or set(bits) - {"0", "1"}:
            raise ValueError(f"truth table {bits!r} must be 2**k characters of 0/1")
        return cls(k, sum(1 << j for j, b in enumerate(bits) if b == "1"), name)

    @classmethod
    def from_callable(cls, arity: int, fn: t.Callable[..., int], name: str = "") -> BooleanFunction:
        table = 0
        for j in range(1 << arity):
            if fn(*((j >> i) & 1 for i in range(arity))):
                table |= 1 << j
        return cls(arity, table, name)

    @property
    def size(self) -> int:
        return 1 << self.arity

    def __call__(self, *xs: int) -> int:
        return self.table >> sum(x << i for i, x in enumerate(xs)) & 1

    def bits(self) -> str:
        return "".join(str(self.table >> j & 1) for j in range(self.size))

    def __str__(self) -> str:
        return self.name or f"f{self.arity}:{self.bits()}"


CATALOG: dict[str, BooleanFunction] = {f.name: f for f in [
    BooleanFunction.from_callable(0, lambda: 1, "top"),
    BooleanFunction.from_callable(0, lambda: 0, "bot"),
    BooleanFunction.from_callable(1, lambda x: 1 - x, "not"),
    BooleanFunction.from_callable(2, lambda x, y: x & y, "and"),
    BooleanFunction.from_callable(2, lambda x, y: x | y, "or"),
    BooleanFunction.from_callable(2, lambda x, y: (1 - x) | y, "imp"),
    BooleanFunction.from_callable(2, lambda x, y: x | (1 - y), "rimp"),
    BooleanFunction.from_callable(2, lambda x, y: int(x == y), "iff"),
    BooleanFunction.from_callable(2, lambda x, y: x ^ y, "xor"),
    BooleanFunction.from_callable(2, lambda x, y: 1 - (x & y), "nand"),
    BooleanFunction.from_callable(2, lambda x, y: 1 - (x | y), "nor"),
    BooleanFunction.from_callable(3, lambda x, y, z: int(x + y + z >= 2), "maj"),
]}
IMPLICATION = CATALOG["imp"]


def parse_function(spec: str) -> BooleanFunction:
    """A catalog name or an inline table ``name/arity:bits``."""
    spec = spec.strip()
    if spec in CATALOG:
        return CATALOG[spec]
    head, sep, bits = spec.partition(":")
    if sep:
        name, _, arity = head.partition("/")
        f = BooleanFunction.from_bits(bits.strip(), name.strip())
        if arity and int(arity) != f.arity:
            raise ValueError(f"{spec!r}: {len(bits)} bits do not match arity {arity}")
        return f
    raise ValueError(f"unknown connective {spec!r}; catalog: {sorted(CATALOG)} or name/arity:bits")


def parse_functions(text: str) -> list[BooleanFunction]:
    return [parse_function(s) for s in text.split(",") if s.strip()]


def all_functions(arity: int) -> list[BooleanFunction]:
    return [BooleanFunction(arity, tb) for tb in range(1 << (1 << arity))]


# --------------------------------------------------------------- predicates

def preserves_zero(f: BooleanFunction) -> bool:
    return not f.table & 1


def is_self_dual(f: BooleanFunction) -> bool:
    top = f.size - 1
    return all((f.table >> j & 1) != (f.table >> (top ^ j) & 1) for j in range(f.size))


def is_affine(f: BooleanFunction) -> bool:
    c0 = f.table & 1
    coeffs = [(f.table >> (1 << i) & 1) ^ c0 for i in range(f.arity)]
    for j in range(f.size):
        v = c0
        for i in range(f.arity):
            v ^= coeffs[i] & (j >> i)
        if (v & 1) != (f.table >> j & 1):
            return False
    return True


def is_monotone(f: BooleanFunction) -> bool:
    for j in range(f.size):
        if f.table >> j & 1:
            for i in range(f.arity):
                if not f.table >> (j | 1 << i) & 1:
                    return False
    return True


def is_bounded_below(f: BooleanFunction) -> bool:
    """Some argument ``x_i`` satisfies ``x_i <= f(x)`` everywhere (the clone T1-infinity)."""
    return any(all(f.table >> j & 1 for j in range(f.size) if j >> i & 1) for i in range(f.arity))


PREDICATES: dict[str, t.Callable[[BooleanFunction], bool]] = {
    "P0": preserves_zero, "D": is_self_dual, "A": is_affine, "M": is_monotone, "T1inf": is_bounded_below,
}
BLOCKING = ("P0", "D", "A", "M")


def clone_predicates(f: BooleanFunction) -> dict[str, bool]:
    return {name: pred(f) for name, pred in PREDICATES.items()}


# ----------------------------------------------------------------- closure

def _projections(arity: int) -> list[int]:
    return [sum(1 << j for j in range(1 << arity) if j >> i & 1) for i in range(arity)]


def _compose(f: BooleanFunction, gs: t.Sequence[int], full: int) -> int:
    out = 0
    for j in range(f.size):
        if f.table >> j & 1:
            term = full
            for i, g in enumerate(gs):
                term &= g if j >> i & 1 else ~g
                if not term:
                    break
            out |= term
    return out & full


def clone_closure(gens: t.Iterable[BooleanFunction], arity: int, terms: bool = False):
    """All ``arity``-ary members of the clone generated by ``gens``.

    Returns a set of :class:`BooleanFunction`, or with ``terms=True`` a dict
    mapping each member to a defining term over ``p0..p_{arity-1}``.
    """
    if not 0 <= arity <= ARITY_CAP:
        raise MemoryError(f"closure at arity {arity} exceeds the supported cap {ARITY_CAP}")
    gens = list(gens)
    full = (1 << (1 << arity)) - 1
    found: dict[int, Formula] = {}
    frontier = []
    for i, g in enumerate(_projections(arity)):
        if g not in found:
            found[g] = var(i)
            frontier.append(g)
    for f in gens:
        if f.arity == 0:
            val = full if f.table & 1 else 0
            if val not in found:
                found[val] = _term(f, ())
                frontier.append(val)
    old: list[int] = []
    while frontier:
        new: list[int] = []
        everything = old + frontier
        fresh = set(frontier)
        for f in gens:
            if f.arity == 0:
                continue
            for args in itertools.product(everything, repeat=f.arity):
                if not fresh.intersection(args):
                    continue
                val = _compose(f, args, full)
                if val not in found:
                    found[val] = _term(f, [found[a] for a in args])
                    new.append(val)
        old, frontier = everything, new
    if terms:
        return {BooleanFunction(arity, tb): phi for tb, phi in found.items()}
    return {BooleanFunction(arity, tb) for tb in found}


def _term(f: BooleanFunction, args: t.Sequence[Formula]) -> Formula:
    name = f.name or f"f{f.arity}_{f.bits()}"
    if name in CONNECTIVES and CONNECTIVES[name].arity != f.arity:
        name = f"f{f.arity}_{f.bits()}"
    return apply(register_connective(name, f.arity), *args)


def closure_contains_implication(gens: t.Iterable[BooleanFunction], arity: int = 2) -> bool:
    """Is ``x0 -> x1`` (as an ``arity``-ary function ignoring the rest) in the clone?"""
    target = _compose(IMPLICATION, _projections(arity)[:2], (1 << (1 << arity)) - 1)
    return BooleanFunction(arity, target) in clone_closure(gens, arity)


# ----------------------------------------------------------------- verdicts

@dataclass
class CloneVerdict:
    functions: dict[str, dict[str, bool]]
    containments: dict[str, bool]
    implication_definable: bool
    reason: str | None

    @property
    def universal(self) -> bool:
        return self.implication_definable

    def certificate(self) -> str:
        if self.reason in ("P0", "D"):
            return "the fragment has no tautologies"
        if self.reason == "A":
            return "affine functions admit no strict chain longer than 3"
        if self.reason == "M":
            return "the fragment embeds conservatively into LP via p -> p & ~p"
        return "implication is definable; the fragment is universal"


def implication_definable(gens: t.Iterable[BooleanFunction]) -> bool:
    return analyze(gens).implication_definable


def analyze(gens: t.Iterable[BooleanFunction]) -> CloneVerdict:
    """Implication is definable from ``gens`` unless all of them lie in one of P0, D, A, M."""
    gens = list(gens)
    flags = {str(f): clone_predicates(f) for f in gens}
    contained = {c: all(PREDICATES[c](f) for f in gens) for c in BLOCKING}
    reason = next((c for c in BLOCKING if contained[c]), None)
    return CloneVerdict(flags, contained, reason is None, reason)


# ------------------------------------------------------------ affine chains

def affine_functions(arity: int) -> list[BooleanFunction]:
    out = []
    for c0 in (0, 1):
        for coeffs in itertools.product((0, 1), repeat=arity):
            out.append(BooleanFunction.from_callable(
                arity, lambda *xs, c0=c0, cs=coeffs: (c0 + sum(c & x for c, x in zip(cs, xs))) & 1))
    return out


def _below(f: BooleanFunction, g: BooleanFunction) -> bool:
    return not f.table & ~g.table


def affine_chain_max(arity: int) -> int:
    """Length of the longest strictly increasing pointwise chain of affine functions."""
    fs = sorted(affine_functions(arity), key=lambda f: bin(f.table).count("1"))
    best = {}
    for f in fs:
        best[f] = 1 + max((best[g] for g in best if g != f and _below(g, f)), default=0)
    return max(best.values())


def affine_order_violations(arity: int) -> list[tuple[BooleanFunction, BooleanFunction]]:
    """Pairs ``f <= g`` of affine functions with ``f`` not 0, ``g`` not 1 and ``f != g`` (expected: none)."""
    full = (1 << (1 << arity)) - 1
    return [(f, g) for f in affine_functions(arity) for g in affine_functions(arity)
            if _below(f, g) and f.table != 0 and g.table != full and f != g]


# ---------------------------------------------------- fragment translations

MONOTONE_BASIS = frozenset({"and", "or", "top", "bot"})


def monotone_to_lp(phi: Formula) -> Formula:
    """Substitute ``p & ~p`` for every variable of a {&, |, T, F} formula."""
    extra = connectives_of(phi) - MONOTONE_BASIS
    if extra:
        raise SignatureError(f"monotone_to_lp expects only and/or/top/bot, found {sorted(extra)}")
    return substitute(phi, {i: apply("and", var(i), apply("not", var(i)))
                            for i in {n.index for n in walk(phi) if n.is_var}})


def to_implication_basis(phi: Formula) -> Formula:
    """Rewrite a classical formula over {->, F}."""
    memo: dict[int, Formula] = {}
    imp = (lambda a, b: apply("imp", a, b))
    neg = (lambda a: imp(a, bot()))
    for node in walk(phi):
        if node.is_var:
            memo[node.uid] = node
            continue
        a = [memo[c.uid] for c in node.args]
        name = node.conn.name
        if name in ("bot", "zero"):
            out = bot()
        elif name in ("top", "one"):
            out = imp(bot(), bot())
        elif name == "not":
            out = neg(a[0])
        elif name == "imp":
            out = imp(a[0], a[1])
        elif name == "rimp":
            out = imp(a[1], a[0])
        elif name == "or":
            out = imp(imp(a[0], a[1]), a[1])
        elif name in ("and", "fus"):
            out = neg(imp(a[0], neg(a[1])))
        elif name == "iff":
            out = neg(imp(imp(a[0], a[1]), neg(imp(a[1], a[0]))))
        else:
            raise SignatureError(f"no implication-basis rule for {name!r}")
        memo[node.uid] = out
    return memo[phi.uid]


def implication_translate(phi: Formula) -> Formula:
    """``((psi(p, q)) -> q) -> q`` where ``psi`` is ``phi`` renamed up by one, rewritten over
    {->, F}, with F replaced by the spare variable ``q = p0``."""
    psi = to_implication_basis(rename(phi, 1))
    q = var(0)
    psi = replace_connective(psi, "bot", lambda: q)
    return apply("imp", apply("imp", psi, q), q)


# ------------------------------------------------- depth-bounded exhaustive checks

def monotone_lp_by_depth(nvars: int = 3, depth: int = 3) -> Report:
    """Conservativity of ``monotone_to_lp`` over every finite Γ of {&, |, T, F} formulas
    with ``nvars`` variables and depth ``<= depth``.

    Classes are keyed by (classical table, LP value table of the image); each class
    representative is re-translated and re-evaluated as a cross-check.
    """
    lp = load_matrix("lp")
    alg = lp.algebra
    zero, star, one = (alg.index(x) for x in "0*1")
    grid = list(itertools.product(range(3), repeat=nvars))
    sig = {zero: zero, star: star, one: zero}  # value of p & ~p
    full = (1 << (1 << nvars)) - 1
    leaves = {(var_table(nvars, i), tuple(sig[g[i]] for g in grid)): var(i) for i in range(nvars)}
    leaves[(full, (one,) * len(grid))] = apply("top")
    leaves[(0, (zero,) * len(grid))] = apply("bot")
    meet, join = alg.ops["and"], alg.ops["or"]
    ops = [
        ("and", 2, lambda a, b: (a[0] & b[0], tuple(int(meet[x, y]) for x, y in zip(a[1], b[1])))),
        ("or", 2, lambda a, b: (a[0] | b[0], tuple(int(join[x, y]) for x, y in zip(a[1], b[1])))),
    ]
    classes = depth_classes(leaves, ops, depth)[-1]
    desig = lp.designated

    def lp_mask(vals):
        return sum(1 << j for j, x in enumerate(vals) if x in desig)

    rep = compare_consequence(((tb, lp_mask(vals)) for tb, vals in classes),
                              full, (1 << len(grid)) - 1, "monotone-lp", f"vars={nvars} depth<={depth}")
    reps = list(classes.items())
    imgs = [monotone_to_lp(f) for _, f in reps]
    _, ms, _ = designation_masks(lp, imgs, range(nvars))
    _, cs, _ = designation_masks(load_matrix("bool"), [f for _, f in reps], range(nvars))
    for ((tb, vals), f), m, c in zip(reps, ms, cs):
        rep.checked += 1
        if m != lp_mask(vals) or c != tb:
            rep.fail(("cross-check", to_text(f)))
    return rep


IMPLICATION_SOURCE = ("not", "and", "or", "imp", "top", "bot")


def implication_by_depth(nvars: int = 2, depth: int = 3) -> Report:
    """Conservativity of ``implication_translate`` over every finite Γ of classical formulas
    (``nvars`` variables, depth ``<= depth``), the target side checked classically.

    Classes are keyed by (source table, table of the {->}-rewrite with ``q`` for F).
    """
    sfull = (1 << (1 << nvars)) - 1
    tfull = (1 << (1 << (nvars + 1))) - 1
    q = var_table(nvars + 1, 0)
    imp = (lambda a, b: tfull & (~a | b))
    neg = (lambda a: imp(a, q))
    leaves = {(var_table(nvars, i), var_table(nvars + 1, i + 1)): var(i) for i in range(nvars)}
    leaves[(sfull, imp(q, q))] = apply("top")
    leaves[(0, q)] = apply("bot")
    ops = [
        ("not", 1, lambda a: (sfull & ~a[0], neg(a[1]))),
        ("and", 2, lambda a, b: (a[0] & b[0], neg(imp(a[1], neg(b[1]))))),
        ("or", 2, lambda a, b: (a[0] | b[0], imp(imp(a[1], b[1]), b[1]))),
        ("imp", 2, lambda a, b: (sfull & (~a[0] | b[0]), imp(a[1], b[1]))),
    ]
    classes = depth_classes(leaves, ops, depth)[-1]
    wrap = (lambda psi: imp(imp(psi, q), q))
    rep = compare_consequence(((s, wrap(psi)) for s, psi in classes), sfull, tfull,
                              "implication-fragment", f"vars={nvars} depth<={depth}")
    reps = list(classes.items())
    imgs = [implication_translate(f) for _, f in reps]
    boolm = load_matrix("bool")
    _, ms, _ = designation_masks(boolm, imgs, range(nvars + 1))
    _, cs, _ = designation_masks(boolm, [f for _, f in reps], range(nvars))
    for ((s, psi), f), img, m, c in zip(reps, imgs, ms, cs):
        rep.checked += 1
        if m != wrap(psi) or c != s or connectives_of(img) != {"imp"}:
            rep.fail(("cross-check", to_text(f)))
    return rep
