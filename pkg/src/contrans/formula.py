"""Hash-consed propositional formulas.

Every structurally distinct formula exists exactly once per process: building
the same term twice returns the same object, so ``is`` is structural
equality and translations that reuse earlier outputs stay DAG-shaped.
"""

from __future__ import annotations

import itertools
import re
import threading
import typing as t
from dataclasses import dataclass


class SignatureError(ValueError):
    """A formula or substitution uses a connective outside the signature."""


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class Connective:
    name: str
    arity: int
    symbol: str | None = None   # infix/prefix/constant token; None = name(args)
    prec: int = 7
    assoc: str = "none"


# precedence: higher binds tighter
_BUILTIN = [
    Connective("not", 1, "~", 6, "prefix"),
    Connective("fus", 2, "*", 5, "left"),
    Connective("and", 2, "&", 4, "left"),
    Connective("or", 2, "|", 3, "left"),
    Connective("imp", 2, "->", 2, "right"),
    Connective("rimp", 2, "<-", 2, "left"),
    Connective("iff", 2, "<->", 1, "left"),
    Connective("top", 0, "T"),
    Connective("bot", 0, "F"),
    Connective("one", 0, "1"),
    Connective("zero", 0, "0"),
]

CONNECTIVES: dict[str, Connective] = {c.name: c for c in _BUILTIN}
_registry_lock = threading.Lock()


def connective(name: str | Connective) -> Connective:
    if isinstance(name, Connective):
        return name
    try:
        return CONNECTIVES[name]
    except KeyError:
        raise SignatureError(f"unknown connective {name!r}") from None


def register_connective(name: str, arity: int) -> Connective:
    """Add a user connective, printed and parsed as ``name(a, b, ...)``."""
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or re.fullmatch(r"p\d+|q|T|F", name):
        raise SignatureError(f"invalid connective name {name!r}")
    with _registry_lock:
        old = CONNECTIVES.get(name)
        if old is not None:
            if old.arity != arity:
                raise SignatureError(f"connective {name!r} already registered with arity {old.arity}")
            return old
        c = Connective(name, arity)
        CONNECTIVES[name] = c
        return c


class Formula:
    """Interned formula node: a variable ``p<index>`` or a connective applied to children.

    Do not instantiate directly; use :func:`var` and :func:`apply`.
    """

    __slots__ = ("conn", "args", "index", "uid", "_size", "_vars", "__weakref__")

    conn: Connective | None
    args: tuple[Formula, ...]
    index: int

    @property
    def is_var(self) -> bool:
        return self.conn is None

    @property
    def name(self) -> str | None:
        return None if self.conn is None else self.conn.name

    def __repr__(self) -> str:
        if tree_size(self) > 400:
            return f"<Formula #{self.uid} {self.name or 'var'} tree-size={tree_size(self)}>"
        return f"Formula({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)

    def __reduce__(self):
        return (parse, (to_text(self),))

    def __and__(self, other: Formula) -> Formula:
        return apply("and", self, other)

    def __or__(self, other: Formula) -> Formula:
        return apply("or", self, other)

    def __invert__(self) -> Formula:
        return apply("not", self)

    def __rshift__(self, other: Formula) -> Formula:
        return apply("imp", self, other)


_table: dict[tuple, Formula] = {}
_table_lock = threading.Lock()
_uids = itertools.count()


def _intern(key: tuple, conn: Connective | None, args: tuple, index: int) -> Formula:
    node = _table.get(key)
    if node is not None:
        return node
    with _table_lock:
        node = _table.get(key)
        if node is None:
            node = object.__new__(Formula)
            node.conn = conn
            node.args = args
            node.index = index
            node.uid = next(_uids)
            node._size = None
            node._vars = None
            _table[key] = node
    return node


def var(index: int) -> Formula:
    if index < 0:
        raise ValueError("variable index must be non-negative")
    return _intern(("v", index), None, (), index)


def apply(conn: str | Connective, *args: Formula) -> Formula:
    c = connective(conn)
    if len(args) != c.arity:
        raise SignatureError(f"{c.name} expects {c.arity} arguments, got {len(args)}")
    return _intern((c.name, *(a.uid for a in args)), c, args, -1)


def top() -> Formula:
    return apply("top")


def bot() -> Formula:
    return apply("bot")


def conj(parts: t.Iterable[Formula], empty: Formula | None = None) -> Formula:
    """Left-folded conjunction; the empty conjunction is ``T`` unless ``empty`` is given."""
    return _fold("and", parts, top() if empty is None else empty)


def disj(parts: t.Iterable[Formula], empty: Formula | None = None) -> Formula:
    return _fold("or", parts, bot() if empty is None else empty)


def _fold(name: str, parts: t.Iterable[Formula], empty: Formula) -> Formula:
    it = iter(parts)
    try:
        acc = next(it)
    except StopIteration:
        return empty
    for p in it:
        acc = apply(name, acc, p)
    return acc


def implies_chain(premises: t.Sequence[Formula], conclusion: Formula) -> Formula:
    """``a1 -> (a2 -> ... (ak -> conclusion))``; the empty chain is the conclusion."""
    acc = conclusion
    for p in reversed(premises):
        acc = apply("imp", p, acc)
    return acc


def rimplies_chain(conclusion: Formula, premises: t.Sequence[Formula]) -> Formula:
    """``((conclusion <- a1) <- a2) ... <- ak``."""
    acc = conclusion
    for p in premises:
        acc = apply("rimp", acc, p)
    return acc


# ---------------------------------------------------------------- traversal

def walk(roots: Formula | t.Iterable[Formula]) -> list[Formula]:
    """Distinct nodes reachable from ``roots``, children before parents."""
    if isinstance(roots, Formula):
        roots = (roots,)
    seen: set[int] = set()
    order: list[Formula] = []
    for root in roots:
        if root.uid in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if node.uid in seen:
                continue
            seen.add(node.uid)
            stack.append((node, True))
            for a in reversed(node.args):
                if a.uid not in seen:
                    stack.append((a, False))
    return order


def tree_size(phi: Formula) -> int:
    """Number of nodes in the tree reading of ``phi`` (shared nodes counted per occurrence)."""
    if phi._size is None:
        for node in walk(phi):
            if node._size is None:
                node._size = 1 + sum(a._size for a in node.args)
    return phi._size


def dag_size(roots: Formula | t.Iterable[Formula]) -> int:
    return len(walk(roots))


def variables(phi: Formula) -> frozenset[int]:
    if phi._vars is None:
        for node in walk(phi):
            if node._vars is None:
                if node.is_var:
                    node._vars = frozenset((node.index,))
                elif len(node.args) == 1:
                    node._vars = node.args[0]._vars
                else:
                    node._vars = frozenset().union(*(a._vars for a in node.args))
    return phi._vars


def connectives_of(roots: Formula | t.Iterable[Formula]) -> set[str]:
    return {n.conn.name for n in walk(roots) if n.conn is not None}


def depth(phi: Formula) -> int:
    d: dict[int, int] = {}
    for node in walk(phi):
        d[node.uid] = 1 + max((d[a.uid] for a in node.args), default=-1)
    return d[phi.uid]


# ------------------------------------------------------------- signatures

@dataclass(frozen=True)
class Signature:
    """Connectives in a fixed order, plus an optional bound on variables (``p0..p<max_vars-1>``)."""

    connectives: tuple[Connective, ...]
    max_vars: int | None = None

    def __post_init__(self):
        names = [c.name for c in self.connectives]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate connectives in signature: {names}")

    @classmethod
    def of(cls, *names: str, max_vars: int | None = None) -> Signature:
        return cls(tuple(connective(n) for n in names), max_vars)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.connectives)

    def admits(self, phi: Formula) -> bool:
        allowed = set(self.names)
        for node in walk(phi):
            if node.is_var:
                if self.max_vars is not None and node.index >= self.max_vars:
                    return False
            elif node.conn.name not in allowed:
                return False
        return True

    def check(self, phi: Formula) -> None:
        if not self.admits(phi):
            raise SignatureError(f"{phi!r} is not a formula over {self.names}"
                                 + (f" with {self.max_vars} variables" if self.max_vars is not None else ""))


# ----------------------------------------------------------- substitution

class Substitution:
    """Homomorphism of formula algebras given by its finite support ``{index: image}``."""

    def __init__(self, mapping: t.Mapping[int, Formula] | None = None, signature: Signature | None = None):
        self.mapping = dict(mapping or {})
        if signature is not None:
            for img in self.mapping.values():
                signature.check(img)

    def __getitem__(self, index: int) -> Formula:
        return self.mapping.get(index) or var(index)

    def __call__(self, phi: Formula) -> Formula:
        return substitute(phi, self.mapping)

    def compose(self, first: Substitution) -> Substitution:
        """``self ∘ first``: apply ``first``, then ``self``."""
        out = {i: self(img) for i, img in first.mapping.items()}
        for i, img in self.mapping.items():
            out.setdefault(i, img)
        return Substitution(out)


def substitute(phi: Formula, mapping: t.Mapping[int, Formula] | Substitution,
               signature: Signature | None = None) -> Formula:
    if isinstance(mapping, Substitution):
        mapping = mapping.mapping
    if signature is not None:
        for img in mapping.values():
            signature.check(img)
    if not mapping:
        return phi
    memo: dict[int, Formula] = {}
    for node in walk(phi):
        if node.is_var:
            memo[node.uid] = mapping.get(node.index, node)
        else:
            memo[node.uid] = apply(node.conn, *(memo[a.uid] for a in node.args))
    return memo[phi.uid]


def rename(phi: Formula, offset: int) -> Formula:
    """Shift every variable ``p_i`` to ``p_{i+offset}``."""
    return substitute(phi, {i: var(i + offset) for i in variables(phi)})


def replace_connective(phi: Formula, name: str, builder: t.Callable[..., Formula]) -> Formula:
    """Rewrite every ``name`` node bottom-up as ``builder(*rewritten_children)``."""
    memo: dict[int, Formula] = {}
    for node in walk(phi):
        if node.is_var:
            memo[node.uid] = node
        else:
            args = [memo[a.uid] for a in node.args]
            memo[node.uid] = builder(*args) if node.conn.name == name else apply(node.conn, *args)
    return memo[phi.uid]


# ------------------------------------------------------ printing / parsing

def to_text(phi: Formula) -> str:
    """Render with minimal parentheses; the output re-parses to the same node."""
    memo: dict[int, tuple[str, int, str | None]] = {}   # uid -> (text, prec, name)
    for node in walk(phi):
        if node.is_var:
            memo[node.uid] = (f"p{node.index}", 8, None)
            continue
        c = node.conn
        if c.arity == 0:
            memo[node.uid] = (c.symbol or f"{c.name}()", 8, c.name)
        elif c.symbol is None:
            inner = ", ".join(memo[a.uid][0] for a in node.args)
            memo[node.uid] = (f"{c.name}({inner})", 8, c.name)
        elif c.assoc == "prefix":
            s, p, _ = memo[node.args[0].uid]
            memo[node.uid] = (c.symbol + (s if p >= c.prec else f"({s})"), c.prec, c.name)
        else:
            (ls, lp, ln), (rs, rp, rn) = memo[node.args[0].uid], memo[node.args[1].uid]
            if c.name == "imp":
                left_ok = lp > c.prec or ln == "rimp"
                right_ok = rp >= c.prec
            elif c.name == "rimp":
                left_ok = lp > c.prec or ln == "rimp"
                right_ok = rp > c.prec
            else:
                left_ok = lp >= c.prec
                right_ok = rp > c.prec
            ls = ls if left_ok else f"({ls})"
            rs = rs if right_ok else f"({rs})"
            memo[node.uid] = (f"{ls} {c.symbol} {rs}", c.prec, c.name)
    return memo[phi.uid][0]


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|<-|[~!¬*·&∧|∨→←↔(),])
  | (?P<var>p\d+(?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<const>[01⊤⊥])
""", re.VERBOSE)

_ALIASES = {"!": "~", "¬": "~", "·": "*", "∧": "&", "∨": "|", "→": "->", "←": "<-", "↔": "<->",
            "⊤": "T", "⊥": "F"}
_CONSTS = {"T": "top", "F": "bot", "1": "one", "0": "zero"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError("unexpected character", text, pos)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            value = _ALIASES.get(value, value)
            if kind == "const":
                kind = "name"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, value: str | None = None) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            raise FormulaSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", self.text, tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        phi = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise FormulaSyntaxError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return phi

    def iff(self) -> Formula:
        acc = self.imp()
        while self.peek()[1] == "<->":
            self.take()
            acc = apply("iff", acc, self.imp())
        return acc

    def imp(self) -> Formula:
        left = self.rimp()
        if self.peek()[1] == "->":
            self.take()
            return apply("imp", left, self.imp())
        return left

    def rimp(self) -> Formula:
        acc = self.binary_left("or")
        while self.peek()[1] == "<-":
            self.take()
            acc = apply("rimp", acc, self.binary_left("or"))
        return acc

    _NEXT = {"or": "and", "and": "fus", "fus": None}
    _SYM = {"or": "|", "and": "&", "fus": "*"}

    def binary_left(self, name: str) -> Formula:
        sub = self._NEXT[name]
        operand = (lambda: self.binary_left(sub)) if sub else self.unary
        acc = operand()
        while self.peek()[1] == self._SYM[name]:
            self.take()
            acc = apply(name, acc, operand())
        return acc

    def unary(self) -> Formula:
        if self.peek()[1] == "~":
            self.take()
            return apply("not", self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "var":
            return var(int(value[1:]))
        if value == "(":
            phi = self.iff()
            self.take(")")
            return phi
        if kind == "name":
            if self.peek()[1] == "(":
                self.take("(")
                args = []
                if self.peek()[1] != ")":
                    args.append(self.iff())
                    while self.peek()[1] == ",":
                        self.take()
                        args.append(self.iff())
                self.take(")")
                try:
                    return apply(value, *args)
                except SignatureError as exc:
                    raise FormulaSyntaxError(str(exc), self.text, pos) from None
            if value == "q":
                return var(0)
            if value in _CONSTS:
                return apply(_CONSTS[value])
        raise FormulaSyntaxError(f"unexpected {value or 'end of input'!r}", self.text, pos)


def parse(text: str) -> Formula:
    """Parse the textual grammar (``p<k>``, ``q`` = ``p0``, ``~ * & | -> <- <->``, ``T F 1 0``)."""
    return _Parser(text).formula()


# ------------------------------------------------------------ enumeration

class Enumeration:
    """Injective size-then-lexicographic indexing of all formulas over a signature.

    Formulas are ordered first by weight (connective occurrences plus ``k+1``
    per occurrence of ``p_k``), then lexicographically by prefix notation with
    variables (by index) before connectives (in signature order). Each weight
    class is finite, so this is a bijection between the naturals and the
    formulas (or onto the finite list of formulas when variables are bounded
    and the signature has no connectives).
    """

    def __init__(self, signature: Signature):
        self.signature = signature
        self._by_weight: list[list[Formula]] = [[]]
        self._starts: list[int] = [0, 0]
        self._items: list[Formula] = []
        self._index: dict[int, int] = {}
        self._order = {c.name: i for i, c in enumerate(signature.connectives)}
        self._lock = threading.Lock()

    def _code(self, phi: Formula, memo: dict[int, tuple]) -> tuple:
        for node in walk(phi):
            if node.uid not in memo:
                if node.is_var:
                    memo[node.uid] = ((0, node.index),)
                else:
                    memo[node.uid] = ((1, self._order[node.conn.name]),) + sum((memo[a.uid] for a in node.args), ())
        return memo[phi.uid]

    def _grow(self) -> bool:
        w = len(self._by_weight)
        out: list[Formula] = []
        cap = self.signature.max_vars
        if cap is None or w - 1 < cap:
            out.append(var(w - 1))
        for c in self.signature.connectives:
            if c.arity == 0:
                if w == 1:
                    out.append(apply(c))
                continue
            for split in _compositions(w - 1, c.arity):
                for args in itertools.product(*(self._by_weight[s] for s in split)):
                    out.append(apply(c, *args))
        memo: dict[int, tuple] = {}
        out.sort(key=lambda f: self._code(f, memo))
        self._by_weight.append(out)
        for f in out:
            self._index[f.uid] = len(self._items)
            self._items.append(f)
        self._starts.append(len(self._items))
        return bool(out)

    def _exhausted(self) -> bool:
        # bounded variables and only constants: nothing beyond weight max_vars
        cap = self.signature.max_vars
        return (cap is not None and all(c.arity == 0 for c in self.signature.connectives)
                and len(self._by_weight) > max(cap, 1))

    def __getitem__(self, i: int) -> Formula:
        if i < 0:
            raise IndexError("formula index must be non-negative")
        if self.signature.max_vars == 0 and all(c.arity > 0 for c in self.signature.connectives):
            raise IndexError("signature has no atomic formulas")
        with self._lock:
            while i >= len(self._items):
                if self._exhausted():
                    raise IndexError(f"only {len(self._items)} formulas over {self.signature.names}")
                self._grow()
            return self._items[i]

    def __iter__(self) -> t.Iterator[Formula]:
        for i in itertools.count():
            try:
                yield self[i]
            except IndexError:
                return

    def prefix(self, n: int) -> list[Formula]:
        return [self[i] for i in range(n)]

    def weight(self, phi: Formula) -> int:
        return sum(1 if not n.is_var else n.index + 1 for n in _tree_nodes(phi))

    def index(self, phi: Formula) -> int:
        self.signature.check(phi)
        w = self.weight(phi)
        with self._lock:
            while len(self._by_weight) <= w:
                self._grow()
            return self._index[phi.uid]


def _tree_nodes(phi: Formula) -> t.Iterator[Formula]:
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.args)


def _compositions(total: int, parts: int) -> t.Iterator[tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def enumerate_formula(sig: Signature, i: int) -> Formula:
    return Enumeration(sig)[i]
