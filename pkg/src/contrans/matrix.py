"""Finite logical matrices: evaluation, entailment, and FL-algebra checks."""

from __future__ import annotations

import itertools
import typing as t
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .formula import (
    Formula, Signature, SignatureError, connective, register_connective, variables, walk,
)

MAX_VALUATIONS = 1 << 22
_CHUNK_BYTES = 1 << 24


class LogicFileError(ValueError):
    pass


class UnboundVariable(KeyError):
    pass


class FiniteAlgebra:
    """Carrier labels plus full operation tables, indexed by carrier position."""

    def __init__(self, values: t.Sequence[str], ops: t.Mapping[str, t.Any]):
        self.values = tuple(values)
        if len(set(self.values)) != len(self.values) or not self.values:
            raise ValueError(f"carrier labels must be distinct and non-empty: {self.values}")
        n = len(self.values)
        self.ops: dict[str, np.ndarray] = {}
        for name, table in ops.items():
            arr = np.asarray(table, dtype=np.uint8)
            c = connective(name)
            if arr.shape != (n,) * c.arity:
                raise ValueError(f"table for {name}/{c.arity} has shape {arr.shape}, expected {(n,) * c.arity}")
            if arr.size and arr.max() >= n:
                raise ValueError(f"table for {name} leaves the carrier")
            arr.setflags(write=False)
            self.ops[name] = arr

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"FiniteAlgebra({list(self.values)}, ops={sorted(self.ops)})"

    def index(self, label: str) -> int:
        try:
            return self.values.index(label)
        except ValueError:
            raise KeyError(f"{label!r} is not in the carrier {self.values}") from None

    def op(self, name: str, *args: int) -> int:
        return int(self.ops[name][args])

    def leq(self, a: int, b: int) -> bool:
        """Lattice order read off the meet table."""
        return int(self.ops["and"][a, b]) == a

    @cached_property
    def _packed(self) -> tuple[dict[str, int], np.ndarray, np.ndarray, np.ndarray]:
        names = sorted(self.ops)
        slot = {name: i for i, name in enumerate(names)}
        arity = np.array([self.ops[nm].ndim for nm in names], dtype=np.int32)
        sizes = [self.ops[nm].size for nm in names]
        offsets = np.zeros(len(names), dtype=np.int64)
        if names:
            offsets[1:] = np.cumsum(sizes)[:-1]
        flat = np.concatenate([self.ops[nm].ravel() for nm in names]) if names else np.zeros(0, np.uint8)
        return slot, arity, offsets, np.ascontiguousarray(flat, dtype=np.uint8)


@dataclass(eq=False)
class FiniteMatrix:
    algebra: FiniteAlgebra
    designated: frozenset[int]
    name: str = "matrix"
    connective_order: tuple[str, ...] = ()
    max_vars: int | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.designated = frozenset(self.designated)
        if not self.designated <= set(range(len(self.algebra))):
            raise ValueError("designated values must lie in the carrier")
        if not self.connective_order:
            self.connective_order = tuple(self.algebra.ops)

    def __repr__(self) -> str:
        return f"FiniteMatrix({self.name!r}, values={list(self.algebra.values)}, designated={self.designated_labels})"

    @property
    def designated_labels(self) -> list[str]:
        return [v for i, v in enumerate(self.algebra.values) if i in self.designated]

    @property
    def signature(self) -> Signature:
        return Signature.of(*self.connective_order, max_vars=self.max_vars)

    @cached_property
    def designated_flags(self) -> np.ndarray:
        flags = np.zeros(len(self.algebra), dtype=bool)
        flags[list(self.designated)] = True
        return flags


# ------------------------------------------------------------ logic files

def parse_logic(text: str, name: str = "matrix") -> FiniteMatrix:
    """Read the line-oriented matrix format (``values:``, ``designated:``, ``op name/arity`` + table)."""
    values: list[str] | None = None
    designated: list[str] | None = None
    meta: dict[str, str] = {}
    ops: dict[str, list[str]] = {}
    order: list[str] = []
    arities: dict[str, int] = {}
    current: str | None = None
    max_vars = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        key = head.strip()
        if line.startswith("op "):
            spec = line[3:].strip()
            opname, _, ar = spec.partition("/")
            try:
                arity = int(ar)
            except ValueError:
                raise LogicFileError(f"line {lineno}: bad operation header {line!r}") from None
            opname = opname.strip()
            if opname in ops:
                raise LogicFileError(f"line {lineno}: operation {opname} defined twice")
            try:
                c = connective(opname)
            except SignatureError:
                c = register_connective(opname, arity)
            if c.arity != arity:
                raise LogicFileError(f"line {lineno}: {opname} has arity {c.arity}, file says {arity}")
            current = opname
            ops[opname] = []
            order.append(opname)
            arities[opname] = arity
        elif ":" in line and key in ("values", "designated", "variables", "name", "description"):
            current = None
            if key == "values":
                values = rest.split()
            elif key == "designated":
                designated = rest.split()
            elif key == "variables":
                max_vars = int(rest)
            else:
                meta[key] = rest.strip()
        elif current is not None:
            ops[current].extend(line.split())
        else:
            raise LogicFileError(f"line {lineno}: unexpected {line!r}")
    if values is None or designated is None:
        raise LogicFileError("logic file needs 'values:' and 'designated:' lines")
    pos = {v: i for i, v in enumerate(values)}
    n = len(values)
    tables = {}
    for opname, cells in ops.items():
        a = arities[opname]
        if len(cells) != n ** a:
            raise LogicFileError(f"operation {opname}/{a} needs {n ** a} entries, got {len(cells)}")
        try:
            idx = [pos[c] for c in cells]
        except KeyError as exc:
            raise LogicFileError(f"operation {opname}: unknown value {exc.args[0]!r}") from None
        tables[opname] = np.array(idx, dtype=np.uint8).reshape((n,) * a)
    try:
        des = frozenset(pos[d] for d in designated)
    except KeyError as exc:
        raise LogicFileError(f"unknown designated value {exc.args[0]!r}") from None
    return FiniteMatrix(FiniteAlgebra(values, tables), des, meta.get("name", name), tuple(order), max_vars, meta)


def format_logic(m: FiniteMatrix) -> str:
    alg = m.algebra
    lines = [f"name: {m.name}", f"values: {' '.join(alg.values)}",
             f"designated: {' '.join(m.designated_labels)}"]
    if m.max_vars is not None:
        lines.append(f"variables: {m.max_vars}")
    n = len(alg)
    for opname in m.connective_order:
        table = alg.ops[opname]
        lines.append(f"op {opname}/{table.ndim}")
        flat = [alg.values[i] for i in table.ravel()]
        width = n if table.ndim else 1
        for row in range(0, len(flat), width):
            lines.append(" ".join(flat[row:row + width]))
    return "\n".join(lines) + "\n"


def _data_dir(kind: str):
    return resources.files("contrans") / "data" / kind


def bundled_names(kind: str = "logics") -> list[str]:
    return sorted(p.name[:-6] for p in _data_dir(kind).iterdir() if p.name.endswith(".logic"))


def load_matrix(name_or_path: str | Path, kind: str = "logics") -> FiniteMatrix:
    """Load a bundled matrix by name (``k3``, ``lp``, ...) or a logic file by path."""
    p = Path(name_or_path)
    if p.suffix == ".logic" or p.exists():
        return parse_logic(p.read_text(), p.stem)
    res = _data_dir(kind) / f"{name_or_path}.logic"
    if not res.is_file():
        raise LogicFileError(f"no bundled logic {name_or_path!r}; have {bundled_names(kind)}")
    return parse_logic(res.read_text(), str(name_or_path))


# ------------------------------------------------------------- evaluation

def evaluate(m: FiniteMatrix | FiniteAlgebra, phi: Formula, v: t.Mapping[int, str | int]) -> str:
    """Value of ``phi`` under ``v`` (variable index -> label or carrier index), node by node."""
    alg = m.algebra if isinstance(m, FiniteMatrix) else m
    memo: dict[int, int] = {}
    for node in walk(phi):
        if node.is_var:
            try:
                x = v[node.index]
            except KeyError:
                raise UnboundVariable(f"p{node.index}") from None
            memo[node.uid] = x if isinstance(x, (int, np.integer)) else alg.index(x)
        else:
            table = alg.ops.get(node.conn.name)
            if table is None:
                raise SignatureError(f"algebra has no operation {node.conn.name!r}")
            memo[node.uid] = int(table[tuple(memo[a.uid] for a in node.args)])
    return alg.values[memo[phi.uid]]


def valuation_grid(nvalues: int, nvars: int) -> np.ndarray:
    """All ``nvalues**nvars`` assignments as a ``(nvars, count)`` array; first variable varies slowest."""
    count = nvalues ** nvars
    if count > MAX_VALUATIONS:
        raise MemoryError(f"{count} valuations exceed the exhaustive limit {MAX_VALUATIONS}")
    if nvars == 0:
        return np.zeros((0, 1), dtype=np.uint8)
    return np.indices((nvalues,) * nvars, dtype=np.uint8).reshape(nvars, -1).copy()


def compile_program(alg: FiniteAlgebra, roots: t.Sequence[Formula], var_order: t.Sequence[int]):
    """Flatten the DAG under ``roots`` into kernel arrays; returns (program, root_rows)."""
    slot, arity, offsets, flat = alg._packed
    nodes = walk(roots)
    pos = {n.uid: i for i, n in enumerate(nodes)}
    var_row = {v: i for i, v in enumerate(var_order)}
    maxar = max((len(n.args) for n in nodes), default=1) or 1
    ops = np.empty(len(nodes), dtype=np.int32)
    args = np.zeros((len(nodes), maxar), dtype=np.int32)
    for i, n in enumerate(nodes):
        if n.is_var:
            ops[i] = -1
            try:
                args[i, 0] = var_row[n.index]
            except KeyError:
                raise UnboundVariable(f"p{n.index}") from None
        else:
            try:
                ops[i] = slot[n.conn.name]
            except KeyError:
                raise SignatureError(f"algebra has no operation {n.conn.name!r}") from None
            for j, a in enumerate(n.args):
                args[i, j] = pos[a.uid]
    rows = np.array([pos[r.uid] for r in roots], dtype=np.int64)
    return (ops, args, arity, offsets, flat), rows


def value_table(m: FiniteMatrix | FiniteAlgebra, formulas: t.Sequence[Formula],
                var_order: t.Sequence[int] | None = None) -> tuple[tuple[int, ...], np.ndarray]:
    """Values of each formula under every valuation of ``var_order`` (default: their variables).

    Returns ``(var_order, values)`` with ``values[i, j]`` the carrier index of
    formula ``i`` under valuation ``j`` of :func:`valuation_grid`.
    """
    alg = m.algebra if isinstance(m, FiniteMatrix) else m
    if var_order is None:
        var_order = sorted(frozenset().union(*(variables(f) for f in formulas))) if formulas else []
    var_order = tuple(var_order)
    grid = valuation_grid(len(alg), len(var_order))
    if not formulas:
        return var_order, np.zeros((0, grid.shape[1]), dtype=np.uint8)
    (ops, args, arity, offsets, flat), rows = compile_program(alg, formulas, var_order)
    total = grid.shape[1]
    step = max(1, min(total, _CHUNK_BYTES // max(1, len(ops))))
    out = np.empty((len(rows), total), dtype=np.uint8)
    for start in range(0, total, step):
        block = np.ascontiguousarray(grid[:, start:start + step])
        vals = kernels.eval_program(ops, args, arity, offsets, flat, len(alg), block)
        out[:, start:start + step] = vals[rows]
    return var_order, out


def bits(row: np.ndarray) -> int:
    """Pack a boolean vector into an int, element ``j`` at bit ``j``."""
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def designation_masks(m: FiniteMatrix, formulas: t.Sequence[Formula],
                      var_order: t.Sequence[int] | None = None) -> tuple[tuple[int, ...], list[int], int]:
    """Per-formula bitsets of the valuations designating it, plus the all-valuations mask."""
    order, vals = value_table(m, formulas, var_order)
    flags = m.designated_flags[vals]
    full = (1 << (len(m.algebra) ** len(order))) - 1
    return order, [bits(r) for r in flags], full


def masks_entail(gamma: t.Iterable[int], delta: t.Iterable[int], full: int) -> bool:
    """Bitset form of multiple-conclusion consequence: no valuation designates all of Γ and none of Δ."""
    acc = full
    for g in gamma:
        acc &= g
        if not acc:
            return True
    for d in delta:
        acc &= ~d
        if not acc:
            return True
    return not acc


def entails_mc(m: FiniteMatrix, gamma: t.Iterable[Formula], delta: t.Iterable[Formula]) -> bool:
    gamma, delta = list(gamma), list(delta)
    _, masks, full = designation_masks(m, gamma + delta)
    return masks_entail(masks[:len(gamma)], masks[len(gamma):], full)


def entails(m: FiniteMatrix, gamma: t.Iterable[Formula], phi: Formula) -> bool:
    return entails_mc(m, gamma, [phi])


def is_tautology(m: FiniteMatrix, phi: Formula) -> bool:
    return entails_mc(m, [], [phi])


def equivalent(m: FiniteMatrix | FiniteAlgebra, a: Formula, b: Formula) -> bool:
    """Same value under every valuation (not merely co-designated)."""
    _, vals = value_table(m, [a, b])
    return bool((vals[0] == vals[1]).all())


# ------------------------------------------------------------ FL-algebras

FL_OPS = ("and", "or", "fus", "imp", "rimp", "one")


@dataclass
class FLReport:
    ok: bool
    law: str | None = None
    witness: tuple[str, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_fl_algebra(alg: FiniteAlgebra) -> FLReport:
    """Check lattice, monoid and residuation laws exhaustively; report the first violation."""
    missing = [o for o in FL_OPS if o not in alg.ops]
    if missing:
        raise SignatureError(f"algebra lacks FL operations {missing}")
    n = len(alg)
    meet, join, fus = alg.ops["and"], alg.ops["or"], alg.ops["fus"]
    imp, rimp = alg.ops["imp"], alg.ops["rimp"]
    one = int(alg.ops["one"])
    lab = alg.values

    def le(a, b):
        return meet[a, b] == a

    for a in range(n):
        if meet[a, a] != a or join[a, a] != a:
            return FLReport(False, "idempotence", (lab[a],))
        if fus[one, a] != a or fus[a, one] != a:
            return FLReport(False, "monoid unit", (lab[a],))
    for a, b in itertools.product(range(n), repeat=2):
        if meet[a, b] != meet[b, a] or join[a, b] != join[b, a]:
            return FLReport(False, "lattice commutativity", (lab[a], lab[b]))
        if meet[a, join[a, b]] != a or join[a, meet[a, b]] != a:
            return FLReport(False, "absorption", (lab[a], lab[b]))
    for a, b, c in itertools.product(range(n), repeat=3):
        if meet[meet[a, b], c] != meet[a, meet[b, c]] or join[join[a, b], c] != join[a, join[b, c]]:
            return FLReport(False, "lattice associativity", (lab[a], lab[b], lab[c]))
        if fus[fus[a, b], c] != fus[a, fus[b, c]]:
            return FLReport(False, "monoid associativity", (lab[a], lab[b], lab[c]))
        r1, r2, r3 = le(b, imp[a, c]), le(fus[a, b], c), le(a, rimp[c, b])
        if not (r1 == r2 == r3):
            return FLReport(False, "residuation", (lab[a], lab[b], lab[c]))
    return FLReport(True)


def is_commutative(alg: FiniteAlgebra) -> bool:
    f = alg.ops["fus"]
    return bool((f == f.T).all())


def is_integral(alg: FiniteAlgebra) -> bool:
    one = int(alg.ops["one"])
    return all(alg.leq(a, one) for a in range(len(alg)))


def is_zero_bounded(alg: FiniteAlgebra) -> bool:
    zero = int(alg.ops.get("zero", -1)) if "zero" in alg.ops else None
    return zero is not None and all(alg.leq(zero, a) for a in range(len(alg)))


def fl_designated(alg: FiniteAlgebra) -> frozenset[int]:
    one = int(alg.ops["one"])
    return frozenset(a for a in range(len(alg)) if alg.leq(one, a))


def fl_suite(flew_only: bool = False) -> list[FiniteMatrix]:
    """Bundled FL-algebras as matrices designating ``{x >= 1}``; ``flew_only`` keeps the
    commutative, integral, 0-bounded ones."""
    suite = []
    for name in bundled_names("fl"):
        m = load_matrix(name, "fl")
        if flew_only and not (is_commutative(m.algebra) and is_integral(m.algebra)
                              and is_zero_bounded(m.algebra)):
            continue
        suite.append(m)
    return suite


# ---------------------------------------------------- definable functions

def definable_functions(alg: FiniteAlgebra, arity: int, ops: t.Iterable[str] | None = None) -> set[tuple[int, ...]]:
    """All ``arity``-ary term functions of ``alg``, as value tuples over :func:`valuation_grid` order."""
    n = len(alg)
    names = sorted(alg.ops) if ops is None else list(ops)
    grid = valuation_grid(n, arity)
    found: dict[tuple, np.ndarray] = {}
    frontier = []
    for row in grid:
        key = tuple(int(x) for x in row)
        if key not in found:
            found[key] = row.astype(np.uint8)
            frontier.append(key)
    for nm in names:
        if alg.ops[nm].ndim == 0:
            row = np.full(grid.shape[1], int(alg.ops[nm]), dtype=np.uint8)
            key = tuple(int(x) for x in row)
            if key not in found:
                found[key] = row
                frontier.append(key)
    while frontier:
        new = []
        current = list(found)
        fresh = set(frontier)
        for nm in names:
            table = alg.ops[nm]
            k = table.ndim
            if k == 0:
                continue
            for combo in itertools.product(current, repeat=k):
                if not fresh.intersection(combo):
                    continue
                row = table[tuple(found[c] for c in combo)]
                key = tuple(int(x) for x in row)
                if key not in found:
                    found[key] = row
                    new.append(key)
        frontier = new
    return set(found)
