"""Finitary consequence oracles (single- and multiple-conclusion) with memoization."""

from __future__ import annotations

import abc
import itertools
import threading
import typing as t
from collections import OrderedDict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .formula import Enumeration, Formula, variables
from .matrix import (
    LogicFileError, FiniteMatrix, bundled_names, designation_masks, load_matrix, masks_entail, parse_logic,
)

_UNIVERSE_LIMIT = 1 << 16


class InconsistentSource(ValueError):
    """The source proves the empty sequent, so no translation into classical logic exists."""


class _Cache:
    def __init__(self, cap: int | None = None):
        self.cap = cap
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        return None

    def put(self, key, value) -> None:
        with self._lock:
            self._data[key] = value
            if self.cap is not None and len(self._data) > self.cap:
                self._data.popitem(last=False)

    def __len__(self) -> int:
        return len(self._data)


class ConsequenceOracle(abc.ABC):
    """A finitary deductive system over an enumerated set of formulas.

    Subclasses implement :meth:`formula` (the enumeration) and either
    ``_sc`` or, for native multiple-conclusion systems, ``_mc``. Answers are
    memoized on ``(frozenset(premises), conclusion(s))``.
    """

    native_mc = False
    name = "oracle"

    def __init__(self, cache_cap: int | None = None):
        self._sc_cache = _Cache(cache_cap)
        self._mc_cache = _Cache(cache_cap)
        self.calls = 0
        self.evaluations = 0

    @abc.abstractmethod
    def formula(self, i: int) -> t.Hashable:
        """The ``i``-th formula of the enumeration (``IndexError`` past the end)."""

    def index(self, phi: t.Hashable) -> int:
        for i in itertools.count():
            if self.formula(i) == phi:
                return i

    def prefix(self, n: int) -> list:
        return [self.formula(i) for i in range(n)]

    def _sc(self, gamma: frozenset, phi) -> bool:
        return self._mc(gamma, frozenset((phi,)))

    def _mc(self, gamma: frozenset, delta: frozenset) -> bool:
        raise NotImplementedError

    def sc(self, gamma: t.Iterable, phi) -> bool:
        self.calls += 1
        key = (frozenset(gamma), phi)
        hit = self._sc_cache.get(key)
        if hit is None:
            self.evaluations += 1
            hit = bool(self._sc(key[0], phi))
            self._sc_cache.put(key, hit)
        return hit

    def mc(self, gamma: t.Iterable, delta: t.Iterable) -> bool:
        """Multiple-conclusion query: native if the system has one, else "some conclusion follows"."""
        delta = tuple(delta)
        if not self.native_mc:
            gamma = frozenset(gamma)
            return any(self.sc(gamma, psi) for psi in delta)
        self.calls += 1
        key = (frozenset(gamma), frozenset(delta))
        hit = self._mc_cache.get(key)
        if hit is None:
            self.evaluations += 1
            hit = bool(self._mc(*key))
            self._mc_cache.put(key, hit)
        return hit

    def consistent(self) -> bool:
        return not self.mc((), ())

    def require_consistent(self) -> None:
        if not self.consistent():
            raise InconsistentSource(f"{self.name}: the empty sequent is derivable (source must be consistent)")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class MCLift(ConsequenceOracle):
    """Multiple-conclusion extension of a single-conclusion system: Γ ⊢ Δ iff Γ ⊢ ψ for some ψ in Δ."""

    native_mc = False

    def __init__(self, base: ConsequenceOracle, cache_cap: int | None = None):
        super().__init__(cache_cap)
        self.base = base
        self.name = f"lift({base.name})"

    def formula(self, i: int):
        return self.base.formula(i)

    def index(self, phi) -> int:
        return self.base.index(phi)

    def _sc(self, gamma, phi) -> bool:
        return self.base.sc(gamma, phi)


def mc_query(oracle: ConsequenceOracle, gamma: t.Iterable, delta: t.Iterable) -> bool:
    return oracle.mc(gamma, delta)


class MatrixOracle(ConsequenceOracle):
    """Consequence of a finite matrix, formulas enumerated over the matrix signature.

    Designation bitsets are computed once per formula over a shared pool of
    variables and reused across queries; the pool grows on demand.
    """

    native_mc = True

    def __init__(self, matrix: FiniteMatrix, cache_cap: int | None = None):
        super().__init__(cache_cap)
        self.matrix = matrix
        self.name = matrix.name
        self.enumeration = Enumeration(matrix.signature)
        self._universe: tuple[int, ...] = ()
        self._masks: dict[int, int] = {}
        self._full = 1
        self._lock = threading.Lock()

    def formula(self, i: int) -> Formula:
        return self.enumeration[i]

    def index(self, phi: Formula) -> int:
        return self.enumeration.index(phi)

    def masks(self, formulas: t.Sequence[Formula]) -> tuple[list[int], int] | None:
        """Designation bitsets over the shared pool, or None if the pool would be too large."""
        need = frozenset().union(*(variables(f) for f in formulas)) if formulas else frozenset()
        with self._lock:
            if not need <= set(self._universe):
                universe = tuple(sorted(need | set(self._universe)))
                if len(self.matrix.algebra) ** len(universe) > _UNIVERSE_LIMIT:
                    return None
                self._universe = universe
                self._masks = {}
            missing = [f for f in dict.fromkeys(formulas) if f.uid not in self._masks]
            if missing:
                _, ms, self._full = designation_masks(self.matrix, missing, self._universe)
                self._masks.update((f.uid, m) for f, m in zip(missing, ms))
            elif not self._universe:
                self._full = 1
            return [self._masks[f.uid] for f in formulas], self._full

    def _mc(self, gamma, delta) -> bool:
        gamma, delta = list(gamma), list(delta)
        got = self.masks(gamma + delta)
        if got is None:
            _, ms, full = designation_masks(self.matrix, gamma + delta)
        else:
            ms, full = got
        return masks_entail(ms[:len(gamma)], ms[len(gamma):], full)


class ModelOracle(ConsequenceOracle):
    """Abstract multiple-conclusion system on finitely many opaque formulas, given by its models.

    ``Γ ⊢ Δ`` iff no model contains all of Γ and none of Δ. Such systems are
    not propositional; the formulas are plain labels.
    """

    native_mc = True

    def __init__(self, formulas: t.Sequence[str], models: t.Iterable[t.Iterable[str]],
                 name: str = "theory", cache_cap: int | None = None):
        super().__init__(cache_cap)
        self.formulas = list(formulas)
        self._pos = {f: i for i, f in enumerate(self.formulas)}
        self.models = [frozenset(m) for m in models]
        for m in self.models:
            unknown = m - set(self.formulas)
            if unknown:
                raise ValueError(f"model mentions unknown formulas {sorted(unknown)}")
        self.name = name

    def formula(self, i: int) -> str:
        if i < 0:
            raise IndexError(i)
        return self.formulas[i]

    def index(self, phi: str) -> int:
        return self._pos[phi]

    def _mc(self, gamma, delta) -> bool:
        return not any(gamma <= m and not (delta & m) for m in self.models)


def parse_theory(text: str, name: str = "theory") -> ModelOracle:
    formulas: list[str] | None = None
    models = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise LogicFileError(f"line {lineno}: unexpected {line!r}")
        if key == "formulas":
            formulas = rest.split()
        elif key == "model":
            models.append(rest.split())
        elif key == "name":
            name = rest.strip()
        elif key != "description":
            raise LogicFileError(f"line {lineno}: unknown key {key!r}")
    if formulas is None:
        raise LogicFileError("theory file needs a 'formulas:' line")
    try:
        return ModelOracle(formulas, models, name)
    except ValueError as exc:
        raise LogicFileError(str(exc)) from None


def load_source(name_or_path: str | Path, cache_cap: int | None = None) -> ConsequenceOracle:
    """Oracle for a bundled logic name or a logic file (matrix or model-theory format)."""
    p = Path(name_or_path)
    if p.suffix == ".logic" or p.exists():
        if not p.exists():
            raise LogicFileError(f"no such logic file: {p}")
        text, stem = p.read_text(), p.stem
    else:
        res = resources.files("contrans") / "data" / "logics" / f"{name_or_path}.logic"
        if not res.is_file():
            raise LogicFileError(f"unknown logic {name_or_path!r}; bundled: {bundled_names()}")
        text, stem = res.read_text(), str(name_or_path)
    if any(line.strip().startswith("formulas:") for line in text.splitlines()):
        oracle = parse_theory(text, stem)
        oracle._sc_cache.cap = oracle._mc_cache.cap = cache_cap
        return oracle
    return MatrixOracle(parse_logic(text, stem), cache_cap)


def matrix_oracle(name: str, cache_cap: int | None = None) -> MatrixOracle:
    return MatrixOracle(load_matrix(name), cache_cap)


# ------------------------------------------------------------ axiom check

@dataclass
class AxiomReport:
    checked: int = 0
    consistent: bool = True
    violations: list[tuple[str, tuple, tuple]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v[0] for v in self.violations}


def check_consequence_axioms(oracle: ConsequenceOracle, n: int) -> AxiomReport:
    """Exhaustively test reflexivity, monotonicity and finitary cut on the first ``n`` formulas.

    Sequents are checked in the multiple-conclusion reading (:meth:`ConsequenceOracle.mc`).
    """
    forms = oracle.prefix(n)
    report = AxiomReport(consistent=oracle.consistent())
    subsets = [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]

    def q(x, y):
        report.checked += 1
        return oracle.mc([forms[i] for i in sorted(x)], [forms[i] for i in sorted(y)])

    for i in range(n):
        if not q({i}, {i}):
            report.violations.append(("reflexivity", (i,), (i,)))
    for x in subsets:
        for y in subsets:
            holds = q(x, y)
            if holds:
                for i in range(n):
                    if i not in x and not q(x | {i}, y):
                        report.violations.append(("monotonicity", tuple(sorted(x | {i})), tuple(sorted(y))))
                    if i not in y and not q(x, y | {i}):
                        report.violations.append(("monotonicity", tuple(sorted(x)), tuple(sorted(y | {i}))))
            else:
                for i in range(n):
                    if q(x | {i}, y) and q(x, y | {i}):
                        report.violations.append(("cut", tuple(sorted(x)), tuple(sorted(y))))
                        break
    return report
