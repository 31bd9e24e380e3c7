"""Command-line entry point: ``contrans translate | verify | bench``.

Exit codes: 0 success / all checks pass, 1 a check failed, 2 bad input or configuration.
"""

from __future__ import annotations

import argparse
import sys
import time
import typing as t
from concurrent.futures import ThreadPoolExecutor

from . import clones, kernels, kleene, substructural as sub, translate_cpc as cpc
from .formula import Enumeration, Signature, SignatureError, rename, to_text, tree_size, dag_size
from .matrix import LogicFileError, designation_masks, value_table
from .oracle import InconsistentSource, check_consequence_axioms, load_source
from .report import Report

TARGETS = ("cpc", "cpc-mc", "fl", "bck", "kleene-cnf", "implication-fragment", "monotone-lp")
# largest prefix length accepted without --cap; fl/bck caps count the top index
CAPS = {"cpc": 8, "cpc-mc": 8, "fl": sub.FL_CAP + 1, "bck": sub.BCK_CAP + 1}
CLASSICAL_TARGETS = {"kleene-cnf": kleene.CPC_SIGNATURE, "implication-fragment": kleene.CPC_SIGNATURE,
                     "monotone-lp": ("and", "or", "top", "bot")}
SUITE_ALIASES = {"lemma35": "definability"}
SUITES = ("definability", "affine", "monotone-lp", "implication", "kleene", "fragment", "all")


class ConfigError(Exception):
    pass


class Writer:
    """Serializes report records to one stream."""

    def __init__(self, stream: t.TextIO):
        self.stream = stream
        self.failed = False

    def check(self, rep: Report) -> None:
        self.failed |= not rep.ok
        print("CHECK\t" + rep.line(), file=self.stream)

    def line(self, text: str) -> None:
        print(text, file=self.stream)


# ------------------------------------------------------------------ helpers

def _cap(args, target: str) -> int:
    return args.cap if args.cap is not None else CAPS.get(target, 64)


def _check_n(args) -> None:
    if args.n is None or args.n < 0:
        raise ConfigError("--n must be a non-negative prefix length")
    cap = _cap(args, args.target)
    if args.n > cap:
        raise ConfigError(f"--n {args.n} exceeds the {args.target} cap {cap} (override with --cap)")


def _source(args):
    oracle = load_source(args.logic, cache_cap=args.cache_cap)
    oracle.require_consistent()
    probe = min(args.n, 4)
    try:
        axioms = check_consequence_axioms(oracle, probe)
    except IndexError:
        axioms = None
    if axioms is not None and not axioms.ok:
        kind, gamma, delta = axioms.violations[0]
        raise ConfigError(f"{oracle.name}: consequence axiom spot-check failed ({kind} at {gamma} / {delta})")
    return oracle


def _classical_prefix(args) -> list:
    nvars = args.vars or 2
    sig = Signature.of(*CLASSICAL_TARGETS[args.target], max_vars=nvars)
    return Enumeration(sig).prefix(args.n)


def _build(args):
    """(table-like object, images, labels) for the configured target."""
    if args.target in CLASSICAL_TARGETS:
        src = _classical_prefix(args)
        fn = {"kleene-cnf": kleene.cnf_translate, "implication-fragment": clones.implication_translate,
              "monotone-lp": clones.monotone_to_lp}[args.target]
        return None, [fn(f) for f in src], src
    oracle = _source(args)
    if args.target == "cpc":
        table = cpc.single_conclusion_table(oracle)
    elif args.target == "cpc-mc":
        table = cpc.TranslationTable(oracle)
    elif args.target == "fl":
        table = sub.FLTranslationTable(oracle, cap=_cap(args, "fl") - 1)
    else:
        table = sub.BCKTranslationTable(oracle, cap=_cap(args, "bck") - 1)
    table.build(args.n)
    return table, table.betas[:args.n], table.alphas[:args.n]


def _queries(table) -> list[int]:
    if isinstance(table, cpc.TranslationTable):
        return [s.queries for s in table.stats]
    return list(table.queries)


# ------------------------------------------------------------------ commands

def cmd_translate(args, out: Writer) -> int:
    _check_n(args)
    table, images, sources = _build(args)
    text = cpc.export_tree(images) if args.format == "tree" else cpc.export_table(images)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.line(text.rstrip("\n"))
    queries = sum(_queries(table)) if table is not None else 0
    sizes = [tree_size(b) for b in images]
    summary = (f"# target={args.target} steps={len(images)} oracle_queries={queries} "
               f"dag_nodes={dag_size(images)} max_tree_size={max(sizes, default=0)}")
    print(summary, file=sys.stdout if args.out else sys.stderr)
    return 0


def _verify_table(args, out: Writer) -> None:
    table, _, _ = _build(args) if args.target not in CLASSICAL_TARGETS else (None, None, None)
    n = args.n
    if args.target in ("cpc", "cpc-mc"):
        out.check(cpc.verify_conservative(table, n, "mc" if args.target == "cpc-mc" else "sc"))
        if args.target == "cpc":
            out.check(cpc.verify_conservative(table, n, "mc"))
        out.check(cpc.check_prefix_invariant(table, n))
        out.check(cpc.check_gamma_delta(table))
        out.check(cpc.check_valuation_lemma(table, n))
        shift = n
        out.check(cpc.check_most_general(table, lambda a: rename(table.translate(a), shift), n))
        out.check(cpc.check_disjunction_property(table, n))
    elif args.target == "fl":
        out.check(sub.check_projection(table, n))
        out.check(sub.check_end_to_end(table, n))
        out.check(sub.fl_model_check(table, n))
        out.check(sub.check_lu_closure(table, n))
    elif args.target == "bck":
        out.check(sub.check_projection(table, n))
        out.check(sub.check_end_to_end(table, n))
        out.check(sub.bck_model_check(table, max(n - 1, 0)))
        out.check(sub.check_curry(table))
    elif args.target == "kleene-cnf":
        nvars = args.vars or 3
        if nvars > 3:
            if args.seed is None:
                raise ConfigError("beyond 3 variables the CNF check samples formulas; pass --seed")
            out.check(kleene.sample_cnf_equivalence(nvars, args.n or 200, args.seed))
        else:
            out.check(kleene.verify_k_conservative(n, nvars))
            out.check(kleene.k_conservative_by_depth(nvars, args.depth))
            out.check(kleene.check_clause_lemma(nvars))
    elif args.target == "implication-fragment":
        out.check(clones.implication_by_depth(args.vars or 2, args.depth))
    elif args.target == "monotone-lp":
        out.check(clones.monotone_lp_by_depth(args.vars or 3, args.depth))


def _suite_definability() -> Report:
    rep = Report("implication-definability", "binary functions, arity<=3")
    for f in clones.all_functions(2):
        rep.checked += 1
        a = clones.implication_definable([f])
        if not a == clones.closure_contains_implication([f], 2) == clones.closure_contains_implication([f], 3):
            rep.fail(f.bits())
    rep.info["agree"] = f"{rep.checked - len(rep.violations)}/{rep.checked}"
    return rep


def _suite_affine() -> Report:
    rep = Report("affine-chain", "arities 1-3")
    for k in (1, 2, 3):
        rep.checked += 1
        if clones.affine_chain_max(k) != 3 or clones.affine_order_violations(k):
            rep.fail(k)
    return rep


def _suite_fragment(args, out: Writer) -> None:
    if not args.connectives:
        raise ConfigError("--suite fragment needs --connectives (e.g. nand or f/2:0111)")
    try:
        gens = clones.parse_functions(args.connectives)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    verdict = clones.analyze(gens)
    for name, flags in verdict.functions.items():
        out.line("FUNC\t" + name + "\t" + " ".join(f"{k}={int(v)}" for k, v in flags.items()))
    out.line(f"VERDICT\tuniversal={verdict.universal}\treason={verdict.reason or '-'}\t{verdict.certificate()}")
    rep = Report("fragment-closure", args.connectives)
    rep.checked = 1
    if verdict.implication_definable != clones.closure_contains_implication(gens, 2):
        rep.fail("containment test and closure disagree")
    out.check(rep)


def _lp_refute(path: str, out: Writer) -> None:
    try:
        cand = kleene.load_candidate(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    try:
        ref = kleene.lp_refute(cand)
    except kleene.IncompleteCandidate as exc:
        raise ConfigError(str(exc)) from None
    except SignatureError as exc:
        raise ConfigError(f"candidate leaves the LP signature: {exc}") from None
    for ln in ref.lines():
        out.line("WITNESS\t" + ln)
    rep = Report("lp-refute", path, checked=len(ref.claims) + 1)
    if not ref.verify():
        rep.fail("a claimed entailment does not re-verify")
    if not ref.minimality():
        rep.fail("subset-minimality of phi_0..phi_n fails")
    out.check(rep)


def cmd_verify(args, out: Writer) -> int:
    if args.lp_refute:
        _lp_refute(args.lp_refute, out)
    elif args.suite:
        args.suite = SUITE_ALIASES.get(args.suite, args.suite)
        jobs: list[t.Callable[[], Report]] = []
        names = SUITES[:-2] if args.suite == "all" else (args.suite,)
        for s in names:
            if s == "definability":
                jobs.append(_suite_definability)
            elif s == "affine":
                jobs.append(_suite_affine)
            elif s == "monotone-lp":
                jobs.append(lambda: clones.monotone_lp_by_depth(args.vars or 3, args.depth))
            elif s == "implication":
                jobs.append(lambda: clones.implication_by_depth(args.vars or 2, args.depth))
            elif s == "kleene":
                jobs.extend([lambda: kleene.k_conservative_by_depth(args.vars or 3, args.depth),
                             lambda: kleene.check_clause_lemma(args.vars or 3)])
            elif s == "fragment":
                _suite_fragment(args, out)
        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            for rep in pool.map(lambda f: f(), jobs):   # map keeps submission order
                out.check(rep)
    else:
        if not args.target or (not args.logic and args.target not in CLASSICAL_TARGETS):
            raise ConfigError("verify needs --suite, --lp-refute, or --logic/--target/--n")
        if args.n is None:
            args.n = 6 if args.target in ("cpc", "cpc-mc") else 8
        _check_n(args)
        _verify_table(args, out)
    return 1 if out.failed else 0


def cmd_bench(args, out: Writer) -> int:
    if args.kernels:
        return bench_kernels(args, out)
    _check_n(args)
    out.line("BENCH\tn\tqueries\tdag_nodes\ttree_size" + ("\tseconds" if args.timing else ""))
    oracle = _source(args)
    if args.target in ("cpc", "cpc-mc"):
        table = cpc.TranslationTable(oracle) if args.target == "cpc-mc" else cpc.single_conclusion_table(oracle)
    elif args.target == "fl":
        table = sub.FLTranslationTable(oracle, cap=_cap(args, "fl") - 1)
    elif args.target == "bck":
        table = sub.BCKTranslationTable(oracle, cap=_cap(args, "bck") - 1)
    else:
        raise ConfigError(f"bench supports cpc, cpc-mc, fl, bck (not {args.target})")
    for i in range(args.n):
        t0 = time.perf_counter()
        beta = table.build_step()
        dt = time.perf_counter() - t0
        row = f"BENCH\t{i}\t{_queries(table)[i]}\t{dag_size(table.betas)}\t{tree_size(beta)}"
        out.line(row + (f"\t{dt:.4f}" if args.timing else ""))
    return 0


def bench_kernels(args, out: Writer) -> int:
    """Time the compiled and numpy kernels on the same evaluation workload."""
    oracle = load_source(args.logic or "k3")
    n = min(args.n or 7, 8)
    table = cpc.single_conclusion_table(oracle).build(n)
    roots = table.betas
    out.line("KERNEL\tbackend\tnodes\tvaluations\tseconds")
    results = {}
    active = kernels.BACKEND
    try:
        for name in sorted(kernels.BACKENDS):
            kernels.use_backend(name)
            best = float("inf")
            for _ in range(max(1, args.repeat)):
                t0 = time.perf_counter()
                _, vals = value_table(cpc.boolean_matrix(), roots, range(n))
                best = min(best, time.perf_counter() - t0)
            results[name] = vals
            out.line(f"KERNEL\t{name}\t{dag_size(roots)}\t{vals.shape[1]}\t{best:.5f}")
    finally:
        kernels.use_backend(active)
    first = next(iter(results.values()))
    rep = Report("kernels-agree", f"backends={','.join(sorted(results))}", checked=len(results))
    if any((v != first).any() for v in results.values()):
        rep.fail("backends disagree")
    out.check(rep)
    return 0 if rep.ok else 1


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--logic", help="bundled logic name (k3, lp, l3, godel3, cpc2, ...) or a logic file")
    common.add_argument("--target", choices=TARGETS, default=None)
    common.add_argument("--n", type=int, default=None, help="prefix length (number of source formulas)")
    common.add_argument("--vars", type=int, default=None, help="variable cap for classical sources")
    common.add_argument("--out", help="write the table or report here")
    common.add_argument("--seed", type=int, default=None, help="seed for sampled checks beyond exhaustive caps")
    common.add_argument("--jobs", type=int, default=1, help="parallel verification workers")
    common.add_argument("--cache-cap", type=int, default=None, help="bound on memoized oracle answers")
    common.add_argument("--cap", type=int, default=None, help="override the per-target prefix cap")

    p = argparse.ArgumentParser(prog="contrans", description=__doc__.splitlines()[0])
    cmds = p.add_subparsers(dest="command", required=True)
    tr = cmds.add_parser("translate", parents=[common], help="build and export a translation table")
    tr.add_argument("--format", choices=("dag", "tree"), default="dag")
    ve = cmds.add_parser("verify", parents=[common], help="run verification checks")
    ve.add_argument("--suite", choices=SUITES + tuple(SUITE_ALIASES))
    ve.add_argument("--connectives", help="comma-separated catalog names or name/arity:bits tables")
    ve.add_argument("--lp-refute", metavar="FILE", help="candidate map file '<classical> => <LP>'")
    ve.add_argument("--depth", type=int, default=3, help="formula depth bound for depth-class checks")
    be = cmds.add_parser("bench", parents=[common], help="per-step growth report")
    be.add_argument("--kernels", action="store_true", help="compare evaluation backends instead")
    be.add_argument("--timing", action="store_true", help="add wall-clock seconds per step")
    be.add_argument("--repeat", type=int, default=3)
    return p


def main(argv: t.Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    stream = open(args.out, "w") if args.out and args.command != "translate" else sys.stdout
    out = Writer(stream)
    try:
        if args.command in ("translate", "bench") and not getattr(args, "kernels", False):
            if args.target is None:
                raise ConfigError("--target is required")
            if args.target not in CLASSICAL_TARGETS and not args.logic:
                raise ConfigError("--logic is required for this target")
            if args.n is None:
                raise ConfigError("--n is required")
        handler = {"translate": cmd_translate, "verify": cmd_verify, "bench": cmd_bench}[args.command]
        return handler(args, out)
    except InconsistentSource as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, LogicFileError, SignatureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if stream is not sys.stdout:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
