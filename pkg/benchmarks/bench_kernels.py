"""Compare the compiled and numpy evaluation kernels.

    python3 benchmarks/bench_kernels.py [--n 7] [--fl-n 4] [--repeat 5]

Evaluates two large shared DAGs under every valuation, once per backend, and
checks the value tables agree: the CPC translation table of K3 over the Boolean
matrix, and the FL translation table of K3 over the four-element FL algebras.
"""

import argparse
import time

from contrans import kernels, substructural as sub, translate_cpc as cpc
from contrans.formula import dag_size
from contrans.matrix import load_matrix, value_table
from contrans.oracle import load_source


def timed(matrix, roots, nvars, repeat):
    best, vals = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        _, vals = value_table(matrix, roots, range(nvars))
        best = min(best, time.perf_counter() - t0)
    return best, vals


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--fl-n", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    source = load_source("k3")
    cpc_roots = cpc.single_conclusion_table(source).build(args.n).betas
    fl_roots = sub.FLTranslationTable(source).build(args.fl_n).betas
    workloads = [("bool", load_matrix("bool"), cpc_roots, args.n)]
    workloads += [(name, load_matrix(name, kind="fl"), fl_roots, args.fl_n + 1)
                  for name in ("luk4", "godel4", "nc4")]
    print(f"cpc workload: {dag_size(cpc_roots)} dag nodes; fl workload: {dag_size(fl_roots)} dag nodes")
    print(f"{'matrix':<8}{'valuations':>12}" + "".join(f"{b:>12}" for b in sorted(kernels.BACKENDS)) + f"{'speedup':>10}")
    active = kernels.BACKEND
    try:
        for name, matrix, roots, nvars in workloads:
            times, tables = {}, {}
            for backend in sorted(kernels.BACKENDS):
                kernels.use_backend(backend)
                times[backend], tables[backend] = timed(matrix, roots, nvars, args.repeat)
            ref = next(iter(tables.values()))
            assert all((v == ref).all() for v in tables.values()), f"backends disagree on {name}"
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{name:<8}{ref.shape[1]:>12}" + "".join(f"{times[b]:>12.4f}" for b in sorted(times))
                  + f"{speed:>9.1f}x")
    finally:
        kernels.use_backend(active)


if __name__ == "__main__":
    main()
