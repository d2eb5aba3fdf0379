"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --repeat 5

Covers the two hot loops in isolation and a full decode per decoder on a
structured code. Prints one row per (case, backend) plus the speedup.
"""
import argparse
import sys
import time

import numpy as np

from bcode import kernels
from bcode.bench import CodeSpec, DecoderKind, decode, reference_ordering
from bcode.coding import build_decoding_instance, encode, transmit


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def combine_case(rng, width, n_tables=4):
    cards = [2] * (width + 1)
    var = width
    scopes, tables = [], []
    for t in range(n_tables):
        k = width + 1 if t == 0 else int(rng.integers(2, width + 1))
        s = tuple(sorted(rng.choice(width, k - 1, replace=False).tolist())) + (var,)
        scopes.append(s)
        tables.append(np.log(rng.random([2] * len(s)) + 0.01))
    out_scope = tuple(sorted(set().union(*scopes) - {var}))

    def run():
        kernels.combine_eliminate(tables, scopes, out_scope, var, cards, True, True)
    return run


def pearl_case(rng, n_parents, calls=200):
    cpt = rng.random([2] * (n_parents + 1))
    cpt /= cpt.sum(axis=-1, keepdims=True)
    pis = [rng.random(2) for _ in range(n_parents)]
    lam = rng.random(2)

    def run():
        for _ in range(calls):
            kernels.pearl_messages(cpt, pis, lam)
    return run


def decode_case(dec, K, P, sigma, trials=20):
    spec = CodeSpec("structured", K, P)
    g = spec.build()
    order = reference_ordering(spec, g)
    rng = np.random.default_rng(0)
    instances = []
    for _ in range(trials):
        u = rng.integers(0, 2, size=K)
        instances.append(build_decoding_instance(g, transmit(encode(g, u), sigma, rng), sigma))

    def run():
        for inst in instances:
            decode(inst, dec, order)
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--k", type=int, default=25)
    ap.add_argument("--p", type=int, default=4)
    args = ap.parse_args(argv)

    if len(kernels.AVAILABLE) < 2:
        print("compiled extension not built; only numpy available", file=sys.stderr)

    rng = np.random.default_rng(42)
    cases = [(f"combine_eliminate w={w}", combine_case(rng, w)) for w in (6, 10, 14)]
    cases += [(f"pearl_messages x200 parents={m}", pearl_case(rng, m)) for m in (2, 4, 7)]
    for text in ("elim-mpe", "approx-mpe(1)", "ibp(10)"):
        cases.append((f"decode {text} K={args.k} P={args.p} x20",
                      decode_case(DecoderKind.parse(text), args.k, args.p, 0.4)))

    print(f"{'case':<40} " + " ".join(f"{b:>10}" for b in kernels.AVAILABLE) + "   speedup")
    previous = kernels.backend()
    try:
        for name, fn in cases:
            row = {}
            for b in kernels.AVAILABLE:
                kernels.use_backend(b)
                fn()  # warm caches
                row[b] = best_of(fn, args.repeat)
            cells = " ".join(f"{row[b] * 1e3:>8.2f}ms" for b in kernels.AVAILABLE)
            speed = f"{row['numpy'] / row['cython']:8.2f}x" if "cython" in row else ""
            print(f"{name:<40} {cells} {speed}")
    finally:
        kernels.use_backend(previous)
    return 0


if __name__ == "__main__":
    sys.exit(main())
