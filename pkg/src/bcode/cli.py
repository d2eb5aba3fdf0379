"""Command-line entry point: ``bcode gen | decode | bench``.

Exit codes: 0 success, 1 bad arguments or configuration, 2 decoder failure.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .bench import (
    CodeSpec,
    DecoderKind,
    ExperimentConfig,
    decode,
    emit_report,
    run_experiment,
    trial_rng,
)
from .coding import (
    build_decoding_instance,
    code_network,
    dumps_generator,
    encode,
    loads_generator,
    transmit,
)
from .errors import BcodeError, ConfigError
from .graph import Ordering, find_ordering, moral_graph

EXIT_OK, EXIT_CONFIG, EXIT_DECODER = 0, 1, 2
CODE_KINDS = ("structured", "random", "hamming-7-4", "hamming-15-11")
HEURISTICS = ("min-fill", "min-degree", "natural")


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key=value`` experiment file; ``#`` starts a comment."""
    raw: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        raw[key] = value

    known = {"code.kind", "code.k", "code.p", "code.seed", "sigmas", "decoders",
             "trials", "seed", "ordering", "code_per_trial"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown keys: {', '.join(sorted(extra))}")
    for key in ("code.kind", "sigmas", "decoders"):
        if key not in raw:
            raise ConfigError(f"missing key {key!r}")

    def integer(key, default=None):
        if key not in raw:
            return default
        try:
            return int(raw[key])
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw[key]!r}") from None

    kind = raw["code.kind"]
    if kind not in CODE_KINDS:
        raise ConfigError(f"unknown code.kind {kind!r}")
    K = {"hamming-7-4": 4, "hamming-15-11": 11}.get(kind) or integer("code.k")
    if K is None:
        raise ConfigError(f"code.k is required for {kind} codes")
    code = CodeSpec(kind, K, integer("code.p"), integer("code.seed", 0))

    try:
        sigmas = [float(s) for s in raw["sigmas"].split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad sigma list {raw['sigmas']!r}") from None
    names = re.findall(r"[^,()]+(?:\([^)]*\))?", raw["decoders"])
    decoders = [DecoderKind.parse(d) for d in names if d.strip()]

    ordering, heuristic = None, None
    if "ordering" in raw:
        val = raw["ordering"]
        if val in HEURISTICS:
            heuristic = val
        else:
            try:
                ordering = [int(v) for v in val.split(",")]
            except ValueError:
                raise ConfigError(f"ordering must be a heuristic name or id list, got {val!r}") from None
    per_trial = raw.get("code_per_trial", "false").lower()
    if per_trial not in ("true", "false", "1", "0", "yes", "no"):
        raise ConfigError(f"code_per_trial must be a boolean, got {per_trial!r}")

    return ExperimentConfig(code, sigmas, decoders, trials=integer("trials", 1000),
                            master_seed=integer("seed", 0), ordering=ordering,
                            ordering_heuristic=heuristic,
                            code_per_trial=per_trial in ("true", "1", "yes"))


def _write(text: str, out: Optional[str]) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen(args) -> int:
    spec = CodeSpec(args.kind, args.k if args.k is not None else 0, args.p, args.seed)
    if args.kind in ("structured", "random") and args.k is None:
        raise ConfigError(f"--k is required for {args.kind} codes")
    _write(dumps_generator(spec.build()), args.output)
    return EXIT_OK


def cmd_decode(args) -> int:
    try:
        g = loads_generator(Path(args.code).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read code file: {exc}") from None
    text = args.decoder if args.param is None else f"{args.decoder}({args.param})"
    decoder = DecoderKind.parse(text)
    mg = moral_graph(code_network(g))
    if args.ordering == "natural":
        order = Ordering.along(mg, range(g.N))
    else:
        order = find_ordering(mg, args.ordering)

    rng = trial_rng(args.seed, 0, 0)
    u = rng.integers(0, 2, size=g.K)
    y = transmit(encode(g, u), args.sigma, rng)
    try:
        bits = decode(build_decoding_instance(g, y, args.sigma), decoder, order)
    except BcodeError as exc:
        print(f"decoder failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DECODER
    errors = int(np.count_nonzero(np.asarray(bits) != u))
    print("u       " + "".join(map(str, u)))
    print("decoded " + "".join(map(str, bits)))
    print(f"bit_errors {errors} of {g.K}")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    config = parse_config(text)
    if args.trials is not None:
        config.trials = args.trials
    rows = run_experiment(config)
    _write(emit_report(rows, args.format), args.output)
    failed = [r for r in rows if r.failed]
    for r in failed:
        print(f"sigma={r.sigma} {r.decoder}: {r.failed}", file=sys.stderr)
    return EXIT_DECODER if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcode", description="Probabilistic decoding of linear block codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generator matrix")
    g.add_argument("--kind", choices=CODE_KINDS, default="structured")
    g.add_argument("--k", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("decode", help="transmit one random message and decode it")
    d.add_argument("--code", required=True, help="generator matrix file")
    d.add_argument("--sigma", type=float, required=True)
    d.add_argument("--decoder", required=True, help="elim-bel, elim-mpe, elim-map, approx-mpe or ibp")
    d.add_argument("--param", type=int, help="i for approx-mpe, iterations for ibp")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--ordering", choices=HEURISTICS, default="min-fill")
    d.set_defaults(func=cmd_decode)

    b = sub.add_parser("bench", help="run a BER experiment")
    b.add_argument("--config", required=True)
    b.add_argument("-o", "--output")
    b.add_argument("--format", choices=("csv", "pretty"), default="csv")
    b.add_argument("--trials", type=int, help="override the configured trial count")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, BcodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
