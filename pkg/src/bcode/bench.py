"""Monte-Carlo decoding experiments and BER reports."""
from __future__ import annotations

import csv
import io
import math
import re
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .coding import (
    GeneratorMatrix,
    build_decoding_instance,
    code_network,
    encode,
    hamming_code,
    random_code,
    structured_code,
    transmit,
)
from .elimination import elim_bel, elim_map, elim_mpe, query_first
from .errors import BcodeError, ConfigError, LengthMismatch
from .graph import Ordering, find_ordering, moral_graph
from .ibp import run_ibp
from .minibucket import approx_mpe
from .network import BeliefNetwork, Evidence

DECODER_TAGS = ("elim-bel", "elim-mpe", "elim-map", "approx-mpe", "ibp")
_PARAMETRIZED = {"approx-mpe", "ibp"}
CSV_COLUMNS = ["sigma", "decoder", "param", "trials", "bit_errors", "ber", "stderr", "mean_time_s"]


@dataclass(frozen=True, order=True)
class DecoderKind:
    tag: str
    param: Optional[int] = None

    def __post_init__(self):
        if self.tag not in DECODER_TAGS:
            raise ConfigError(f"unknown decoder {self.tag!r}")
        if self.tag in _PARAMETRIZED:
            if self.param is None or self.param < 1:
                raise ConfigError(f"decoder {self.tag} needs a parameter >= 1")
        elif self.param is not None:
            raise ConfigError(f"decoder {self.tag} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "DecoderKind":
        m = re.fullmatch(r"\s*([a-z-]+)\s*(?:\(\s*(\d+)\s*\))?\s*", text.lower())
        if not m:
            raise ConfigError(f"cannot parse decoder {text!r}")
        tag, param = m.group(1), m.group(2)
        if tag == "ibp" and param is None:
            raise ConfigError("ibp needs an iteration count, e.g. ibp(10)")
        return cls(tag, int(param) if param is not None else None)

    def __str__(self):
        return self.tag if self.param is None else f"{self.tag}({self.param})"


@dataclass(frozen=True)
class CodeSpec:
    kind: str
    K: int
    P: Optional[int] = None
    seed: int = 0

    @property
    def N(self) -> int:
        return {"hamming-7-4": 7, "hamming-15-11": 15}.get(self.kind, 2 * self.K)

    @property
    def rate(self) -> float:
        return self.K / self.N

    def build(self, seed: Optional[int] = None) -> GeneratorMatrix:
        if self.kind == "hamming-7-4":
            return hamming_code(7)
        if self.kind == "hamming-15-11":
            return hamming_code(15)
        if self.P is None:
            raise ConfigError(f"{self.kind} codes need a parent-set size P")
        if self.kind == "structured":
            return structured_code(self.K, self.P)
        if self.kind == "random":
            return random_code(self.K, self.P, self.seed if seed is None else seed)
        raise ConfigError(f"unknown code kind {self.kind!r}")


@dataclass
class ExperimentConfig:
    code: CodeSpec
    sigmas: Sequence[float]
    decoders: Sequence[DecoderKind]
    trials: int = 1000
    master_seed: int = 0
    ordering: Optional[Sequence[int]] = None
    ordering_heuristic: Optional[str] = None
    code_per_trial: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.sigmas or any(not s > 0 for s in self.sigmas):
            raise ConfigError("sigmas must be a nonempty list of positive values")
        if not self.decoders:
            raise ConfigError("no decoders configured")


@dataclass
class ReportRow:
    sigma: float
    decoder: DecoderKind
    trials: int
    bit_errors: int
    K: int
    total_time: float = 0.0
    failed: Optional[str] = None

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.K)

    @property
    def stderr(self) -> float:
        p = self.ber
        return math.sqrt(p * (1 - p) / (self.trials * self.K))

    @property
    def mean_time_s(self) -> float:
        return self.total_time / self.trials if self.trials else 0.0


@dataclass
class TrialOutcome:
    sigma_index: int
    sigma: float
    trial: int
    u: np.ndarray
    decoded: dict = field(default_factory=dict)  # DecoderKind -> tuple of bits
    seconds: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)  # DecoderKind -> error message


def ber(decoded_u, true_u) -> float:
    a, b = np.asarray(decoded_u), np.asarray(true_u)
    if a.shape != b.shape:
        raise LengthMismatch(f"decoded length {a.shape} != true length {b.shape}")
    return float(np.count_nonzero(a != b)) / a.size


def reference_ordering(code: CodeSpec, g: GeneratorMatrix, heuristic: Optional[str] = None) -> Ordering:
    """Ordering used by the elimination decoders.

    Random codes default to the natural ordering (u bits, then x bits); every
    other kind defaults to min-fill, which attains the smallest known width on
    Hamming and structured codes.
    """
    mg = moral_graph(code_network(g))
    if heuristic is None:
        heuristic = "natural" if code.kind == "random" else "min-fill"
    if heuristic == "natural":
        return Ordering.along(mg, range(g.N))
    return find_ordering(mg, heuristic)


def decode(instance: tuple[BeliefNetwork, Evidence], decoder: DecoderKind, ordering=None) -> list[int]:
    """Recover the information bits of a decoding instance.

    elim-bel and ibp decide bit-wise from posteriors; elim-mpe and approx-mpe
    read u off a full most-probable assignment; elim-map maximizes over u only.
    """
    net, evidence = instance
    info = net.ids_of_kind("information-bit")
    seq = tuple(range(len(net))) if ordering is None else tuple(
        ordering.sequence if isinstance(ordering, Ordering) else ordering)
    if decoder.tag == "elim-mpe":
        a = elim_mpe(net, seq, evidence).assignment
        return [a[k] for k in info]
    if decoder.tag == "approx-mpe":
        a = approx_mpe(net, seq, evidence, decoder.param).assignment
        return [a[k] for k in info]
    if decoder.tag == "elim-map":
        infos = set(info)
        hyp_first = [v for v in seq if v in infos] + [v for v in seq if v not in infos]
        a, _ = elim_map(net, hyp_first, evidence, info)
        return [a[k] for k in info]
    if decoder.tag == "elim-bel":
        return [int(np.argmax(elim_bel(net, query_first(seq, k), evidence, k))) for k in info]
    if decoder.tag == "ibp":
        return run_ibp(net, evidence, decoder.param).decide(info)
    raise ConfigError(f"unknown decoder {decoder}")


def trial_rng(master_seed: int, trial: int, sigma_index: int) -> np.random.Generator:
    """PCG64 seeded by SeedSequence([master_seed, trial, sigma_index])."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, trial, sigma_index]))


def iter_trials(config: ExperimentConfig) -> Iterator[TrialOutcome]:
    """Run every decoder on the same noisy observation for each (sigma, trial)."""
    spec = config.code
    fixed = None if config.code_per_trial else spec.build()
    orderings: dict = {}
    dead: dict = {}
    for s_idx, sigma in enumerate(config.sigmas):
        for t in range(config.trials):
            g = fixed if fixed is not None else spec.build(seed=spec.seed * 1_000_003 + t)
            if config.ordering is not None:
                order = tuple(config.ordering)
            else:
                key = g if config.code_per_trial else None
                if key not in orderings:
                    orderings[key] = reference_ordering(spec, g, config.ordering_heuristic).sequence
                order = orderings[key]
                if config.code_per_trial:
                    orderings.clear()
            rng = trial_rng(config.master_seed, t, s_idx)
            u = rng.integers(0, 2, size=g.K)
            y = transmit(encode(g, u), sigma, rng)
            instance = build_decoding_instance(g, y, sigma)
            out = TrialOutcome(s_idx, sigma, t, u)
            for dec in config.decoders:
                if (s_idx, dec) in dead:
                    out.failures[dec] = dead[(s_idx, dec)]
                    continue
                start = time.perf_counter()
                try:
                    bits = decode(instance, dec, order)
                except BcodeError as exc:
                    msg = f"{type(exc).__name__}: {exc}"
                    dead[(s_idx, dec)] = msg
                    out.failures[dec] = msg
                    continue
                out.seconds[dec] = time.perf_counter() - start
                out.decoded[dec] = tuple(bits)
            yield out


def run_experiment(config: ExperimentConfig) -> list[ReportRow]:
    K = config.code.K
    rows = {(s, d): ReportRow(sigma, d, 0, 0, K)
            for s, sigma in enumerate(config.sigmas) for d in config.decoders}
    for out in iter_trials(config):
        for dec in config.decoders:
            row = rows[(out.sigma_index, dec)]
            if dec in out.failures:
                row.failed = out.failures[dec]
                continue
            row.trials += 1
            row.bit_errors += int(np.count_nonzero(np.asarray(out.decoded[dec]) != out.u))
            row.total_time += out.seconds[dec]
    return sort_rows(rows.values())


def sort_rows(rows) -> list[ReportRow]:
    return sorted(rows, key=lambda r: (r.sigma, r.decoder.tag, r.decoder.param or 0))


def emit_report(rows: Sequence[ReportRow], fmt: str = "csv") -> str:
    if not rows:
        raise ValueError("no rows to report")
    rows = sort_rows(rows)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            param = "" if r.decoder.param is None else str(r.decoder.param)
            if r.failed:
                w.writerow([repr(r.sigma), r.decoder.tag, param, r.trials, "", "failed", "", ""])
            else:
                w.writerow([repr(r.sigma), r.decoder.tag, param, r.trials, r.bit_errors,
                            f"{r.ber:.6g}", f"{r.stderr:.3g}", f"{r.mean_time_s:.6f}"])
        return buf.getvalue()
    if fmt == "pretty":
        return _pretty(rows)
    raise ValueError(f"unknown report format {fmt!r}")


def _pretty(rows: Sequence[ReportRow]) -> str:
    decoders = sorted({r.decoder for r in rows}, key=lambda d: (d.tag, d.param or 0))
    sigmas = sorted({r.sigma for r in rows})
    cell = {(r.sigma, r.decoder): r for r in rows}
    names = [str(d) for d in decoders]
    width = max(10, *(len(n) + 1 for n in names))
    head = "sigma ".ljust(7) + "".join(f"BER {n}".rjust(width + 4) for n in names) + \
        "".join(f"t {n}".rjust(width + 2) for n in names)
    lines = [head]
    for s in sigmas:
        ber_cells, time_cells = [], []
        for d in decoders:
            r = cell.get((s, d))
            if r is None or r.failed:
                ber_cells.append("failed".rjust(width + 4))
                time_cells.append("-".rjust(width + 2))
            else:
                ber_cells.append(f"{r.ber:.1e}".rjust(width + 4))
                time_cells.append(f"{r.mean_time_s:.3f}".rjust(width + 2))
        lines.append(f"{s:<7.3g}" + "".join(ber_cells) + "".join(time_cells))
    return "\n".join(lines) + "\n"
