"""Exact bucket elimination: elim-mpe, elim-bel and elim-map.

Buckets follow an ordering X_1..X_n: every function goes to the bucket of its
latest variable, buckets are processed from X_n down to X_1, and each
generated function drops into the bucket of its own latest variable.
Max-product runs on log tables; sum-product runs on linear tables that are
rescaled to a maximum of 1 after every bucket, with the scale kept in log form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import (
    OrderingMismatch,
    OrderingViolatesHypothesisPrefix,
    OutOfMemoryBudget,
    ZeroEvidenceProbability,
)
from .graph import Ordering, moral_graph
from .network import NO_EVIDENCE, BeliefNetwork, Evidence

DEFAULT_TABLE_CAP = 2 ** 26

MAX, SUM, KEEP = "max", "sum", "keep"


@dataclass
class Bucket:
    variable: int
    factors: list = field(default_factory=list)
    hard_value: Optional[int] = None


@dataclass
class EliminationTrace:
    ordering: tuple[int, ...]
    # Bucket.factors holds (scope, table) pairs in the working domain,
    # original functions first, then those received from later buckets
    buckets: list
    generated: list  # per position: list of (scope, destination position)
    scalar: float  # accumulated log value
    max_generated_scope: int = 0
    max_group_scope: int = 0
    kept: Optional[np.ndarray] = None  # unreduced table of a KEEP bucket


@dataclass
class MpeResult:
    assignment: dict
    log_probability: float

    @property
    def probability(self) -> float:
        return math.exp(self.log_probability)


def _sequence(net: BeliefNetwork, ordering) -> tuple[int, ...]:
    if ordering is None:
        return tuple(range(len(net)))
    seq = tuple(int(v) for v in (ordering.sequence if isinstance(ordering, Ordering) else ordering))
    if len(seq) != len(net) or set(seq) != set(range(len(net))):
        raise OrderingMismatch("ordering must be a permutation of the network's variables")
    return seq


def partition_buckets(net: BeliefNetwork, ordering, evidence: Evidence = NO_EVIDENCE) -> list[Bucket]:
    """Place each CPT and likelihood in the bucket of its latest variable."""
    seq = _sequence(net, ordering)
    evidence.validate(net)
    pos = {v: k for k, v in enumerate(seq)}
    buckets = [Bucket(v, [], evidence.assignments.get(v)) for v in seq]
    for f in list(net.cpts) + list(evidence.likelihoods):
        buckets[max(pos[v] for v in f.scope)].factors.append(f)
    return buckets


def _log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def _plan_scopes(seq, pos, cards, initial_scopes, hard, partition, cap):
    """Symbolic backward pass; raises OutOfMemoryBudget before any table is built."""
    buckets = [[] for _ in seq]
    for s in initial_scopes:
        if s:
            buckets[max(pos[v] for v in s)].append(tuple(s))
    for p in range(len(seq) - 1, -1, -1):
        var = seq[p]
        scopes = buckets[p]
        if var in hard:
            outs = [tuple(v for v in s if v != var) for s in scopes]
        else:
            groups = partition(scopes, var) if partition else [list(range(len(scopes)))]
            outs = []
            for grp in groups:
                u = {v for k in grp for v in scopes[k]}
                u.discard(var)
                size = math.prod(cards[v] for v in u)
                if size > cap:
                    raise OutOfMemoryBudget(
                        f"bucket of variable {var} would generate {size} entries (cap {cap})"
                    )
                outs.append(tuple(u))
        for s in outs:
            if s:
                buckets[max(pos[v] for v in s)].append(s)


def run_backward(net: BeliefNetwork, ordering, evidence: Evidence, ops: Sequence[str], *,
                 log_domain: bool, partition: Optional[Callable] = None,
                 cap: int = DEFAULT_TABLE_CAP) -> EliminationTrace:
    """Backward phase shared by every bucket algorithm.

    ``ops[p]`` is the operator for the bucket at ordering position p: "max",
    "sum", or "keep" (combine without eliminating; only allowed at p = 0).
    ``partition(scopes, var)`` splits a bucket into mini-buckets.
    """
    seq = _sequence(net, ordering)
    evidence.validate(net)
    pos = {v: k for k, v in enumerate(seq)}
    cards = net.cards
    hard = evidence.assignments
    originals = list(net.cpts) + list(evidence.likelihoods)
    _plan_scopes(seq, pos, cards, [f.scope for f in originals], hard, partition, cap)

    conv = _log if log_domain else (lambda a: a)
    # entries are (scope, table) in the working domain
    work: list[list] = [[] for _ in seq]
    for f in originals:
        work[max(pos[v] for v in f.scope)].append((f.scope, conv(f.values)))
    scalar = 0.0
    generated: list[list] = [[] for _ in seq]
    max_gen = max_group = 0
    kept = None

    def route(scope, table, p_from):
        nonlocal scalar
        if not scope:
            val = float(table)
            if log_domain:
                scalar += val
            else:
                scalar += math.log(val) if val > 0 else -math.inf
            generated[p_from].append(((), None))
            return
        dest = max(pos[v] for v in scope)
        work[dest].append((scope, table))
        generated[p_from].append((scope, dest))

    for p in range(len(seq) - 1, -1, -1):
        var = seq[p]
        entries = work[p]
        if var in hard:
            val = hard[var]
            for scope, table in entries:
                axis = scope.index(var)
                route(scope[:axis] + scope[axis + 1:], np.take(table, val, axis=axis), p)
            continue
        op = ops[p]
        if not entries:
            if op == SUM:
                scalar += math.log(cards[var])
            continue
        if op == KEEP:
            if p != 0:
                raise ValueError("only the first bucket may be kept unreduced")
            kept = kernels.combine_eliminate(
                [t for _, t in entries], [s for s, _ in entries], (var,), None, cards,
                log_domain, True)
            continue
        if partition is not None:
            groups = partition([s for s, _ in entries], var)
        else:
            groups = [list(range(len(entries)))]
        for grp in groups:
            scopes = [entries[k][0] for k in grp]
            union = sorted({v for s in scopes for v in s}, key=pos.__getitem__)
            max_group = max(max_group, len(union))
            out_scope = tuple(v for v in union if v != var)
            max_gen = max(max_gen, len(out_scope))
            h = kernels.combine_eliminate(
                [entries[k][1] for k in grp], scopes, out_scope, var, cards,
                log_domain, op == MAX)
            if not log_domain and out_scope:
                top = float(h.max())
                if top <= 0.0:
                    raise ZeroEvidenceProbability(f"bucket of variable {var} produced an all-zero function")
                h = h / top
                scalar += math.log(top)
            route(out_scope, h, p)

    buckets = [Bucket(v, work[p], hard.get(v)) for p, v in enumerate(seq)]
    return EliminationTrace(seq, buckets, generated, scalar, max_gen, max_group, kept)


def _bucket_vector(entries, var, card, assignment, log_domain) -> np.ndarray:
    """Combine a bucket's functions at ``assignment`` as a function of ``var``."""
    acc = np.zeros(card) if log_domain else np.ones(card)
    for scope, table in entries:
        idx = tuple(slice(None) if v == var else assignment[v] for v in scope)
        vec = table[idx]
        acc = acc + vec if log_domain else acc * vec
    return acc


def forward_assign(trace: EliminationTrace, net: BeliefNetwork, evidence: Evidence,
                   positions=None, log_domain: bool = True) -> dict:
    """Assign variables along the ordering by maximizing each bucket's product."""
    seq = trace.ordering
    hard = evidence.assignments
    assignment: dict[int, int] = {}
    for p in (range(len(seq)) if positions is None else positions):
        var = seq[p]
        if var in hard:
            assignment[var] = hard[var]
            continue
        vec = _bucket_vector(trace.buckets[p].factors, var, net.variables[var].cardinality, assignment, log_domain)
        assignment[var] = int(np.argmax(vec))
    return assignment


def elim_mpe(net: BeliefNetwork, ordering=None, evidence: Evidence = NO_EVIDENCE,
             cap: int = DEFAULT_TABLE_CAP) -> MpeResult:
    seq = _sequence(net, ordering)
    trace = run_backward(net, seq, evidence, [MAX] * len(seq), log_domain=True, cap=cap)
    if trace.scalar == -math.inf:
        raise ZeroEvidenceProbability("evidence has probability 0")
    full = forward_assign(trace, net, evidence)
    free = {v: x for v, x in full.items() if v not in evidence.assignments}
    return MpeResult(free, trace.scalar)


def elim_bel(net: BeliefNetwork, ordering, evidence: Evidence, query: int,
             cap: int = DEFAULT_TABLE_CAP) -> np.ndarray:
    """Posterior of ``query``; the ordering must start with the query."""
    seq = _sequence(net, ordering)
    if seq[0] != query:
        raise OrderingMismatch(f"query {query} must be first in the ordering")
    if query in evidence.assignments:
        raise ValueError(f"query {query} is observed")
    ops = [KEEP] + [SUM] * (len(seq) - 1)
    trace = run_backward(net, seq, evidence, ops, log_domain=False, cap=cap)
    vec = np.asarray(trace.kept, dtype=np.float64)
    total = vec.sum()
    if trace.scalar == -math.inf or not total > 0:
        raise ZeroEvidenceProbability("evidence has probability 0")
    return vec / total


def query_first(ordering, query: int) -> tuple[int, ...]:
    seq = tuple(ordering.sequence if isinstance(ordering, Ordering) else ordering)
    return (query,) + tuple(v for v in seq if v != query)


def elim_map(net: BeliefNetwork, ordering, evidence: Evidence, hypothesis,
             cap: int = DEFAULT_TABLE_CAP) -> tuple[dict, float]:
    """Maximize the evidence-joint marginal over ``hypothesis``.

    Hypothesis variables must occupy the ordering prefix: the later buckets
    sum, the prefix buckets maximize.
    """
    seq = _sequence(net, ordering)
    hyp = set(hypothesis)
    k = len(hyp)
    if set(seq[:k]) != hyp:
        raise OrderingViolatesHypothesisPrefix("hypothesis variables must come first in the ordering")
    ops = [MAX] * k + [SUM] * (len(seq) - k)
    trace = run_backward(net, seq, evidence, ops, log_domain=False, cap=cap)
    if trace.scalar == -math.inf:
        raise ZeroEvidenceProbability("evidence has probability 0")
    assignment = forward_assign(trace, net, evidence, positions=range(k), log_domain=False)
    return assignment, trace.scalar


def induced_width_of(net: BeliefNetwork, ordering) -> int:
    from .graph import width_along
    return width_along(moral_graph(net), _sequence(net, ordering))[1]
