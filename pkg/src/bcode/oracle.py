"""Exhaustive-enumeration ground truth for small networks."""
from __future__ import annotations

import math

import numpy as np

from .errors import TooLargeForBruteForce, ZeroEvidenceProbability
from .network import NO_EVIDENCE, BeliefNetwork, Evidence

MAX_CONFIGS = 2 ** 24
_CHUNK = 2 ** 16


def _log_table(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def _enumerate_log_joint(net: BeliefNetwork, evidence: Evidence):
    """Yield (configs, log_joint) chunks in lexicographic order.

    ``configs`` has one column per variable; observed columns are fixed.
    Variable 0 is the most significant digit.
    """
    evidence.validate(net)
    free = [v for v in range(len(net)) if v not in evidence.assignments]
    radix = [net.variables[v].cardinality for v in free]
    total = math.prod(radix)
    if total > MAX_CONFIGS:
        raise TooLargeForBruteForce(f"{total} completions exceed the {MAX_CONFIGS} limit")
    factors = [(f.scope, _log_table(f.values)) for f in list(net.cpts) + list(evidence.likelihoods)]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        configs = np.empty((idx.size, len(net)), dtype=np.int64)
        for v, val in evidence.assignments.items():
            configs[:, v] = val
        rem = idx
        for v, r in zip(reversed(free), reversed(radix)):
            configs[:, v] = rem % r
            rem = rem // r
        logp = np.zeros(idx.size)
        for scope, table in factors:
            logp += table[tuple(configs[:, v] for v in scope)]
        yield configs, logp


def brute_force_mpe(net: BeliefNetwork, evidence: Evidence = NO_EVIDENCE):
    """Return (assignment, probability) maximizing the joint with the evidence.

    Ties resolve to the lexicographically smallest assignment.
    """
    best_log, best = -math.inf, None
    for configs, logp in _enumerate_log_joint(net, evidence):
        k = int(np.argmax(logp))
        if best is None or logp[k] > best_log:
            best_log, best = logp[k], configs[k]
    if best_log == -math.inf:
        raise ZeroEvidenceProbability("every completion of the evidence has probability 0")
    return [int(x) for x in best], math.exp(best_log)


def brute_force_log_mpe(net: BeliefNetwork, evidence: Evidence = NO_EVIDENCE) -> float:
    best = -math.inf
    for _, logp in _enumerate_log_joint(net, evidence):
        best = max(best, float(logp.max()))
    return best


def brute_force_marginals(net: BeliefNetwork, evidence: Evidence = NO_EVIDENCE) -> list[np.ndarray]:
    """Exact posterior of every variable from a single enumeration."""
    cards = net.cards
    mass = [np.zeros(c) for c in cards]
    top = -math.inf
    for configs, logp in _enumerate_log_joint(net, evidence):
        m = float(logp.max())
        if m == -math.inf:
            continue
        if m > top:
            # rescale what has been accumulated to the new reference
            shrink = math.exp(top - m) if top > -math.inf else 0.0
            mass = [a * shrink for a in mass]
            top = m
        w = np.exp(logp - top)
        for v, c in enumerate(cards):
            mass[v] += np.bincount(configs[:, v], weights=w, minlength=c)
    if top == -math.inf:
        raise ZeroEvidenceProbability("every completion of the evidence has probability 0")
    return [a / a.sum() for a in mass]


def brute_force_marginal(net: BeliefNetwork, evidence: Evidence, v: int) -> np.ndarray:
    return brute_force_marginals(net, evidence)[v]
