"""Mini-bucket approximation approx-mpe(i).

Each bucket is split into mini-buckets of at most ``max(i, F)`` variables
(counting the bucket variable), F being the largest family size in the
network. Maximizing each mini-bucket separately bounds the exact bucket
function from above, so the final scalar is an upper bound on the MPE value.
The greedy forward assignment is a concrete tuple whose joint probability is
a lower bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .elimination import MAX, _sequence, forward_assign, run_backward, DEFAULT_TABLE_CAP
from .errors import ZeroEvidenceProbability
from .network import NO_EVIDENCE, BeliefNetwork, Evidence, log_joint


@dataclass(frozen=True)
class MiniBucketPartition:
    groups: tuple[tuple[int, ...], ...]
    bound: int
    effective_bound: int


@dataclass
class ApproxResult:
    assignment: dict
    lower_log: float
    upper_log: float
    i: int
    max_group_scope: int = 0


def i_partition(scopes: Sequence[Sequence[int]], i: int, floor: int = 0) -> MiniBucketPartition:
    """Greedy first-fit partition by decreasing arity.

    Factors are visited largest scope first (ties: smallest sorted scope, then
    input position) and join the first group whose combined scope stays within
    ``max(i, floor)`` variables; otherwise they open a new group. A factor
    wider than that bound always ends up alone. ``floor`` lets the caller
    raise the bound to the network's largest family size.
    """
    if i < 1:
        raise ValueError("i must be >= 1")
    bound = max(i, floor)
    order = sorted(range(len(scopes)), key=lambda k: (-len(set(scopes[k])), sorted(scopes[k]), k))
    groups: list[list[int]] = []
    unions: list[set] = []
    for k in order:
        s = set(scopes[k])
        for grp, u in zip(groups, unions):
            if len(u | s) <= bound:
                grp.append(k)
                u |= s
                break
        else:
            groups.append([k])
            unions.append(set(s))
    widest = max((len(set(s)) for s in scopes), default=0)
    return MiniBucketPartition(tuple(tuple(g) for g in groups), i, max(bound, widest))


def family_bound(net: BeliefNetwork) -> int:
    """Largest CPT scope (parents plus child); no mini-bucket can be narrower."""
    return max((len(f.scope) for f in net.cpts), default=1)


def approx_mpe(net: BeliefNetwork, ordering=None, evidence: Evidence = NO_EVIDENCE, i: int = 1,
               cap: int = DEFAULT_TABLE_CAP) -> ApproxResult:
    """Mini-bucket MPE bounds; mini-buckets hold up to max(i, largest family) variables."""
    seq = _sequence(net, ordering)
    family = family_bound(net)

    def split(scopes, var):
        return [list(g) for g in i_partition(scopes, i, family).groups]

    trace = run_backward(net, seq, evidence, [MAX] * len(seq), log_domain=True,
                         partition=split, cap=cap)
    if trace.scalar == -math.inf:
        raise ZeroEvidenceProbability("evidence has probability 0")
    full = forward_assign(trace, net, evidence)
    lower = log_joint(net, full, evidence)
    free = {v: x for v, x in full.items() if v not in evidence.assignments}
    return ApproxResult(free, lower, trace.scalar, i, trace.max_group_scope)
