"""Discrete belief networks, evidence, and the network interchange format."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CPTNotNormalized,
    CycleDetected,
    EvidenceContradiction,
    NegativeProbability,
    TableSizeMismatch,
)
from .factors import Factor

KINDS = ("information-bit", "parity-bit", "generic")
CPT_TOL = 1e-12


@dataclass(frozen=True)
class Variable:
    id: int
    cardinality: int = 2
    kind: str = "generic"

    def __post_init__(self):
        if self.cardinality < 2:
            raise ValueError(f"variable {self.id}: cardinality must be >= 2")
        if self.kind not in KINDS:
            raise ValueError(f"variable {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class BeliefNetwork:
    variables: tuple[Variable, ...]
    parents: tuple[tuple[int, ...], ...]
    cpts: tuple[Factor, ...]
    children: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    topological_order: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        kids: list[list[int]] = [[] for _ in self.variables]
        for child, pa in enumerate(self.parents):
            for p in pa:
                kids[p].append(child)
        object.__setattr__(self, "children", tuple(tuple(k) for k in kids))
        object.__setattr__(self, "topological_order", _toposort(self.parents))

    def __len__(self):
        return len(self.variables)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    def ids_of_kind(self, kind: str) -> list[int]:
        return [v.id for v in self.variables if v.kind == kind]


@dataclass(frozen=True, eq=False)
class Evidence:
    """Hard instantiations plus unary soft-evidence likelihood factors."""

    assignments: Mapping[int, int] = field(default_factory=dict)
    likelihoods: tuple[Factor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "assignments", {int(k): int(v) for k, v in self.assignments.items()})
        object.__setattr__(self, "likelihoods", tuple(self.likelihoods))
        for f in self.likelihoods:
            if len(f.scope) != 1:
                raise ValueError("likelihood factors must be unary")
            if f.scope[0] in self.assignments:
                raise ValueError(f"variable {f.scope[0]} has both hard and soft evidence")

    def validate(self, net: BeliefNetwork) -> None:
        for v, val in self.assignments.items():
            if not 0 <= v < len(net):
                raise ValueError(f"evidence on unknown variable {v}")
            if not 0 <= val < net.variables[v].cardinality:
                raise ValueError(f"evidence value {val} out of range for variable {v}")
        for f in self.likelihoods:
            v = f.scope[0]
            if not 0 <= v < len(net) or f.cards[0] != net.variables[v].cardinality:
                raise TableSizeMismatch(f"likelihood on variable {v} does not match network")


NO_EVIDENCE = Evidence()


def _toposort(parents: Sequence[Sequence[int]]) -> tuple[int, ...]:
    n = len(parents)
    indeg = [len(pa) for pa in parents]
    kids: list[list[int]] = [[] for _ in range(n)]
    for c, pa in enumerate(parents):
        for p in pa:
            kids[p].append(c)
    ready = [v for v in range(n) if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in kids[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(order) != n:
        raise CycleDetected("parent relation contains a directed cycle")
    return tuple(order)


def build_network(variables, parent_lists, cpt_tables) -> BeliefNetwork:
    """Validate and assemble a network.

    ``variables`` may be Variable objects or plain cardinalities. Each CPT is
    given over (parents..., child) either as a shaped array or as a flat
    row-major table.
    """
    vars_ = []
    for k, v in enumerate(variables):
        if isinstance(v, Variable):
            if v.id != k:
                raise ValueError(f"variable ids must be 0..n-1 in order, got {v.id} at {k}")
            vars_.append(v)
        else:
            vars_.append(Variable(k, int(v)))
    n = len(vars_)
    if len(parent_lists) != n or len(cpt_tables) != n:
        raise TableSizeMismatch("need one parent list and one CPT per variable")
    parents = []
    for child, pa in enumerate(parent_lists):
        pa = tuple(int(p) for p in pa)
        if any(not 0 <= p < n for p in pa):
            raise ValueError(f"variable {child} has an out-of-range parent")
        if len(set(pa)) != len(pa) or child in pa:
            raise CycleDetected(f"variable {child} lists itself or a duplicate parent")
        parents.append(pa)
    _toposort(parents)

    cpts = []
    for child, (pa, table) in enumerate(zip(parents, cpt_tables)):
        scope = pa + (child,)
        cards = tuple(vars_[v].cardinality for v in scope)
        arr = np.asarray(table, dtype=np.float64)
        if arr.size != int(np.prod(cards)):
            raise TableSizeMismatch(
                f"CPT of variable {child} has {arr.size} entries, expected {int(np.prod(cards))}"
            )
        if np.any(arr < 0):
            raise NegativeProbability(f"CPT of variable {child} has a negative entry")
        f = Factor(scope, arr.reshape(cards))
        sums = f.values.sum(axis=-1)
        if np.any(np.abs(sums - 1.0) > CPT_TOL):
            raise CPTNotNormalized(f"CPT of variable {child} is not normalized over the child")
        cpts.append(f)
    return BeliefNetwork(tuple(vars_), tuple(parents), tuple(cpts))


def _full_assignment(net: BeliefNetwork, assignment) -> list[int]:
    if isinstance(assignment, Mapping):
        if set(assignment) != set(range(len(net))):
            raise ValueError("assignment must cover every variable")
        return [int(assignment[v]) for v in range(len(net))]
    values = [int(x) for x in assignment]
    if len(values) != len(net):
        raise ValueError("assignment must cover every variable")
    return values


def log_joint(net: BeliefNetwork, assignment, evidence: Evidence = NO_EVIDENCE) -> float:
    x = _full_assignment(net, assignment)
    for v, val in evidence.assignments.items():
        if x[v] != val:
            raise EvidenceContradiction(f"assignment sets variable {v}={x[v]}, evidence says {val}")
    total = 0.0
    for f in list(net.cpts) + list(evidence.likelihoods):
        p = f.value_at(x)
        if p == 0.0:
            return -math.inf
        total += math.log(p)
    return total


def joint_probability(net: BeliefNetwork, assignment, evidence: Evidence = NO_EVIDENCE) -> float:
    """Product of every CPT and soft-evidence entry at a full assignment."""
    x = _full_assignment(net, assignment)
    for v, val in evidence.assignments.items():
        if x[v] != val:
            raise EvidenceContradiction(f"assignment sets variable {v}={x[v]}, evidence says {val}")
    p = 1.0
    for f in list(net.cpts) + list(evidence.likelihoods):
        p *= f.value_at(x)
    return p


# Interchange format: one record per variable,
#   id cardinality kind parents table...
# where parents is a comma-joined id list or "-" for a root.

def dumps_network(net: BeliefNetwork) -> str:
    lines = ["# id cardinality kind parents table..."]
    for v, pa, cpt in zip(net.variables, net.parents, net.cpts):
        pa_tok = ",".join(map(str, pa)) if pa else "-"
        entries = " ".join(repr(float(x)) for x in cpt.table)
        lines.append(f"{v.id} {v.cardinality} {v.kind} {pa_tok} {entries}")
    return "\n".join(lines) + "\n"


def loads_network(text: str) -> BeliefNetwork:
    records = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) < 5:
            raise ValueError(f"line {lineno}: expected id, cardinality, kind, parents, table")
        vid, card, kind, pa_tok = int(tok[0]), int(tok[1]), tok[2], tok[3]
        pa = () if pa_tok == "-" else tuple(int(p) for p in pa_tok.split(","))
        records.append((vid, card, kind, pa, [float(x) for x in tok[4:]]))
    records.sort(key=lambda r: r[0])
    variables = [Variable(r[0], r[1], r[2]) for r in records]
    return build_network(variables, [r[3] for r in records], [r[4] for r in records])
