"""Iterative belief propagation: Pearl's polytree lambda/pi messages, swept
repeatedly over a (possibly loopy) network along an activation schedule.

Soft evidence is a fixed local lambda vector on its node, which is how an
absorbed channel-output child would report to its single parent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import NumericalCollapse
from .network import NO_EVIDENCE, BeliefNetwork, Evidence

_KIND_RANK = {"information-bit": 0, "parity-bit": 1, "generic": 2}


@dataclass(frozen=True)
class Schedule:
    order: tuple[int, ...]


@dataclass
class BeliefTable:
    beliefs: list  # per-node normalized np.ndarray

    def __getitem__(self, v: int) -> np.ndarray:
        return self.beliefs[v]

    def decide(self, ids: Sequence[int]) -> list[int]:
        # argmax; binary ties resolve to 0
        return [int(np.argmax(self.beliefs[v])) for v in ids]


class MessageStore:
    """All lambda/pi vectors of one IBP run.

    ``lam_out[x][i]`` is the lambda message from x to its i-th parent and
    ``pi_out[x][j]`` the pi message from x to its j-th child; both live on the
    domain of the sending parent.
    """

    def __init__(self, net: BeliefNetwork, local: list):
        self.net = net
        self.local = local
        self.lam_out = [[np.ones(net.variables[u].cardinality) for u in pa] for pa in net.parents]
        self.pi_out = [[np.ones(net.variables[x].cardinality) for _ in ch]
                       for x, ch in enumerate(net.children)]
        self.node_lambda = [loc.copy() for loc in local]
        self.node_pi = [np.ones(v.cardinality) for v in net.variables]
        # slot of parent u in child c's parent list / of child c in u's child list
        self.parent_slot = [{u: i for i, u in enumerate(pa)} for pa in net.parents]
        self.child_slot = [{c: j for j, c in enumerate(ch)} for ch in net.children]
        for x, pa in enumerate(net.parents):
            if not pa:
                self.node_pi[x] = net.cpts[x].values.copy()

    @property
    def child_to_parent(self) -> dict:
        return {(c, u): self.lam_out[c][i] for c, pa in enumerate(self.net.parents)
                for i, u in enumerate(pa)}

    @property
    def parent_to_child(self) -> dict:
        return {(u, c): self.pi_out[u][j] for u, ch in enumerate(self.net.children)
                for j, c in enumerate(ch)}

    def incoming_pi(self, x: int) -> list:
        return [self.pi_out[u][self.child_slot[u][x]] for u in self.net.parents[x]]

    def incoming_lambda(self, x: int) -> list:
        return [self.lam_out[c][self.parent_slot[c][x]] for c in self.net.children[x]]


def _normalized(vec: np.ndarray, what: str) -> np.ndarray:
    total = vec.sum()
    if not total > 0:
        raise NumericalCollapse(f"{what} has zero total mass")
    return vec / total


def init_messages(net: BeliefNetwork, evidence: Evidence = NO_EVIDENCE) -> MessageStore:
    evidence.validate(net)
    local = [np.ones(v.cardinality) for v in net.variables]
    for v, val in evidence.assignments.items():
        local[v] = np.zeros(net.variables[v].cardinality)
        local[v][val] = 1.0
    for f in evidence.likelihoods:
        local[f.scope[0]] = local[f.scope[0]] * f.values
    return MessageStore(net, local)


def default_schedule(net: BeliefNetwork) -> Schedule:
    """Information bits, then parity bits, then generic nodes; topological within each."""
    topo = {v: k for k, v in enumerate(net.topological_order)}
    order = sorted(range(len(net)), key=lambda v: (_KIND_RANK[net.variables[v].kind], topo[v]))
    return Schedule(tuple(order))


def _activate(store: MessageStore, x: int) -> None:
    net = store.net
    cpt = net.cpts[x].values
    kids_lam = store.incoming_lambda(x)
    lam_x = store.local[x].copy()
    for lam in kids_lam:
        lam_x = lam_x * lam
    pis = store.incoming_pi(x)
    if pis:
        lams, pi_x = kernels.pearl_messages(cpt, pis, lam_x)
        for i, msg in enumerate(lams):
            store.lam_out[x][i] = _normalized(msg, f"lambda message {x}->{net.parents[x][i]}")
    else:
        pi_x = cpt
    store.node_pi[x] = _normalized(pi_x, f"pi vector of {x}")
    store.node_lambda[x] = _normalized(lam_x, f"lambda vector of {x}")
    base = store.local[x] * store.node_pi[x]
    for j in range(len(kids_lam)):
        msg = base
        for k, lam in enumerate(kids_lam):
            if k != j:
                msg = msg * lam
        store.pi_out[x][j] = _normalized(msg, f"pi message {x}->{net.children[x][j]}")


def propagate_iteration(net: BeliefNetwork, store: MessageStore, schedule: Schedule) -> MessageStore:
    """One sweep; messages update in place so later nodes see fresh values."""
    for x in schedule.order:
        _activate(store, x)
    return store


def beliefs(store: MessageStore) -> BeliefTable:
    net = store.net
    out = []
    for x in range(len(net)):
        lam_x = store.local[x].copy()
        for lam in store.incoming_lambda(x):
            lam_x = lam_x * lam
        pis = store.incoming_pi(x)
        if pis:
            _, pi_x = kernels.pearl_messages(net.cpts[x].values, pis, np.ones_like(lam_x))
        else:
            pi_x = net.cpts[x].values
        out.append(_normalized(lam_x * pi_x, f"belief of {x}"))
    return BeliefTable(out)


def run_ibp(net: BeliefNetwork, evidence: Evidence = NO_EVIDENCE, iterations: int = 10,
            schedule: Optional[Schedule] = None) -> BeliefTable:
    if iterations < 1:
        raise ValueError("need at least one iteration")
    schedule = schedule or default_schedule(net)
    store = init_messages(net, evidence)
    for _ in range(iterations):
        propagate_iteration(net, store, schedule)
    return beliefs(store)
