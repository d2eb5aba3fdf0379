import contextlib

import pytest

from bcode import kernels
from bcode.factors import Factor
from bcode.network import Evidence, build_network


@pytest.fixture(params=kernels.AVAILABLE)
def backend(request):
    """Run the test once per kernel backend, restoring the default afterwards."""
    before = kernels.backend()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(before)


@contextlib.contextmanager
def on_backend(name):
    before = kernels.backend()
    kernels.use_backend(name)
    try:
        yield
    finally:
        kernels.use_backend(before)


def random_network(rng, n, max_parents=3, max_card=2):
    parents, tables, cards = [], [], []
    for v in range(n):
        cards.append(int(rng.integers(2, max_card + 1)))
        k = int(rng.integers(0, min(v, max_parents) + 1))
        pa = sorted(rng.choice(v, k, replace=False).tolist()) if k else []
        t = rng.random(tuple(cards[p] for p in pa) + (cards[v],)) + 1e-3
        t /= t.sum(axis=-1, keepdims=True)
        parents.append(pa)
        tables.append(t)
    return build_network(cards, parents, tables)


def random_polytree(rng, n, max_card=3):
    """DAG whose skeleton is a tree: each new node links to one earlier node, either direction."""
    cards = [int(rng.integers(2, max_card + 1)) for _ in range(n)]
    parents = [[] for _ in range(n)]
    for v in range(1, n):
        u = int(rng.integers(0, v))
        if rng.random() < 0.5:
            parents[v].append(u)
        else:
            parents[u].append(v)
    # relabel so parents precede children, keeping ids dense
    order, seen = [], set()

    def visit(v):
        if v in seen:
            return
        seen.add(v)
        for p in parents[v]:
            visit(p)
        order.append(v)

    for v in range(n):
        visit(v)
    new = {old: i for i, old in enumerate(order)}
    pl = [sorted(new[p] for p in parents[old]) for old in order]
    cs = [cards[old] for old in order]
    tables = []
    for v, pa in enumerate(pl):
        t = rng.random(tuple(cs[p] for p in pa) + (cs[v],)) + 1e-3
        tables.append(t / t.sum(axis=-1, keepdims=True))
    return build_network(cs, pl, tables)


def random_evidence(rng, net, hard=2, soft=2):
    n = len(net)
    obs = {int(v): int(rng.integers(net.variables[v].cardinality))
           for v in rng.choice(n, min(hard, n - 1), replace=False)}
    free = [v for v in range(n) if v not in obs]
    picks = rng.choice(free, min(soft, len(free)), replace=False)
    liks = [Factor((int(v),), rng.random(net.variables[v].cardinality) + 1e-3) for v in picks]
    return Evidence(obs, tuple(liks))


ACCEPTANCE_LINES: list = []


def record(criterion, ok, detail):
    """Log one acceptance verdict; shown in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
