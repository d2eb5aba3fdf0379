import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcode import kernels
from bcode.coding import build_decoding_instance, structured_code
from bcode.elimination import elim_mpe, induced_width_of
from bcode.graph import find_ordering, moral_graph
from bcode.minibucket import approx_mpe, family_bound, i_partition
from bcode.network import build_network, log_joint
from bcode.oracle import brute_force_log_mpe

from conftest import on_backend, random_evidence, random_network

A, B, C, D = range(4)


def test_partition_example():
    p = i_partition([(A, B), (B, C), (B, D)], 3)
    assert p.groups == ((0, 1), (2,))
    assert p.bound == 3 and p.effective_bound == 3


def test_partition_coarsest():
    p = i_partition([(A, B), (B, C), (B, D)], 4)
    assert p.groups == ((0, 1, 2),)


def test_partition_oversized_factor_alone():
    p = i_partition([tuple(range(8)), (0,)], 1)
    assert p.groups == ((0,), (1,))
    assert p.effective_bound == 8


def test_partition_floor():
    # a floor of 3 lets two pairs sharing a variable merge even at i=1
    assert i_partition([(A, B), (B, C)], 1, floor=3).groups == ((0, 1),)
    with pytest.raises(ValueError):
        i_partition([(A,)], 0)


def test_family_bound():
    assert family_bound(build_network([2], [[]], [[0.5, 0.5]])) == 1
    net, _ = build_decoding_instance(structured_code(10, 4), np.zeros(20), 0.4)
    assert family_bound(net) == 5


@pytest.mark.parametrize("name", kernels.AVAILABLE)
@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), i=st.integers(1, 4))
def test_bracketing(name, seed, i):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11))
    net = random_network(rng, n)
    ev = random_evidence(rng, net, hard=int(rng.integers(0, 3)))
    order = rng.permutation(n).tolist()
    with on_backend(name):
        r = approx_mpe(net, order, ev, i)
    exact = brute_force_log_mpe(net, ev)
    assert r.lower_log <= exact + 1e-9
    assert exact <= r.upper_log + 1e-9
    assert r.lower_log == pytest.approx(log_joint(net, {**r.assignment, **ev.assignments}, ev), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_exact_above_induced_width(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11))
    net = random_network(rng, n)
    ev = random_evidence(rng, net)
    order = rng.permutation(n).tolist()
    i = induced_width_of(net, order) + 1
    r = approx_mpe(net, order, ev, i)
    assert r.upper_log - r.lower_log <= 1e-9
    assert r.upper_log == pytest.approx(elim_mpe(net, order, ev).log_probability, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), i=st.integers(1, 4))
def test_group_scope_bounded(seed, i):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11))
    net = random_network(rng, n)
    r = approx_mpe(net, rng.permutation(n).tolist(), i=i)
    assert r.max_group_scope <= max(i, family_bound(net))


def test_deterministic():
    rng = np.random.default_rng(3)
    net = random_network(rng, 10)
    ev = random_evidence(rng, net)
    a = approx_mpe(net, None, ev, 2)
    b = approx_mpe(net, None, ev, 2)
    assert a.assignment == b.assignment and a.upper_log == b.upper_log


def test_structured_i7_matches_exact():
    g = structured_code(25, 4)
    order = find_ordering(moral_graph(build_decoding_instance(g, np.zeros(50), 0.4)[0]))
    rng = np.random.default_rng(0)
    for _ in range(20):
        y = rng.normal(0.5, 0.6, size=50)
        net, ev = build_decoding_instance(g, y, 0.4)
        r = approx_mpe(net, order, ev, 7)
        e = elim_mpe(net, order, ev)
        assert r.assignment == e.assignment
        assert r.upper_log == pytest.approx(e.log_probability, abs=1e-9)
