"""Hot-loop dispatch: the compiled extension when built, numpy otherwise.

Set ``BCODE_PURE_PYTHON=1`` to force the numpy path at import, or call
:func:`use_backend` at runtime (tests and benchmarks compare both).
"""
from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from .factors import aligned

try:
    from . import _kernels as _ext
except ImportError:  # extension not built
    _ext = None

AVAILABLE = ("numpy", "cython") if _ext is not None else ("numpy",)
_backend = "cython" if _ext is not None and not os.environ.get("BCODE_PURE_PYTHON") else "numpy"


def backend() -> str:
    return _backend


def use_backend(name: str) -> None:
    global _backend
    if name not in AVAILABLE:
        raise ValueError(f"backend {name!r} unavailable; have {AVAILABLE}")
    _backend = name


def _row_major_strides(shape: Sequence[int]) -> list[int]:
    strides = [1] * len(shape)
    for k in range(len(shape) - 2, -1, -1):
        strides[k] = strides[k + 1] * shape[k + 1]
    return strides


def combine_eliminate(tables: Sequence[np.ndarray], scopes: Sequence[tuple], out_scope: tuple,
                      var, cards: Sequence[int], log_domain: bool, use_max: bool) -> np.ndarray:
    """Combine tables (add logs / multiply) and reduce ``var`` out (max / sum).

    ``var=None`` keeps every axis. Result is shaped by ``out_scope``.
    """
    out_shape = tuple(cards[v] for v in out_scope)
    if _backend == "cython":
        return _combine_ext(tables, scopes, out_scope, var, cards, log_domain, use_max).reshape(out_shape)
    return _combine_numpy(tables, scopes, out_scope, var, cards, log_domain, use_max)


def _combine_ext(tables, scopes, out_scope, var, cards, log_domain, use_max):
    nf = len(tables)
    strides = np.zeros((nf, len(out_scope)), dtype=np.int64)
    elim = np.zeros(nf, dtype=np.int64)
    pos = {v: k for k, v in enumerate(out_scope)}
    flat = []
    for f, (t, s) in enumerate(zip(tables, scopes)):
        flat.append(np.ascontiguousarray(t, dtype=np.float64).ravel())
        for v, st in zip(s, _row_major_strides(t.shape)):
            if v == var:
                elim[f] = st
            else:
                strides[f, pos[v]] = st
    elim_card = 1 if var is None else cards[var]
    out_cards = np.array([cards[v] for v in out_scope], dtype=np.int64)
    return _ext.combine_reduce(flat, strides, out_cards, elim_card, elim, log_domain, use_max)


def _combine_numpy(tables, scopes, out_scope, var, cards, log_domain, use_max):
    target = out_scope if var is None else out_scope + (var,)
    acc = np.zeros(()) if log_domain else np.ones(())
    for t, s in zip(tables, scopes):
        a = aligned(t, s, target)
        acc = acc + a if log_domain else acc * a
    acc = np.broadcast_to(acc, tuple(cards[v] for v in target))
    if var is None:
        return np.array(acc, dtype=np.float64)
    return acc.max(axis=-1) if use_max else acc.sum(axis=-1)


def pearl_messages(cpt: np.ndarray, pis: Sequence[np.ndarray], lam_x: np.ndarray):
    """Unnormalized lambda messages to each parent and the pi vector of a node.

    ``cpt`` is shaped (parents..., child); ``pis[i]`` is the incoming pi
    message from parent i.
    """
    if _backend == "cython":
        return _ext.pearl_messages(
            np.ascontiguousarray(cpt, dtype=np.float64).ravel(),
            np.array(cpt.shape, dtype=np.int64),
            [np.ascontiguousarray(p, dtype=np.float64) for p in pis],
            np.ascontiguousarray(lam_x, dtype=np.float64),
        )
    m = cpt.ndim - 1
    pi_x = cpt
    for p in pis:
        pi_x = np.tensordot(p, pi_x, axes=(0, 0))
    s = cpt @ lam_x
    lams = []
    for i in range(m):
        operands = []
        for k, p in enumerate(pis):
            if k != i:
                operands += [p, [k]]
        lams.append(np.einsum(s, list(range(m)), *operands, [i]))
    return lams, np.asarray(pi_x, dtype=np.float64)
