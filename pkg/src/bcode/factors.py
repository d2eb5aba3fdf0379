"""Dense factor tables and the product / elimination operators over them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CardinalityMismatch,
    NegativeProbability,
    TableSizeMismatch,
    VariableNotInScope,
)


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative function over an ordered scope.

    ``values`` has one axis per scope variable, so ``values.ravel()`` is the
    row-major table with the last scope variable varying fastest.
    """

    scope: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        scope = tuple(int(v) for v in self.scope)
        values = np.array(self.values, dtype=np.float64)  # private copy, frozen below
        if len(set(scope)) != len(scope):
            raise ValueError(f"duplicate variable in scope {scope}")
        if values.ndim != len(scope):
            if values.ndim == 1 and len(scope) > 0:
                raise TableSizeMismatch(
                    "flat tables need explicit cardinalities; use Factor.from_flat"
                )
            raise TableSizeMismatch(f"table rank {values.ndim} != scope size {len(scope)}")
        if not np.all(np.isfinite(values)):
            raise NegativeProbability("factor entries must be finite")
        if np.any(values < 0):
            raise NegativeProbability("factor entries must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_flat(cls, scope: Sequence[int], cards: Sequence[int], table) -> "Factor":
        table = np.asarray(table, dtype=np.float64).ravel()
        size = int(np.prod(cards, dtype=np.int64))
        if table.size != size:
            raise TableSizeMismatch(f"table has {table.size} entries, expected {size}")
        return cls(tuple(scope), table.reshape(tuple(cards)))

    @classmethod
    def scalar(cls, value: float = 1.0) -> "Factor":
        return cls((), np.array(float(value)))

    @property
    def cards(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def table(self) -> np.ndarray:
        return self.values.ravel()

    def card_of(self, var: int) -> int:
        return self.values.shape[self.scope.index(var)]

    def value_at(self, assignment) -> float:
        return float(self.values[tuple(assignment[v] for v in self.scope)])

    def reduce(self, var: int, value: int) -> "Factor":
        """Instantiate ``var = value``; the variable leaves the scope."""
        if var not in self.scope:
            raise VariableNotInScope(f"variable {var} not in scope {self.scope}")
        axis = self.scope.index(var)
        vals = np.take(self.values, value, axis=axis)
        return Factor(self.scope[:axis] + self.scope[axis + 1:], vals)

    def __repr__(self):
        return f"Factor(scope={self.scope}, table={self.table.tolist()})"


def _union_scope(fs: Iterable[Factor]) -> tuple[tuple[int, ...], dict[int, int]]:
    scope: list[int] = []
    cards: dict[int, int] = {}
    for f in fs:
        for v, c in zip(f.scope, f.cards):
            if v in cards:
                if cards[v] != c:
                    raise CardinalityMismatch(f"variable {v} has cardinality {cards[v]} and {c}")
            else:
                cards[v] = c
                scope.append(v)
    return tuple(scope), cards


def aligned(values: np.ndarray, scope: Sequence[int], target: Sequence[int]) -> np.ndarray:
    """View ``values`` (over ``scope``) broadcastable against ``target`` axes."""
    pos = {v: k for k, v in enumerate(target)}
    order = sorted(range(len(scope)), key=lambda k: pos[scope[k]])
    arr = np.transpose(values, order) if order != list(range(len(scope))) else values
    shape = [1] * len(target)
    for k in order:
        shape[pos[scope[k]]] = values.shape[k]
    return arr.reshape(shape)


def factor_product(fs: Sequence[Factor]) -> Factor:
    if not fs:
        return Factor.scalar(1.0)
    scope, cards = _union_scope(fs)
    out = np.ones(tuple(cards[v] for v in scope))
    for f in fs:
        out = out * aligned(f.values, f.scope, scope)
    return Factor(scope, out)


def factor_eliminate(f: Factor, var: int, op: str = "sum") -> Factor:
    if var not in f.scope:
        raise VariableNotInScope(f"variable {var} not in scope {f.scope}")
    axis = f.scope.index(var)
    if op == "max":
        vals = f.values.max(axis=axis)
    elif op == "sum":
        vals = f.values.sum(axis=axis)
    else:
        raise ValueError(f"unknown elimination operator {op!r}")
    return Factor(f.scope[:axis] + f.scope[axis + 1:], vals)
