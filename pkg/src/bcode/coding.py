"""Systematic linear block codes, the AWGN channel, and decoding networks.

Network layout for an (N, K) code: variables ``0..K-1`` are the information
bits u, variables ``K..N-1`` the parity bits x, so variable ``j`` carries
codeword bit ``c_j``. Channel outputs are not network nodes; each ``y_j``
becomes a unary likelihood factor on variable ``j``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import EmptyParityColumn, InvalidParams, LengthMismatch, NotSystematic
from .factors import Factor
from .graph import Ordering, moral_graph
from .network import BeliefNetwork, Evidence, Variable, build_network

HAMMING_7_4 = (
    (1, 0, 0, 0, 1, 1, 0),
    (0, 1, 0, 0, 1, 0, 1),
    (0, 0, 1, 0, 0, 1, 1),
    (0, 0, 0, 1, 1, 1, 1),
)


def _hamming_generator(r: int) -> tuple[tuple[int, ...], ...]:
    # Information bits take the non-power-of-two positions 1..2^r-1 in
    # increasing order; parity bit j covers positions with bit j set. For r=3
    # this reproduces HAMMING_7_4 exactly.
    n = 2 ** r - 1
    data = [p for p in range(1, n + 1) if p & (p - 1)]
    k = len(data)
    rows = []
    for i, pos in enumerate(data):
        row = [0] * n
        row[i] = 1
        for j in range(r):
            row[k + j] = (pos >> j) & 1
        rows.append(tuple(row))
    return tuple(rows)


HAMMING_15_11 = _hamming_generator(4)


@dataclass(frozen=True)
class GeneratorMatrix:
    bits: tuple[tuple[int, ...], ...]

    @property
    def K(self) -> int:
        return len(self.bits)

    @property
    def N(self) -> int:
        return len(self.bits[0]) if self.bits else 0

    @property
    def rate(self) -> float:
        return self.K / self.N

    def array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8).reshape(self.K, self.N)

    def parity_parents(self) -> list[tuple[int, ...]]:
        """Information-bit indices feeding each parity bit, in column order."""
        return [tuple(i for i in range(self.K) if self.bits[i][j])
                for j in range(self.K, self.N)]


def code_from_generator(bits) -> GeneratorMatrix:
    arr = np.asarray(bits)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InvalidParams("generator must be a nonempty K x N matrix")
    k, n = arr.shape
    if n < k or not np.isin(arr, (0, 1)).all():
        raise InvalidParams("generator must be a 0/1 matrix with N >= K")
    if not np.array_equal(arr[:, :k], np.eye(k, dtype=arr.dtype)):
        raise NotSystematic("first K columns must form the identity")
    for j in range(k, n):
        if not arr[:, j].any():
            raise EmptyParityColumn(f"parity column {j} has no nonzero entry")
    return GeneratorMatrix(tuple(tuple(int(b) for b in row) for row in arr))


def hamming_code(n: int = 7) -> GeneratorMatrix:
    if n == 7:
        return code_from_generator(HAMMING_7_4)
    if n == 15:
        return code_from_generator(HAMMING_15_11)
    raise InvalidParams(f"no Hamming code of length {n}")


def structured_code(K: int, P: int) -> GeneratorMatrix:
    """Rate-1/2 code whose parity bit i is u_i + u_{i+1} + ... + u_{i+P-1} (mod K)."""
    if not 1 <= P <= K:
        raise InvalidParams(f"need 1 <= P <= K, got K={K}, P={P}")
    g = np.zeros((K, 2 * K), dtype=np.uint8)
    g[:, :K] = np.eye(K, dtype=np.uint8)
    for i in range(K):
        for j in range(P):
            g[(i + j) % K, K + i] = 1
    return code_from_generator(g)


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood 2014), 64-bit state.

    Used for code construction so that a (K, P, seed) triple names the same
    matrix on every platform and numpy version.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        # rejection sampling removes modulo bias
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next()
            if r < limit:
                return r % n


def random_code(K: int, P: int, seed: int) -> GeneratorMatrix:
    """Rate-1/2 code; each parity bit XORs P distinct information bits.

    Parents of parity bit i are the first P slots of a partial Fisher-Yates
    shuffle of ``range(K)`` driven by one SplitMix64 stream, columns drawn in
    order i = 0..K-1.
    """
    if not 1 <= P <= K:
        raise InvalidParams(f"need 1 <= P <= K, got K={K}, P={P}")
    rng = SplitMix64(seed)
    g = np.zeros((K, 2 * K), dtype=np.uint8)
    g[:, :K] = np.eye(K, dtype=np.uint8)
    for i in range(K):
        pool = list(range(K))
        for j in range(P):
            r = j + rng.below(K - j)
            pool[j], pool[r] = pool[r], pool[j]
        for row in pool[:P]:
            g[row, K + i] = 1
    return code_from_generator(g)


def encode(g: GeneratorMatrix, u) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    if u.shape != (g.K,):
        raise LengthMismatch(f"expected {g.K} information bits, got {u.shape}")
    return (u @ g.array()) % 2


def transmit(c, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if not (sigma > 0 and np.isfinite(sigma)):
        raise InvalidParams("sigma must be finite and positive")
    c = np.asarray(c, dtype=np.float64)
    return c + rng.normal(0.0, sigma, size=c.shape)


def xor_cpt(parent_count: int) -> Factor:
    """Deterministic CPT over (parents..., child): 1 iff child is the XOR of parents."""
    if parent_count < 1:
        raise InvalidParams("parity bits need at least one parent")
    shape = (2,) * (parent_count + 1)
    idx = np.indices(shape).sum(axis=0) % 2
    return Factor(tuple(range(parent_count + 1)), (idx == 0).astype(np.float64))


@functools.lru_cache(maxsize=64)
def code_network(g: GeneratorMatrix) -> BeliefNetwork:
    """Belief network of the channel-input layers: uniform u, XOR parities."""
    variables = [Variable(i, 2, "information-bit") for i in range(g.K)]
    variables += [Variable(j, 2, "parity-bit") for j in range(g.K, g.N)]
    parents: list[tuple[int, ...]] = [()] * g.K
    tables = [np.array([0.5, 0.5])] * g.K
    for pa in g.parity_parents():
        parents.append(pa)
        tables.append(xor_cpt(len(pa)).values)
    return build_network(variables, parents, tables)


def log_likelihoods(y, sigma: float) -> np.ndarray:
    """Unnormalized Gaussian log densities, shape (N, 2): log N(y_j; c, sigma) + const."""
    y = np.asarray(y, dtype=np.float64)
    return -np.stack([y ** 2, (y - 1.0) ** 2], axis=-1) / (2.0 * sigma ** 2)


def build_decoding_instance(g: GeneratorMatrix, y, sigma: float) -> tuple[BeliefNetwork, Evidence]:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (g.N,):
        raise LengthMismatch(f"expected {g.N} channel outputs, got {y.shape}")
    if not sigma > 0:
        raise InvalidParams("sigma must be positive")
    lik = np.exp(log_likelihoods(y, sigma))
    factors = tuple(Factor((j,), lik[j]) for j in range(g.N))
    return code_network(g), Evidence({}, factors)


def natural_ordering(g: GeneratorMatrix) -> Ordering:
    """Information bits then parity bits, each in index order."""
    return Ordering.along(moral_graph(code_network(g)), range(g.N))


def dumps_generator(g: GeneratorMatrix) -> str:
    lines = [f"{g.K} {g.N}"]
    lines += [" ".join(map(str, row)) for row in g.bits]
    return "\n".join(lines) + "\n"


def loads_generator(text: str) -> GeneratorMatrix:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InvalidParams("empty generator file")
    k, n = int(rows[0][0]), int(rows[0][1])
    body = [[int(b) for b in r] for r in rows[1:]]
    if len(body) != k or any(len(r) != n for r in body):
        raise LengthMismatch(f"header says {k}x{n}, body disagrees")
    return code_from_generator(body)
