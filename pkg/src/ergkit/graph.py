"""Simple-graph state on bit-vector rows with incremental edge/triangle counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .landscape import ModelParams, _as_params

WORD = 64


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def common_neighbors_kernel(rows, a, b):
    total = 0
    for w in range(rows.shape[1]):
        total += popcount64(rows[a, w] & rows[b, w])
    return np.int64(total)


@njit(cache=True)
def has_edge_kernel(rows, a, b):
    return (rows[a, b >> 6] >> np.uint64(b & 63)) & np.uint64(1) != 0


@njit(cache=True)
def set_edge_kernel(rows, a, b, present):
    """Set the edge to ``present``; returns ``(edge_delta, triangle_delta)``."""
    cur = has_edge_kernel(rows, a, b)
    if cur == present:
        return 0, 0
    cn = common_neighbors_kernel(rows, a, b)
    ba = np.uint64(1) << np.uint64(b & 63)
    ab = np.uint64(1) << np.uint64(a & 63)
    if present:
        rows[a, b >> 6] |= ba
        rows[b, a >> 6] |= ab
        return 1, cn
    rows[a, b >> 6] &= ~ba
    rows[b, a >> 6] &= ~ab
    return -1, -cn


class SubgraphKind(Enum):
    EDGE = "edge"
    WEDGE = "wedge"
    TRIANGLE = "triangle"


@dataclass(frozen=True)
class Clique:
    ell: int

    def __post_init__(self):
        if not 3 <= self.ell <= 5:
            raise ValueError("clique size must be in 3..5")


class AdjacencyState:
    """Symmetric zero-diagonal adjacency on ``n`` vertices.

    ``rows`` is an ``(n, ceil(n/64))`` uint64 array; bit ``b`` of row ``a``
    is the edge ``{a, b}``. ``edge_count`` and ``triangle_count`` are kept
    exact under :meth:`flip_edge` and :meth:`set_edge`.
    """

    def __init__(self, n: int, rows=None):
        if n < 3:
            raise ValueError("need at least 3 vertices")
        self.n = int(n)
        words = -(-self.n // WORD)
        if rows is None:
            rows = np.zeros((self.n, words), dtype=np.uint64)
        self.rows = rows
        self.edge_count, self.triangle_count = self.recount()

    # construction helpers
    @classmethod
    def from_dense(cls, adj) -> AdjacencyState:
        adj = np.asarray(adj)
        n = adj.shape[0]
        if adj.shape != (n, n) or np.any(adj != adj.T) or np.any(np.diag(adj)):
            raise ValueError("adjacency must be square, symmetric, zero-diagonal")
        words = -(-n // WORD)
        padded = np.zeros((n, words * WORD), dtype=np.uint8)
        padded[:, :n] = adj != 0
        bits = np.packbits(padded, axis=1, bitorder="little")
        rows = bits.view(np.uint64).reshape(n, words).copy()
        return cls(n, rows)

    @classmethod
    def from_edges(cls, n: int, edges) -> AdjacencyState:
        adj = np.zeros((n, n), dtype=np.uint8)
        for a, b in edges:
            if a == b:
                raise ValueError("self-loops are not allowed")
            adj[a, b] = adj[b, a] = 1
        return cls.from_dense(adj)

    def to_dense(self) -> np.ndarray:
        bits = np.unpackbits(self.rows.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.n].astype(np.int64)

    def copy(self) -> AdjacencyState:
        new = object.__new__(AdjacencyState)
        new.n = self.n
        new.rows = self.rows.copy()
        new.edge_count = self.edge_count
        new.triangle_count = self.triangle_count
        return new

    def recount(self) -> tuple[int, int]:
        """Full recount ``(E, trace(A^3) / 6)`` from the bit rows."""
        a = self.to_dense()
        if np.any(a != a.T) or np.any(np.diag(a)):
            raise ValueError("inconsistent adjacency rows")
        e = int(a.sum()) // 2
        t = int(np.einsum("ij,jk,ki->", a, a, a)) // 6
        return e, t

    def is_consistent(self) -> bool:
        return self.recount() == (self.edge_count, self.triangle_count)

    def _check_pair(self, a, b):
        if a == b:
            raise ValueError("vertices of a pair must differ")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise IndexError("vertex out of range")

    # queries
    def has_edge(self, a: int, b: int) -> bool:
        self._check_pair(a, b)
        return bool(has_edge_kernel(self.rows, a, b))

    def common_neighbor_count(self, a: int, b: int) -> int:
        self._check_pair(a, b)
        return int(common_neighbors_kernel(self.rows, a, b))

    def degrees(self) -> np.ndarray:
        return self.to_dense().sum(axis=1)

    def edges(self):
        a = self.to_dense()
        i, j = np.nonzero(np.triu(a, 1))
        return list(zip(i.tolist(), j.tolist()))

    # updates
    def set_edge(self, a: int, b: int, present: bool) -> tuple[int, int]:
        self._check_pair(a, b)
        de, dt = set_edge_kernel(self.rows, a, b, bool(present))
        self.edge_count += int(de)
        self.triangle_count += int(dt)
        return int(de), int(dt)

    def flip_edge(self, a: int, b: int) -> tuple[int, int]:
        """Toggle ``{a, b}``; returns ``(edge_delta, triangle_delta)``."""
        return self.set_edge(a, b, not self.has_edge(a, b))

    def __eq__(self, other):
        return (isinstance(other, AdjacencyState) and self.n == other.n
                and np.array_equal(self.rows, other.rows)
                and self.edge_count == other.edge_count
                and self.triangle_count == other.triangle_count)

    def __repr__(self):
        return f"AdjacencyState(n={self.n}, edges={self.edge_count}, triangles={self.triangle_count})"

    # edge-list text format: "n\nu v\n..." with 0-indexed vertices
    def to_edgelist(self) -> str:
        lines = [str(self.n)] + [f"{a} {b}" for a, b in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> AdjacencyState:
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        n = int(lines[0][0])
        return cls.from_edges(n, [(int(a), int(b)) for a, b in lines[1:]])


def new_state(n: int, init="empty", p: float = 0.5, seed=None) -> AdjacencyState:
    """Fresh state: ``init`` is ``"empty"``, ``"complete"`` or ``"bernoulli"``."""
    if n < 3:
        raise ValueError("need at least 3 vertices")
    if init == "empty":
        return AdjacencyState(n)
    if init == "complete":
        return AdjacencyState.from_dense(1 - np.eye(n, dtype=np.uint8))
    if init == "bernoulli":
        rng = np.random.default_rng(seed)
        upper = np.triu(rng.random((n, n)) < p, 1)
        return AdjacencyState.from_dense((upper | upper.T).astype(np.uint8))
    raise ValueError(f"unknown init {init!r}")


def _count_cliques(adj: np.ndarray, ell: int) -> int:
    n = adj.shape[0]
    nbrs = [0] * n
    for v in range(n):
        for u in np.flatnonzero(adj[v]):
            nbrs[v] |= 1 << int(u)

    def extend(cand: int, depth: int) -> int:
        if depth == ell:
            return 1
        total = 0
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            # only higher-numbered vertices, so each clique is counted once
            total += extend(cand & nbrs[v], depth + 1)
        return total

    return extend((1 << n) - 1, 0)


def hom_density(kind, state: AdjacencyState) -> float:
    """Homomorphism density ``|hom(H, G)| / n^{|V(H)|}``.

    Wedge homomorphisms are all adjacency-preserving maps of the 3-vertex
    path (the two leaves may land on the same vertex), i.e. ``sum_v deg(v)^2``.
    """
    n = state.n
    if kind is SubgraphKind.EDGE:
        return 2.0 * state.edge_count / n**2
    if kind is SubgraphKind.TRIANGLE or kind == Clique(3):
        return 6.0 * state.triangle_count / n**3
    if kind is SubgraphKind.WEDGE:
        deg = state.degrees()
        return float(np.sum(deg * deg)) / n**3
    if isinstance(kind, Clique):
        count = _count_cliques(state.to_dense(), kind.ell)
        return math.factorial(kind.ell) * count / n**kind.ell
    raise TypeError(f"unsupported subgraph kind {kind!r}")


def hamiltonian_et(p, state: AdjacencyState) -> float:
    """Edge-triangle Hamiltonian ``(alpha/n) T + h E``."""
    p = _as_params(p)
    return p.alpha / state.n * state.triangle_count + p.h * state.edge_count


def hamiltonian_mf(p, state: AdjacencyState) -> float:
    """Mean-field Hamiltonian ``4 alpha E^3 / (3 n^4) + h E``."""
    p = _as_params(p)
    e = state.edge_count
    return 4.0 * p.alpha * e**3 / (3.0 * state.n**4) + p.h * e


__all__ = [
    "AdjacencyState", "Clique", "ModelParams", "SubgraphKind",
    "common_neighbors_kernel", "hamiltonian_et", "hamiltonian_mf", "hom_density",
    "new_state", "set_edge_kernel",
]
