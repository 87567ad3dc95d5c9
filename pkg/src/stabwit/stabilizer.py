"""Stabilizer generator families for GHZ, cluster and graph states."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import CapExceededError, get_limits
from .pauli import PauliString, commutes, multiply

__all__ = [
    "GeneratorSet",
    "GraphSpec",
    "ValidationReport",
    "ghz_generators",
    "cluster_generators",
    "graph_generators",
    "group_elements",
    "validate",
    "gf2_rank",
]


@dataclass(frozen=True)
class GeneratorSet:
    n_qubits: int
    generators: tuple[PauliString, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.n != self.n_qubits:
                raise ValueError("generator length does not match n_qubits")
            if not g.is_hermitian:
                raise ValueError("generators must have phase ±1")

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "GeneratorSet":
        from .pauli import parse_pauli

        gens = [parse_pauli(t) for t in labels]
        return cls(gens[0].n, tuple(gens))

    def __len__(self) -> int:
        return len(self.generators)

    def __getitem__(self, k: int) -> PauliString:
        return self.generators[k]

    def __iter__(self):
        return iter(self.generators)

    def with_signs(self, signs: Sequence[int]) -> "GeneratorSet":
        """Same generators with each one multiplied by ±1."""
        gens = [g if s > 0 else -g for g, s in zip(self.generators, signs, strict=True)]
        return GeneratorSet(self.n_qubits, tuple(gens))

    @property
    def labels(self) -> list[str]:
        return [str(g) for g in self.generators]


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph given by a symmetric 0/1 adjacency matrix."""

    n_qubits: int
    adjacency: np.ndarray = field(repr=False)

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=np.int8)
        if adj.shape != (self.n_qubits, self.n_qubits):
            raise GraphError(f"adjacency shape {adj.shape} for {self.n_qubits} vertices")
        if not np.isin(adj, (0, 1)).all():
            raise GraphError("adjacency entries must be 0 or 1")
        if not (adj == adj.T).all():
            raise GraphError("adjacency matrix is not symmetric")
        if np.diag(adj).any():
            raise GraphError("adjacency matrix has a nonzero diagonal")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    def __eq__(self, other):
        return (
            isinstance(other, GraphSpec)
            and self.n_qubits == other.n_qubits
            and bool((self.adjacency == other.adjacency).all())
        )

    def __hash__(self):
        return hash((self.n_qubits, self.adjacency.tobytes()))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "GraphSpec":
        adj = np.zeros((n, n), dtype=np.int8)
        for edge in edges:
            i, j = (int(v) for v in edge)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge {(i, j)} out of range for {n} vertices")
            if i == j:
                raise GraphError(f"self edge at vertex {i}")
            if adj[i, j]:
                raise GraphError(f"duplicate edge {(i, j)}")
            adj[i, j] = adj[j, i] = 1
        return cls(n, adj)

    @classmethod
    def path(cls, n: int) -> "GraphSpec":
        return cls.from_edges(n, [(k, k + 1) for k in range(n - 1)])

    @classmethod
    def ring(cls, n: int) -> "GraphSpec":
        if n < 3:
            raise GraphError("a ring needs at least 3 vertices")
        return cls.from_edges(n, [(k, (k + 1) % n) for k in range(n)])

    @classmethod
    def star(cls, n: int, center: int = 0) -> "GraphSpec":
        return cls.from_edges(n, [(center, k) for k in range(n) if k != center])

    @classmethod
    def complete(cls, n: int) -> "GraphSpec":
        return cls.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def from_json(cls, data: dict) -> "GraphSpec":
        if set(data) - {"n", "edges"} or "n" not in data:
            raise GraphError('graph JSON must look like {"n": int, "edges": [[i, j], ...]}')
        return cls.from_edges(int(data["n"]), data.get("edges", []))

    @classmethod
    def load(cls, path: str | Path) -> "GraphSpec":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return {"n": self.n_qubits, "edges": [list(e) for e in self.edges]}

    @property
    def edges(self) -> list[tuple[int, int]]:
        n = self.n_qubits
        return [(i, j) for i in range(n) for j in range(i + 1, n) if self.adjacency[i, j]]

    def neighbors(self, k: int) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.adjacency[k])]

    def is_connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n_qubits


def ghz_generators(n: int) -> GeneratorSet:
    """X on every site, then Z_{k-1} Z_k for k = 2..n."""
    if n < 2:
        raise ValueError("GHZ generators need n >= 2")
    gens = [PauliString(n, (1 << n) - 1, 0)]
    gens += [PauliString(n, 0, 0b11 << (k - 1)) for k in range(1, n)]
    return GeneratorSet(n, tuple(gens))


def cluster_generators(n: int) -> GeneratorSet:
    """Z_{k-1} X_k Z_{k+1} chain, truncated at both ends."""
    if n < 2:
        raise ValueError("cluster generators need n >= 2")
    return graph_generators(GraphSpec.path(n))


def graph_generators(g: GraphSpec) -> GeneratorSet:
    n = g.n_qubits
    gens = []
    for k in range(n):
        zmask = 0
        for m in g.neighbors(k):
            zmask |= 1 << m
        gens.append(PauliString(n, 1 << k, zmask))
    return GeneratorSet(n, tuple(gens))


def group_elements(gs: GeneratorSet) -> list[PauliString]:
    """All subset products, in subset-bitmask order, deduplicated."""
    m = len(gs)
    if m > get_limits().group_cap:
        raise CapExceededError(f"{m} generators exceeds group cap {get_limits().group_cap}")
    out: list[PauliString] = []
    seen: set[tuple[int, int, int]] = set()
    products = [PauliString.identity(gs.n_qubits)] * (1 << m)
    for mask in range(1, 1 << m):
        # factors multiplied in increasing generator index
        high = mask.bit_length() - 1
        products[mask] = multiply(products[mask ^ (1 << high)], gs[high])
    for p in products:
        key = (p.x, p.z, p.phase)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of integer-encoded bit vectors."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def symplectic_vector(s: PauliString) -> int:
    return s.x | (s.z << s.n)


@dataclass(frozen=True)
class ValidationReport:
    anticommuting_pairs: tuple[tuple[int, int], ...]
    rank: int
    n_generators: int
    n_qubits: int

    @property
    def commuting(self) -> bool:
        return not self.anticommuting_pairs

    @property
    def independent(self) -> bool:
        return self.rank == self.n_generators

    @property
    def valid(self) -> bool:
        return self.commuting and self.independent

    @property
    def complete(self) -> bool:
        """Valid and large enough to fix a unique state."""
        return self.valid and self.n_generators == self.n_qubits

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "complete": self.complete,
            "anticommuting_pairs": [list(p) for p in self.anticommuting_pairs],
            "rank": self.rank,
            "n_generators": self.n_generators,
        }


def validate(gs: GeneratorSet) -> ValidationReport:
    gens = gs.generators
    bad = tuple(
        (i, j)
        for i in range(len(gens))
        for j in range(i + 1, len(gens))
        if not commutes(gens[i], gens[j])
    )
    rank = gf2_rank(symplectic_vector(g) for g in gens)
    return ValidationReport(bad, rank, len(gens), gs.n_qubits)
