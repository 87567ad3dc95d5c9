"""Necessary conditions for full separability and a product-state optimizer.

The optimizer maximizes ⟨φ_1 ⊗ … ⊗ φ_B|O|φ_1 ⊗ … ⊗ φ_B⟩ over pure states
of a fixed block partition.  With one site per block it searches fully
product states; with two blocks it searches states that are product
across one cut, i.e. the extremal biseparable states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import CapExceededError
from .pauli import ObservableSum, PauliString, observable_to_dense
from .stabilizer import GraphSpec, cluster_generators, ghz_generators, graph_generators
from .states import DensityMatrix, StateVector, bipartitions, pauli_expectation

__all__ = [
    "ConditionReport",
    "OptimizerConfig",
    "ProductOptimum",
    "check_ghz",
    "check_cluster",
    "check_graph",
    "product_state_max",
    "biseparable_min",
    "random_bloch_vectors",
    "product_expectations",
    "pair_observable",
    "bloch_to_state",
]

BOUND = 1.0
PRODUCT_CAP = 8


@dataclass(frozen=True)
class ConditionReport:
    lhs: float
    pair: tuple[int, int]
    bound: float = BOUND

    @property
    def violated(self) -> bool:
        return self.lhs > self.bound + 1e-12

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "bound": self.bound, "violated": self.violated, "pair": list(self.pair)}


State = StateVector | DensityMatrix


def _pair_report(state: State, a: PauliString, b: PauliString, pair: tuple[int, int]) -> ConditionReport:
    return ConditionReport(pauli_expectation(a, state) + pauli_expectation(b, state), pair)


def check_ghz(state: State, m: int) -> ConditionReport:
    """⟨S_1⟩ + ⟨S_m⟩ ≤ 1 for the GHZ generators, m = 2..N (1-based)."""
    n = state.n_qubits
    if not 2 <= m <= n:
        raise ValueError(f"m must be in 2..{n}")
    gs = ghz_generators(n)
    return _pair_report(state, gs[0], gs[m - 1], (1, m))


def check_cluster(state: State, k: int) -> ConditionReport:
    """⟨S_k⟩ + ⟨S_{k+1}⟩ ≤ 1 for the cluster generators, k = 1..N-1 (1-based)."""
    n = state.n_qubits
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in 1..{n - 1}")
    gs = cluster_generators(n)
    return _pair_report(state, gs[k - 1], gs[k], (k, k + 1))


def check_graph(state: State, g: GraphSpec, k: int, m: int) -> ConditionReport:
    """Same bound for the generators of two neighbouring vertices (0-based)."""
    if g.n_qubits != state.n_qubits:
        raise ValueError("graph and state sizes differ")
    if not g.adjacency[k, m]:
        raise ValueError(f"vertices {k} and {m} are not neighbours")
    gs = graph_generators(g)
    return _pair_report(state, gs[k], gs[m], (k, m))


def pair_observable(a: PauliString, b: PauliString) -> ObservableSum:
    return ObservableSum.from_terms(a.n, [(1.0, a), (1.0, b)])


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 50
    tol: float = 1e-10
    max_sweeps: int = 500
    seed: int = 0


@dataclass(frozen=True)
class ProductOptimum:
    value: float
    blocks: tuple[tuple[int, ...], ...]
    block_states: tuple[np.ndarray, ...] = field(repr=False)
    history: tuple[float, ...] = field(default=(), repr=False)

    def state(self) -> StateVector:
        n = sum(len(b) for b in self.blocks)
        order = [k for b in self.blocks for k in b]
        t = np.ones(1, dtype=complex)
        for v in self.block_states:
            t = np.kron(t, v)
        t = t.reshape((2,) * n).transpose(np.argsort(order))
        return StateVector(t.reshape(-1), n)


def _as_matrix(o) -> tuple[np.ndarray, int]:
    if isinstance(o, ObservableSum):
        return observable_to_dense(o), o.n_qubits
    if hasattr(o, "to_dense"):
        return o.to_dense(), o.n_qubits
    m = np.asarray(o, dtype=complex)
    return m, int(round(np.log2(m.shape[0])))


def _tensor_over(blocks, states, sites) -> np.ndarray:
    """Product of the given block states as a flat vector over ``sites`` (ascending)."""
    order = [k for b in blocks for k in b]
    t = np.ones(1, dtype=complex)
    for v in states:
        t = np.kron(t, v)
    if len(order) > 1:
        pos = {k: i for i, k in enumerate(order)}
        t = t.reshape((2,) * len(order)).transpose([pos[k] for k in sites])
    return t.reshape(-1)


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def product_state_max(
    o,
    n: int | None = None,
    config: OptimizerConfig = OptimizerConfig(),
    blocks: Sequence[Sequence[int]] | None = None,
) -> ProductOptimum:
    """Multi-start alternating maximization over block-product pure states.

    Each update replaces one block by the top eigenvector of the operator
    obtained by contracting the others, so the objective never decreases.
    """
    matrix, n_op = _as_matrix(o)
    n = n_op if n is None else n
    if n != n_op:
        raise ValueError("qubit count mismatch")
    if n > PRODUCT_CAP:
        raise CapExceededError(f"product optimizer limited to {PRODUCT_CAP} qubits")
    if blocks is None:
        blocks = [(k,) for k in range(n)]
    blocks = tuple(tuple(sorted(b)) for b in blocks)
    if sorted(k for b in blocks for k in b) != list(range(n)):
        raise ValueError("blocks must partition the sites")

    full = matrix.reshape((2,) * (2 * n))
    reduced = []
    for i, b in enumerate(blocks):
        rest = [k for k in range(n) if k not in b]
        perm = list(b) + rest
        op = full.transpose(perm + [n + k for k in perm])
        db, dr = 1 << len(b), 1 << len(rest)
        others = [blk for j, blk in enumerate(blocks) if j != i]
        reduced.append((op.reshape(db, dr, db, dr), rest, others))

    rng = np.random.default_rng(config.seed)
    best: ProductOptimum | None = None
    for _ in range(config.starts):
        states = [_random_unit(rng, 1 << len(b)) for b in blocks]
        history = []
        value = -np.inf
        for _ in range(config.max_sweeps):
            before = value
            for i in range(len(blocks)):
                op4, rest, others = reduced[i]
                if rest:
                    phi = _tensor_over(others, [states[j] for j in range(len(blocks)) if j != i], rest)
                    eff = np.einsum("arbs,r,s->ab", op4, phi.conj(), phi)
                else:
                    eff = op4[:, 0, :, 0]
                evals, evecs = np.linalg.eigh(0.5 * (eff + eff.conj().T))
                states[i] = evecs[:, -1]
                value = float(evals[-1])
                history.append(value)
            if value - before <= config.tol:
                break
        if best is None or value > best.value:
            best = ProductOptimum(value, blocks, tuple(states), tuple(history))
    return best


def biseparable_min(w, n: int | None = None, config: OptimizerConfig = OptimizerConfig()) -> tuple[float, tuple[int, ...]]:
    """Smallest ⟨W⟩ found over states that are product across some cut."""
    matrix, n_op = _as_matrix(w)
    n = n_op if n is None else n
    best, arg = np.inf, ()
    for part in bipartitions(n):
        rest = tuple(k for k in range(n) if k not in part)
        opt = product_state_max(-matrix, n, config, blocks=[part, rest])
        if -opt.value < best:
            best, arg = -opt.value, part
    return float(best), arg


def random_bloch_vectors(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vectors, shape (count, n, 3): (⟨X⟩, ⟨Y⟩, ⟨Z⟩) per site."""
    v = rng.normal(size=(count, n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


_COMPONENT = {"X": 0, "Y": 1, "Z": 2}


def product_expectations(o: ObservableSum, bloch: np.ndarray) -> np.ndarray:
    """⟨O⟩ on pure product states given by their Bloch vectors."""
    out = np.full(bloch.shape[0], o.identity_coeff)
    for c, s in o.terms:
        value = np.ones(bloch.shape[0])
        for k, op in enumerate(s.ops):
            if op.name != "I":
                value = value * bloch[:, k, _COMPONENT[op.name]]
        out += c * value
    return out


def bloch_to_state(bloch_sites: np.ndarray) -> StateVector:
    """Pure product state from per-site Bloch vectors."""
    amps = np.ones(1, dtype=complex)
    for x, y, z in bloch_sites:
        theta = np.arccos(np.clip(z, -1, 1))
        phi = np.arctan2(y, x)
        amps = np.kron(amps, [np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    return StateVector(amps, len(bloch_sites))
