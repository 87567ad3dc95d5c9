"""Dense pure states and density matrices for small registers.

Site ``k`` is the ``k``-th tensor factor, i.e. bit ``n - 1 - k`` of a
computational-basis index, matching :mod:`stabwit.pauli`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import check_dense, check_vector
from .pauli import ObservableSum, PauliString, apply, row_action
from .stabilizer import GeneratorSet, GraphSpec, graph_generators, validate

__all__ = [
    "StateVector",
    "DensityMatrix",
    "DenseOperator",
    "StabilizerError",
    "BiseparableGraphError",
    "ghz_state",
    "stabilizer_state",
    "graph_state",
    "cluster_state",
    "ising_chain_evolution",
    "local_correction",
    "noisy_mixture",
    "maximally_mixed",
    "product_state",
    "expectation",
    "pauli_expectation",
    "schmidt_coefficients",
    "schmidt_max",
    "bipartitions",
    "max_schmidt_over_bipartitions",
    "ghz_basis",
    "stabilizer_basis",
]

NORM_TOL = 1e-12


class StabilizerError(ValueError):
    pass


class BiseparableGraphError(ValueError):
    """Disconnected graphs give states that are biseparable by construction."""


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray = field(repr=False)
    n_qubits: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex] | np.ndarray) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(round(np.log2(amps.size)))
        return cls(amps / np.linalg.norm(amps), n)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2

    def projector(self) -> np.ndarray:
        check_dense(self.n_qubits)
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace matrix.  PSD is checked by :meth:`is_psd` on demand."""

    matrix: np.ndarray = field(repr=False)
    n_qubits: int

    def __post_init__(self):
        check_dense(self.n_qubits)
        m = np.asarray(self.matrix, dtype=complex)
        dim = 1 << self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {m.shape}")
        if np.abs(m - m.conj().T).max() > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > NORM_TOL:
            raise ValueError("density matrix trace differs from 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        return cls(psi.projector(), psi.n_qubits)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_psd(self, tol: float = 1e-10) -> bool:
        return bool(self.eigenvalues().min() >= -tol)


@dataclass(frozen=True)
class DenseOperator:
    matrix: np.ndarray = field(repr=False)
    hermitian: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if self.hermitian and np.abs(m - m.conj().T).max() > NORM_TOL:
            raise ValueError("operator flagged Hermitian is not")
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return int(round(np.log2(self.matrix.shape[0])))


def _fix_global_phase(amps: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(amps) > 1e-9)
    first = amps[nz[0]]
    return amps * (abs(first) / first)


def ghz_state(n: int) -> StateVector:
    if n < 2:
        raise ValueError("GHZ state needs at least 2 qubits")
    check_vector(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return StateVector(amps, n)


def _project(gens: Iterable[PauliString], v: np.ndarray) -> np.ndarray:
    for g in gens:
        v = 0.5 * (v + apply(g, v))
    return v


def stabilizer_state(gs: GeneratorSet) -> StateVector:
    """Unique common +1 eigenvector of the generators."""
    n = gs.n_qubits
    check_vector(n)
    report = validate(gs)
    if not report.commuting:
        raise StabilizerError(f"generators do not commute: {report.anticommuting_pairs}")
    if not report.independent:
        raise StabilizerError("generators are not independent")
    if len(gs) != n:
        # the joint +1 eigenspace has dimension 2**(n - len(gs))
        raise StabilizerError(f"projector rank is {1 << (n - len(gs))}, not 1")
    rng = np.random.default_rng(20040101)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    v = _project(gs, v)
    v /= np.linalg.norm(v)
    # second pass removes cancellation error from the first projection
    v = _project(gs, v)
    v /= np.linalg.norm(v)
    return StateVector(_fix_global_phase(v), n)


def projector_trace(gs: GeneratorSet) -> float:
    """Trace of Π_k (1 + S_k)/2, computed densely."""
    from .pauli import to_dense

    dim = 1 << gs.n_qubits
    proj = np.eye(dim, dtype=complex)
    for g in gs:
        proj = proj @ (0.5 * (np.eye(dim) + to_dense(g)))
    return float(np.trace(proj).real)


def graph_state(g: GraphSpec) -> StateVector:
    if not g.is_connected():
        raise BiseparableGraphError("graph is disconnected; its state is biseparable by construction")
    return stabilizer_state(graph_generators(g))


def cluster_state(n: int) -> StateVector:
    return graph_state(GraphSpec.path(n))


def ising_chain_evolution(n: int) -> StateVector:
    """Nearest-neighbour Ising phases applied to |1⟩_x^{⊗n}, |1⟩_x = (|0⟩ - |1⟩)/√2."""
    check_vector(n)
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    zvals = 1 - 2 * bits
    amps = np.prod(1 - 2 * bits, axis=1) / np.sqrt(2) ** n
    exponent = ((1 - zvals[:, :-1]) * (1 - zvals[:, 1:])).sum(axis=1) if n > 1 else np.zeros(idx.size)
    amps = amps * np.exp(1j * np.pi / 4 * exponent)
    return StateVector(amps, n)


@dataclass(frozen=True)
class CorrectionReport:
    signs: tuple[int, ...]
    correction: PauliString
    fidelity_after: float

    @property
    def matches(self) -> bool:
        return abs(self.fidelity_after - 1) < 1e-10

    def to_json(self) -> dict:
        return {
            "signs": list(self.signs),
            "correction": str(self.correction),
            "fidelity_after": self.fidelity_after,
        }


def _solve_gf2(rows: list[int], rhs: list[int], n_vars: int) -> int | None:
    """One solution of A v = b over GF(2), free variables set to zero."""
    pivots: list[tuple[int, int, int]] = []
    for row, b in zip(rows, rhs):
        for col, prow, pb in pivots:
            if (row >> col) & 1:
                row ^= prow
                b ^= pb
        if row == 0:
            if b:
                return None
            continue
        col = (row & -row).bit_length() - 1
        # keep earlier pivots reduced
        pivots = [
            (c, pr ^ row, pbb ^ b) if (pr >> col) & 1 else (c, pr, pbb) for c, pr, pbb in pivots
        ]
        pivots.append((col, row, b))
    sol = 0
    for col, _, b in pivots:
        if b:
            sol |= 1 << col
    return sol


def local_correction(psi: StateVector, gs: GeneratorSet) -> CorrectionReport:
    """Pauli C with C|psi⟩ equal to the canonical stabilizer state up to phase.

    ``psi`` must be stabilized by ±S_k; the signs are read off and C is
    chosen to anticommute exactly with the generators whose sign is -1,
    preferring Z-type corrections.
    """
    n = gs.n_qubits
    signs = []
    for g in gs:
        value = pauli_expectation(g, psi)
        if abs(abs(value) - 1) > 1e-9:
            raise StabilizerError(f"state is not an eigenstate of {g} (⟨g⟩ = {value})")
        signs.append(1 if value > 0 else -1)
    # unknown vector: cz bits in 0..n-1, cx bits in n..2n-1; symplectic form x·cz + z·cx
    rows = [g.x | (g.z << n) for g in gs]
    rhs = [0 if s > 0 else 1 for s in signs]
    sol = _solve_gf2(rows, rhs, 2 * n)
    if sol is None:
        raise StabilizerError("no Pauli correction exists")
    correction = PauliString(n, sol >> n, sol & ((1 << n) - 1))
    corrected = StateVector(apply(correction, psi.amplitudes), n)
    canonical = stabilizer_state(gs)
    return CorrectionReport(tuple(signs), correction, canonical.fidelity(corrected))


def maximally_mixed(n: int) -> DensityMatrix:
    check_dense(n)
    dim = 1 << n
    return DensityMatrix(np.eye(dim, dtype=complex) / dim, n)


def noisy_mixture(psi: StateVector, p: float) -> DensityMatrix:
    """``p·1/2^N + (1 - p)|psi⟩⟨psi|``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise fraction {p} outside [0, 1]")
    n = psi.n_qubits
    check_dense(n)
    dim = 1 << n
    m = (1 - p) * psi.projector()
    m[np.diag_indices(dim)] += p / dim
    return DensityMatrix(m, n)


def product_state(site_states: Sequence[Sequence[complex]]) -> StateVector:
    amps = np.ones(1, dtype=complex)
    for v in site_states:
        v = np.asarray(v, dtype=complex)
        amps = np.kron(amps, v / np.linalg.norm(v))
    return StateVector(amps, len(site_states))


State = StateVector | DensityMatrix


def pauli_expectation(s: PauliString, state: State) -> float:
    if s.n != state.n_qubits:
        raise ValueError(f"{s.n}-qubit operator on a {state.n_qubits}-qubit state")
    cols, values = row_action(s)
    if isinstance(state, StateVector):
        a = state.amplitudes
        value = np.sum(a.conj() * values * a[cols])
    else:
        rows = np.arange(cols.size)
        value = np.sum(values * state.matrix[cols, rows])
    if abs(value.imag) > 1e-10:
        raise ValueError(f"non-real expectation {value} for {s}")
    return float(value.real)


def expectation(o: ObservableSum, state: State) -> float:
    """⟨O⟩ evaluated term by term."""
    if o.n_qubits != state.n_qubits:
        raise ValueError(f"{o.n_qubits}-qubit observable on a {state.n_qubits}-qubit state")
    total = o.identity_coeff
    for c, s in o.terms:
        total += c * pauli_expectation(s, state)
    return float(total)


def schmidt_coefficients(psi: StateVector, partition: Iterable[int]) -> np.ndarray:
    n = psi.n_qubits
    part = sorted(set(int(k) for k in partition))
    if not part or len(part) == n:
        raise ValueError("bipartition must be nonempty and proper")
    if part[0] < 0 or part[-1] >= n:
        raise ValueError("site index out of range")
    rest = [k for k in range(n) if k not in part]
    tensor = psi.amplitudes.reshape((2,) * n).transpose(part + rest)
    return np.linalg.svd(tensor.reshape(1 << len(part), -1), compute_uv=False)


def schmidt_max(psi: StateVector, partition: Iterable[int]) -> float:
    return float(schmidt_coefficients(psi, partition)[0])


def bipartitions(n: int) -> list[tuple[int, ...]]:
    """Proper subsets containing site 0; each cut appears once."""
    out = []
    for r in range(0, n - 1):
        for rest in itertools.combinations(range(1, n), r):
            out.append((0, *rest))
    return out


def max_schmidt_over_bipartitions(psi: StateVector) -> tuple[float, tuple[int, ...]]:
    best, arg = -1.0, ()
    for part in bipartitions(psi.n_qubits):
        value = schmidt_max(psi, part)
        if value > best:
            best, arg = value, part
    return best, arg


def sign_pattern(index: int, n: int) -> tuple[int, ...]:
    """Signs for pattern ``index``; generator 1 is the most significant bit."""
    return tuple(-1 if (index >> (n - 1 - k)) & 1 else 1 for k in range(n))


def ghz_basis(n: int) -> list[StateVector]:
    """Joint eigenbasis of the GHZ generators, ordered by sign pattern."""
    check_vector(n)
    dim = 1 << n
    out = []
    for b in range(dim):
        signs = sign_pattern(b, n)
        # Z_{k-1} Z_k = s_k fixes relative bit values; site 0 starts at 0.
        j, bit = 0, 0
        for k in range(1, n):
            if signs[k] < 0:
                bit ^= 1
            j |= bit << (n - 1 - k)
        amps = np.zeros(dim, dtype=complex)
        amps[j] = 1 / np.sqrt(2)
        amps[(dim - 1) ^ j] = signs[0] / np.sqrt(2)
        out.append(StateVector(amps, n))
    return out


def stabilizer_basis(gs: GeneratorSet) -> list[StateVector]:
    n = gs.n_qubits
    return [stabilizer_state(gs.with_signs(sign_pattern(b, n))) for b in range(1 << n)]


def basis_matrix(basis: Sequence[StateVector]) -> np.ndarray:
    return np.column_stack([v.amplitudes for v in basis])
