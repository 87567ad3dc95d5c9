"""Stabilizer witnesses, their noise thresholds, and finer-than checks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .config import CapExceededError, check_dense, get_limits
from .pauli import ObservableSum, PauliString, observable_to_dense, parse_pauli
from .stabilizer import GeneratorSet, GraphSpec, cluster_generators, ghz_generators, graph_generators
from . import states as st

__all__ = [
    "Family",
    "WitnessSpec",
    "ProjectorWitness",
    "ThresholdResult",
    "PSDReport",
    "build",
    "evaluate",
    "noise_threshold",
    "closed_form_threshold",
    "finer_than_check",
    "finer_than_for",
    "projector_witness",
    "target_state",
    "target_generators",
    "witness_to_dense",
]


class Family(enum.Enum):
    GHZ = "ghz"
    GHZ_PRIME = "ghz-prime"
    GHZ3_EXPANDED = "ghz3"
    MERMIN3 = "mermin3"
    CLUSTER = "cluster"
    CLUSTER_PRIME = "cluster-prime"
    GRAPH = "graph"
    PROJECTOR = "projector"


GHZ_FAMILIES = {Family.GHZ, Family.GHZ_PRIME, Family.GHZ3_EXPANDED, Family.MERMIN3}
CLUSTER_FAMILIES = {Family.CLUSTER, Family.CLUSTER_PRIME}
PROJECTOR_TARGETS = ("ghz", "cluster", "graph")


class WitnessSpecError(ValueError):
    pass


@dataclass(frozen=True)
class WitnessSpec:
    """Which witness to build.

    ``target`` only matters for the projector family: it picks the state
    the projector is built from (``"graph"`` requires ``graph``).
    """

    family: Family
    n_qubits: int
    graph: GraphSpec | None = None
    target: str = "ghz"

    def __post_init__(self):
        fam, n = self.family, self.n_qubits
        if isinstance(fam, str):
            fam = Family(fam)
            object.__setattr__(self, "family", fam)
        if fam in (Family.GHZ3_EXPANDED, Family.MERMIN3) and n != 3:
            raise WitnessSpecError(f"{fam.value} is defined for 3 qubits only")
        if n < 2:
            raise WitnessSpecError("witnesses need at least 2 qubits")
        needs_graph = fam is Family.GRAPH or (fam is Family.PROJECTOR and self.target == "graph")
        if needs_graph:
            if self.graph is None:
                raise WitnessSpecError("graph witness needs a GraphSpec")
            if self.graph.n_qubits != n:
                raise WitnessSpecError("graph size does not match n_qubits")
            if not self.graph.is_connected():
                raise st.BiseparableGraphError("graph is disconnected; no genuine multipartite target")
        if fam is Family.PROJECTOR and self.target not in PROJECTOR_TARGETS:
            raise WitnessSpecError(f"unknown projector target {self.target!r}")

    @classmethod
    def for_graph(cls, graph: GraphSpec) -> "WitnessSpec":
        return cls(Family.GRAPH, graph.n_qubits, graph)


def target_generators(spec: WitnessSpec) -> GeneratorSet:
    fam = spec.family
    if fam in GHZ_FAMILIES or (fam is Family.PROJECTOR and spec.target == "ghz"):
        return ghz_generators(spec.n_qubits)
    if fam in CLUSTER_FAMILIES or (fam is Family.PROJECTOR and spec.target == "cluster"):
        return cluster_generators(spec.n_qubits)
    return graph_generators(spec.graph)


def target_state(spec: WitnessSpec) -> st.StateVector:
    fam = spec.family
    if fam in GHZ_FAMILIES or (fam is Family.PROJECTOR and spec.target == "ghz"):
        return st.ghz_state(spec.n_qubits)
    if fam in CLUSTER_FAMILIES or (fam is Family.PROJECTOR and spec.target == "cluster"):
        return st.cluster_state(spec.n_qubits)
    return st.graph_state(spec.graph)


@dataclass(frozen=True)
class ProjectorWitness:
    """``c̃·1 - |target⟩⟨target|``, kept as a dense-backed (non-Pauli) witness."""

    target: st.StateVector
    c_tilde: float
    cut: tuple[int, ...] = field(default=())

    @property
    def n_qubits(self) -> int:
        return self.target.n_qubits

    @property
    def identity_coeff(self) -> float:
        return self.c_tilde

    @property
    def detecting(self) -> bool:
        """False when c̃ = 1: no state can give a negative value."""
        return self.c_tilde < 1 - 1e-12

    def to_dense(self) -> np.ndarray:
        check_dense(self.n_qubits)
        return self.c_tilde * np.eye(1 << self.n_qubits) - self.target.projector()

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "pauli_expanded": False,
            "identity_coeff": self.c_tilde,
            "projector_coeff": -1.0,
            "cut": list(self.cut),
        }


Witness = ObservableSum | ProjectorWitness


def _half_plus(s: PauliString) -> ObservableSum:
    """(S + 1)/2."""
    return ObservableSum.from_terms(s.n, [(0.5, s)], 0.5)


def _projector_product(gens: list[PauliString], n: int) -> ObservableSum:
    return reduce(lambda acc, s: acc @ _half_plus(s), gens, ObservableSum.identity(n))


def _check_expansion(n: int) -> None:
    cap = get_limits().expansion_cap
    if n > cap:
        raise CapExceededError(f"expanded witness on {n} qubits exceeds cap {cap}")


def _sum_witness(gs: GeneratorSet) -> ObservableSum:
    n = gs.n_qubits
    return ObservableSum.from_terms(n, [(-1.0, g) for g in gs], n - 1)


def build(spec: WitnessSpec) -> Witness:
    fam, n = spec.family, spec.n_qubits
    if fam is Family.GHZ3_EXPANDED:
        terms = [(-1.0, "XXX"), (-0.5, "ZZI"), (-0.5, "IZZ"), (-0.5, "ZIZ")]
        return ObservableSum.from_terms(3, [(c, parse_pauli(t)) for c, t in terms], 1.5)
    if fam is Family.PROJECTOR:
        return projector_witness(target_state(spec))
    gs = target_generators(spec)
    if fam in (Family.GHZ_PRIME, Family.CLUSTER_PRIME, Family.GRAPH):
        return _sum_witness(gs)
    if fam is Family.MERMIN3:
        s1, s2, s3 = gs
        ident = ObservableSum.identity(3)
        factor = ObservableSum.of(s1) @ (ident + ObservableSum.of(s2)) @ (ident + ObservableSum.of(s3))
        return 2.0 - factor
    _check_expansion(n)
    if fam is Family.GHZ:
        first = _half_plus(gs[0])
        second = _projector_product(list(gs)[1:], n)
    else:
        # generator k (1-based) sits at index k - 1
        odd = [g for i, g in enumerate(gs) if i % 2 == 0]
        even = [g for i, g in enumerate(gs) if i % 2 == 1]
        first = _projector_product(even, n)
        second = _projector_product(odd, n)
    return 3.0 - 2.0 * (first + second)


def witness_to_dense(w: Witness) -> np.ndarray:
    if isinstance(w, ProjectorWitness):
        return w.to_dense()
    return observable_to_dense(w)


def evaluate(w: Witness, state: st.StateVector | st.DensityMatrix) -> float:
    """Tr(ρW); a negative value flags genuine multipartite entanglement."""
    if isinstance(w, ProjectorWitness):
        if state.n_qubits != w.n_qubits:
            raise ValueError("dimension mismatch")
        t = w.target.amplitudes
        if isinstance(state, st.StateVector):
            fid = abs(np.vdot(t, state.amplitudes)) ** 2
        else:
            fid = np.vdot(t, state.matrix @ t).real
        return float(w.c_tilde - fid)
    return st.expectation(w, state)


def mixed_value(w: Witness) -> float:
    """Value on the maximally mixed state; every non-identity Pauli is traceless."""
    if isinstance(w, ProjectorWitness):
        return w.c_tilde - 2.0 ** -w.n_qubits
    return w.identity_coeff


def closed_form_threshold(family: Family, n: int) -> float | None:
    if family is Family.GHZ:
        return 1 / (3 - 4 / 2**n)
    if family is Family.GHZ_PRIME:
        return 1 / n
    if family is Family.CLUSTER:
        if n % 2 == 0:
            return 1 / (4 - 4 / 2 ** (n / 2))
        return 1 / (4 - 2 * (2 ** (-(n + 1) / 2) + 2 ** (-(n - 1) / 2)))
    if family is Family.MERMIN3:
        return 0.5
    if family is Family.GHZ3_EXPANDED:
        return 0.4
    return None


class ThresholdError(ValueError):
    pass


@dataclass(frozen=True)
class ThresholdResult:
    p_threshold: float
    closed_form: float | None
    witness_at_zero: float
    witness_at_one: float

    @property
    def difference(self) -> float | None:
        if self.closed_form is None:
            return None
        return abs(self.p_threshold - self.closed_form)

    def to_json(self) -> dict:
        return {
            "p_threshold": self.p_threshold,
            "closed_form": self.closed_form,
            "difference": self.difference,
            "witness_at_zero": self.witness_at_zero,
            "witness_at_one": self.witness_at_one,
        }


def noise_threshold(spec: WitnessSpec) -> ThresholdResult:
    """Root of Tr(ρ(p)W) = 0 for white noise mixed into the target state.

    The value is affine in p, so the root follows from the two endpoints;
    the pure endpoint is evaluated on the state vector, which keeps this
    usable above the dense cap.
    """
    w = build(spec)
    e0 = evaluate(w, target_state(spec))
    e1 = mixed_value(w)
    if e1 <= 0:
        raise ThresholdError(f"witness is {e1} on white noise; construction bug")
    if e0 >= 0:
        raise ThresholdError(f"witness does not detect its target (value {e0})")
    return ThresholdResult(e0 / (e0 - e1), closed_form_threshold(spec.family, spec.n_qubits), e0, e1)


def scan(spec: WitnessSpec, grid: np.ndarray) -> list[tuple[float, float]]:
    """Witness value on ρ(p) for each p in ``grid`` (dense evaluation)."""
    w = build(spec)
    psi = target_state(spec)
    return [(float(p), evaluate(w, st.noisy_mixture(psi, float(p)))) for p in grid]


@dataclass(frozen=True)
class PSDReport:
    min_eigenvalue: float
    psd: bool
    diagonal: np.ndarray | None = field(default=None, repr=False)
    max_offdiag: float | None = None

    def to_json(self) -> dict:
        out = {"min_eigenvalue": self.min_eigenvalue, "psd": self.psd}
        if self.diagonal is not None:
            out["min_diagonal"] = float(self.diagonal.min())
            out["max_offdiag"] = self.max_offdiag
        return out


def finer_than_check(
    w: Witness,
    n: int,
    target: st.StateVector,
    alpha: float = 2.0,
    basis: list[st.StateVector] | None = None,
    tol: float = 1e-10,
) -> PSDReport:
    """Spectrum of W - α(½·1 - |target⟩⟨target|).

    If ``basis`` is given the operator is also written in it and its
    diagonal and largest off-diagonal magnitude are reported.
    """
    check_dense(n)
    if target.n_qubits != n:
        raise ValueError("target size mismatch")
    dim = 1 << n
    x = witness_to_dense(w) - alpha * (0.5 * np.eye(dim) - target.projector())
    min_eig = float(np.linalg.eigvalsh(x).min())
    diagonal = offdiag = None
    if basis is not None:
        u = st.basis_matrix(basis)
        conj = u.conj().T @ x @ u
        diagonal = np.diag(conj).real.copy()
        offdiag = float(np.abs(conj - np.diag(np.diag(conj))).max())
    return PSDReport(min_eig, min_eig >= -tol, diagonal, offdiag)


def finer_than_for(spec: WitnessSpec, alpha: float = 2.0) -> PSDReport:
    """Finer-than check against the projector witness of the family's target."""
    basis = st.ghz_basis(spec.n_qubits) if spec.family in GHZ_FAMILIES else None
    return finer_than_check(build(spec), spec.n_qubits, target_state(spec), alpha, basis)


def projector_witness(target: st.StateVector) -> ProjectorWitness:
    """c̃ = largest squared Schmidt coefficient over all bipartitions."""
    smax, cut = st.max_schmidt_over_bipartitions(target)
    return ProjectorWitness(target, smax**2, cut)


def stabilizer_group_projector(gs: GeneratorSet) -> ObservableSum:
    """|Ψ⟩⟨Ψ| written as the average of all stabilizer group elements."""
    from .stabilizer import group_elements

    n = gs.n_qubits
    return ObservableSum.from_terms(n, [(2.0**-n, g) for g in group_elements(gs)])
