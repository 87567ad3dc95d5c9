"""Stabilizer entanglement witnesses for GHZ, cluster and graph states."""

from .pauli import ObservableSum, PauliOp, PauliString, commutes, format_pauli, multiply, parse_pauli
from .stabilizer import GeneratorSet, GraphSpec, cluster_generators, ghz_generators, graph_generators
from .states import DensityMatrix, StateVector, expectation, ghz_state, noisy_mixture, stabilizer_state
from .witness import Family, WitnessSpec, build, evaluate, noise_threshold

__version__ = "0.1.0"

__all__ = [
    "ObservableSum",
    "PauliOp",
    "PauliString",
    "commutes",
    "format_pauli",
    "multiply",
    "parse_pauli",
    "GeneratorSet",
    "GraphSpec",
    "cluster_generators",
    "ghz_generators",
    "graph_generators",
    "DensityMatrix",
    "StateVector",
    "expectation",
    "ghz_state",
    "noisy_mixture",
    "stabilizer_state",
    "Family",
    "WitnessSpec",
    "build",
    "evaluate",
    "noise_threshold",
]
