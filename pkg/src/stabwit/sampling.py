"""Finite-shot simulation of local measurement settings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import check_dense
from .pauli import ObservableSum, PauliOp, basis_masks
from .scheduler import MeasurementSetting, SettingPlan
from .states import DensityMatrix, StateVector

__all__ = ["ShotEstimate", "outcome_distribution", "sample_outcomes", "estimate_observable"]

_INV_SQRT2 = 1 / np.sqrt(2)
# rows send the +1 / -1 eigenvector of each basis to |0> / |1>
_ROTATIONS = {
    PauliOp.Z: np.eye(2, dtype=complex),
    PauliOp.X: np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    PauliOp.Y: np.array([[1, -1j], [1, 1j]], dtype=complex) * _INV_SQRT2,
}


def _rotate_vector(setting: MeasurementSetting, amps: np.ndarray) -> np.ndarray:
    n = setting.n
    t = amps.reshape((2,) * n)
    for k, basis in enumerate(setting.bases):
        if basis is not PauliOp.Z:
            t = np.moveaxis(np.tensordot(_ROTATIONS[basis], t, axes=([1], [k])), 0, k)
    return t.reshape(-1)


def _rotated_diagonal(setting: MeasurementSetting, rho: np.ndarray) -> np.ndarray:
    n = setting.n
    t = rho.reshape((2,) * (2 * n))
    for k, basis in enumerate(setting.bases):
        if basis is PauliOp.Z:
            continue
        u = _ROTATIONS[basis]
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
        t = np.moveaxis(np.tensordot(u.conj(), t, axes=([1], [n + k])), 0, n + k)
    dim = 1 << n
    return np.diagonal(t.reshape(dim, dim)).real


def outcome_distribution(
    setting: MeasurementSetting, state: DensityMatrix | StateVector
) -> np.ndarray:
    """Probability of each outcome index; bit ``n-1-k`` is site ``k`` (0 means +1)."""
    if setting.n != state.n_qubits:
        raise ValueError(f"{setting.n}-site setting on a {state.n_qubits}-qubit state")
    if isinstance(state, StateVector):
        probs = np.abs(_rotate_vector(setting, state.amplitudes)) ** 2
    else:
        check_dense(state.n_qubits)
        probs = _rotated_diagonal(setting, state.matrix)
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling of outcome indices."""
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return np.minimum(np.searchsorted(cdf, rng.random(shots), side="right"), probs.size - 1)


@dataclass(frozen=True)
class ShotEstimate:
    mean: float
    stderr: float
    shots: int
    per_setting_counts: tuple[dict[str, int], ...]
    settings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "shots": self.shots,
            "settings": list(self.settings),
            "per_setting_counts": [dict(c) for c in self.per_setting_counts],
        }


def _bitstring(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def estimate_observable(
    w: ObservableSum,
    plan: SettingPlan,
    state: DensityMatrix | StateVector,
    shots_per_setting: int,
    seed: int,
) -> ShotEstimate:
    """Shot-noise estimate of ⟨W⟩ from ``shots_per_setting`` shots of each setting.

    Terms sharing a setting are evaluated on the same shots, so the
    per-setting error comes from the sample variance of their weighted
    sum; settings are independent and add in quadrature.
    """
    if shots_per_setting < 2:
        raise ValueError("need at least 2 shots per setting for an error estimate")
    n = w.n_qubits
    where = {(t.x, t.z): a for t, a in zip(plan.terms, plan.assignment)}
    by_setting: list[list[tuple[float, int]]] = [[] for _ in plan.settings]
    for c, s in w.terms:
        a = where.get((s.x, s.z))
        if a is None:
            raise ValueError(f"term {s} is not covered by the plan")
        setting = plan.settings[a]
        if any(op is not PauliOp.I and op is not setting.bases[k] for k, op in enumerate(s.ops)):
            raise ValueError(f"term {s} is not measurable in setting {setting}")
        xm, zm = basis_masks(s)
        by_setting[a].append((c, xm | zm))

    streams = np.random.SeedSequence(seed).spawn(len(plan.settings))
    mean = w.identity_coeff
    variance = 0.0
    counts = []
    for setting, stream, group in zip(plan.settings, streams, by_setting):
        rng = np.random.Generator(np.random.PCG64(stream))
        outcomes = sample_outcomes(outcome_distribution(setting, state), shots_per_setting, rng)
        hist = np.bincount(outcomes, minlength=1 << n)
        counts.append({_bitstring(int(i), n): int(hist[i]) for i in np.flatnonzero(hist)})
        if not group:
            continue
        y = np.zeros(shots_per_setting)
        for c, mask in group:
            parity = (np.bitwise_count(outcomes & mask) & 1).astype(np.int64)
            y += c * (1 - 2 * parity)
        mean += float(y.mean())
        variance += float(y.var(ddof=1)) / shots_per_setting
    return ShotEstimate(
        float(mean),
        float(np.sqrt(variance)),
        shots_per_setting,
        tuple(counts),
        tuple(s.label for s in plan.settings),
    )
