"""Size limits shared by every module.

Dense operators (density matrices, witness matrices) are bounded by
``dense_cap``; pure-state vectors by the larger ``vector_cap`` so that
threshold scans can run on bigger registers.
"""

from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Limits:
    dense_cap: int = 12
    vector_cap: int = 20
    expansion_cap: int = 16
    group_cap: int = 16


class CapExceededError(ValueError):
    """A requested size is above the configured limit."""


_limits = Limits()


def get_limits() -> Limits:
    return _limits


def set_limits(**changes: int) -> Limits:
    global _limits
    _limits = dataclasses.replace(_limits, **changes)
    return _limits


@contextlib.contextmanager
def override_limits(**changes: int):
    global _limits
    saved = _limits
    _limits = dataclasses.replace(_limits, **changes)
    try:
        yield _limits
    finally:
        _limits = saved


def check_dense(n: int) -> None:
    cap = _limits.dense_cap
    if n > cap:
        raise CapExceededError(f"{n} qubits exceeds dense cap {cap}")


def check_vector(n: int) -> None:
    cap = _limits.vector_cap
    if n > cap:
        raise CapExceededError(f"{n} qubits exceeds state-vector cap {cap}")
