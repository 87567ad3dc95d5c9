"""N-qubit Pauli strings with exact phase tracking.

A string is stored as two bitmasks plus a phase exponent: bit ``k`` of
``x``/``z`` describes site ``k`` (0-based, site 0 is the leftmost tensor
factor) and the operator at a site is I, X, Z or Y for (x, z) = (0, 0),
(1, 0), (0, 1), (1, 1).  The overall prefactor is ``1j ** phase``.

Dense matrices use the usual Kronecker ordering, so site ``k`` maps to
bit ``n - 1 - k`` of a computational-basis index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .config import check_dense

__all__ = [
    "PauliOp",
    "PauliString",
    "ObservableSum",
    "PauliParseError",
    "multiply",
    "commutes",
    "to_dense",
    "observable_to_dense",
    "parse_pauli",
    "format_pauli",
]

_PHASE_VALUES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)
_PHASE_TOKENS = {"": 0, "+": 0, "-": 2, "+i": 1, "-i": 3}
_PHASE_PREFIX = ("", "+i", "-", "-i")


class PauliParseError(ValueError):
    pass


class PauliOp(enum.Enum):
    I = (0, 0)
    X = (1, 0)
    Z = (0, 1)
    Y = (1, 1)

    @property
    def x(self) -> int:
        return self.value[0]

    @property
    def z(self) -> int:
        return self.value[1]

    @classmethod
    def from_bits(cls, x: int, z: int) -> "PauliOp":
        return _OP_BY_BITS[(x, z)]

    def matrix(self) -> np.ndarray:
        return _SINGLE[self.name].copy()


_OP_BY_BITS = {op.value: op for op in PauliOp}
_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """``1j**phase`` times a tensor product of single-qubit Paulis."""

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one site")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("bitmask wider than the string")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_ops(cls, ops: Iterable[PauliOp | str], phase: int = 0) -> "PauliString":
        x = z = 0
        n = 0
        for k, op in enumerate(ops):
            if isinstance(op, str):
                try:
                    op = PauliOp[op]
                except KeyError:
                    raise PauliParseError(f"unknown Pauli {op!r}") from None
            x |= op.x << k
            z |= op.z << k
            n = k + 1
        return cls(n, x, z, phase)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, site: int, op: PauliOp | str) -> "PauliString":
        if isinstance(op, str):
            op = PauliOp[op]
        return cls(n, op.x << site, op.z << site)

    @property
    def ops(self) -> tuple[PauliOp, ...]:
        return tuple(
            PauliOp.from_bits((self.x >> k) & 1, (self.z >> k) & 1) for k in range(self.n)
        )

    @property
    def label(self) -> str:
        return "".join(op.name for op in self.ops)

    @property
    def phase_value(self) -> complex:
        return _PHASE_VALUES[self.phase]

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return _popcount(self.support)

    @property
    def is_identity(self) -> bool:
        return self.support == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def unsigned(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, 0)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self) -> str:
        return format_pauli(self)


def _check_lengths(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a · b`` with the exact phase."""
    _check_lengths(a, b)
    x = a.x ^ b.x
    z = a.z ^ b.z
    # Y = i XZ at each site; XZ products reorder with a sign (-1)^(z_a . x_b).
    exponent = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x & z)
    )
    return PauliString(a.n, x, z, exponent)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_lengths(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def _reverse_bits(mask: int, n: int) -> int:
    out = 0
    for k in range(n):
        if (mask >> k) & 1:
            out |= 1 << (n - 1 - k)
    return out


def basis_masks(s: PauliString) -> tuple[int, int]:
    """x and z masks in computational-basis bit order."""
    return _reverse_bits(s.x, s.n), _reverse_bits(s.z, s.n)


def row_action(s: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero structure of the dense matrix: row ``j`` has ``values[j]`` at column ``cols[j]``."""
    xm, zm = basis_masks(s)
    idx = np.arange(1 << s.n, dtype=np.int64)
    cols = idx ^ xm
    signs = 1 - 2 * (np.bitwise_count(cols & zm) & 1).astype(np.int64)
    prefactor = _PHASE_VALUES[(s.phase + _popcount(s.x & s.z)) % 4]
    return cols, prefactor * signs


def apply(s: PauliString, psi: np.ndarray) -> np.ndarray:
    """``s |psi⟩`` without forming the matrix."""
    cols, values = row_action(s)
    return values * psi[cols]


def to_dense(s: PauliString) -> np.ndarray:
    check_dense(s.n)
    dim = 1 << s.n
    cols, values = row_action(s)
    out = np.zeros((dim, dim), dtype=complex)
    out[np.arange(dim), cols] = values
    return out


@dataclass(frozen=True)
class ObservableSum:
    """Real combination ``identity_coeff·1 + Σ coeff·P`` in canonical merged form.

    Stored strings always carry phase +1 and are pairwise distinct.  Use
    :meth:`from_terms` to build one from arbitrary (coeff, string) pairs.
    """

    n_qubits: int
    identity_coeff: float
    terms: tuple[tuple[float, PauliString], ...] = ()

    @classmethod
    def from_terms(
        cls,
        n_qubits: int,
        terms: Iterable[tuple[complex, PauliString]] = (),
        identity_coeff: complex = 0.0,
    ) -> "ObservableSum":
        acc: dict[tuple[int, int], complex] = {}
        ident = complex(identity_coeff)
        for coeff, s in terms:
            if s.n != n_qubits:
                raise ValueError(f"term on {s.n} qubits in a {n_qubits}-qubit observable")
            c = complex(coeff) * s.phase_value
            if s.is_identity:
                ident += c
            else:
                key = (s.x, s.z)
                acc[key] = acc.get(key, 0) + c
        return cls._from_accumulator(n_qubits, ident, acc)

    @classmethod
    def _from_accumulator(cls, n, ident, acc) -> "ObservableSum":
        values = [ident, *acc.values()]
        if any(abs(c.imag) > 1e-12 for c in values):
            raise ValueError("imaginary coefficient in a Hermitian observable")
        terms = tuple(
            (c.real, PauliString(n, x, z)) for (x, z), c in acc.items() if abs(c.real) > 1e-14
        )
        return cls(n, ident.real, terms)

    @classmethod
    def identity(cls, n: int, coeff: float = 1.0) -> "ObservableSum":
        return cls(n, float(coeff), ())

    @classmethod
    def of(cls, s: PauliString, coeff: float = 1.0) -> "ObservableSum":
        return cls.from_terms(s.n, [(coeff, s)])

    @property
    def strings(self) -> list[PauliString]:
        return [s for _, s in self.terms]

    def as_dict(self) -> dict[str, float]:
        return {s.label: c for c, s in self.terms}

    def __add__(self, other: "ObservableSum | float") -> "ObservableSum":
        if not isinstance(other, ObservableSum):
            return ObservableSum.from_terms(
                self.n_qubits, self.terms, self.identity_coeff + float(other)
            )
        return ObservableSum.from_terms(
            self.n_qubits,
            [*self.terms, *other.terms],
            self.identity_coeff + other.identity_coeff,
        )

    __radd__ = __add__

    def __neg__(self) -> "ObservableSum":
        return self * -1.0

    def __sub__(self, other: "ObservableSum | float") -> "ObservableSum":
        return self + (-other)

    def __rsub__(self, other: float) -> "ObservableSum":
        return (-self) + other

    def __mul__(self, scalar: float) -> "ObservableSum":
        scalar = float(scalar)
        return ObservableSum.from_terms(
            self.n_qubits,
            [(scalar * c, s) for c, s in self.terms],
            scalar * self.identity_coeff,
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "ObservableSum") -> "ObservableSum":
        """Operator product; raises if the result is not Hermitian."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        n = self.n_qubits
        ident = PauliString.identity(n)
        left = [(self.identity_coeff, ident), *self.terms]
        right = [(other.identity_coeff, ident), *other.terms]
        acc: dict[tuple[int, int], complex] = {}
        total_ident = 0j
        for ca, a in left:
            if ca == 0:
                continue
            for cb, b in right:
                if cb == 0:
                    continue
                p = multiply(a, b)
                c = ca * cb * p.phase_value
                if p.is_identity:
                    total_ident += c
                else:
                    key = (p.x, p.z)
                    acc[key] = acc.get(key, 0) + c
        return ObservableSum._from_accumulator(n, total_ident, acc)

    def same_as(self, other: "ObservableSum", tol: float = 0.0) -> bool:
        """Term-set equality (order-independent)."""
        if self.n_qubits != other.n_qubits:
            return False
        if abs(self.identity_coeff - other.identity_coeff) > tol:
            return False
        mine, theirs = self.as_dict(), other.as_dict()
        if mine.keys() != theirs.keys():
            return False
        return all(abs(mine[k] - theirs[k]) <= tol for k in mine)

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "identity_coeff": self.identity_coeff,
            "terms": [{"coeff": c, "pauli": format_pauli(s)} for c, s in self.terms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ObservableSum":
        terms = [(t["coeff"], parse_pauli(t["pauli"])) for t in data["terms"]]
        return cls.from_terms(int(data["n_qubits"]), terms, data["identity_coeff"])


def observable_to_dense(o: ObservableSum) -> np.ndarray:
    check_dense(o.n_qubits)
    dim = 1 << o.n_qubits
    out = o.identity_coeff * np.eye(dim, dtype=complex)
    rows = np.arange(dim)
    for c, s in o.terms:
        cols, values = row_action(s)
        out[rows, cols] += c * values
    return out


def parse_pauli(text: str) -> PauliString:
    """Parse ``[+|-|+i|-i]`` followed by letters from ``IXYZ``."""
    if not text:
        raise PauliParseError("empty Pauli string")
    body = text.lstrip("+-")
    sign = text[: len(text) - len(body)]
    if len(sign) > 1:
        raise PauliParseError(f"malformed phase in {text!r}")
    token = sign
    if body.startswith("i"):
        if not sign:
            raise PauliParseError(f"imaginary phase needs a sign in {text!r}")
        token += "i"
        body = body[1:]
    if not body:
        raise PauliParseError(f"no operators in {text!r}")
    bad = set(body) - set("IXYZ")
    if bad:
        raise PauliParseError(f"unknown Pauli character(s) {''.join(sorted(bad))!r} in {text!r}")
    return PauliString.from_ops(body, _PHASE_TOKENS[token])


def format_pauli(s: PauliString) -> str:
    return _PHASE_PREFIX[s.phase] + s.label

