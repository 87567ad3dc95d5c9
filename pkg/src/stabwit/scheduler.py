"""Group Pauli terms into local measurement settings.

A setting fixes one of X, Y, Z at every site; a term is measurable in it
when each of its non-identity sites agrees with the setting there.  Terms
that fit together are pairwise compatible, so settings correspond to
cliques of the compatibility graph and the minimum plan is a minimum
clique cover, solved exactly as a set cover over maximal cliques.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .pauli import PauliOp, PauliString
from .stabilizer import GraphSpec, graph_generators

__all__ = [
    "MeasurementSetting",
    "SettingPlan",
    "compatible",
    "min_settings",
    "two_colorable",
    "graph_witness_settings",
    "EXACT_LIMIT",
]

EXACT_LIMIT = 20
_FILL = PauliOp.Z


@dataclass(frozen=True)
class MeasurementSetting:
    bases: tuple[PauliOp, ...]

    def __post_init__(self):
        bases = tuple(PauliOp[b] if isinstance(b, str) else b for b in self.bases)
        if not bases:
            raise ValueError("empty setting")
        if PauliOp.I in bases:
            raise ValueError("a setting measures a non-trivial operator at every site")
        object.__setattr__(self, "bases", bases)

    @classmethod
    def from_label(cls, label: str) -> "MeasurementSetting":
        return cls(tuple(label))

    @property
    def label(self) -> str:
        return "".join(b.name for b in self.bases)

    @property
    def n(self) -> int:
        return len(self.bases)

    def as_string(self) -> PauliString:
        return PauliString.from_ops(self.bases)

    def __str__(self) -> str:
        return self.label


def compatible(term: PauliString, setting: MeasurementSetting) -> bool:
    if term.n != setting.n:
        raise ValueError(f"length mismatch: {term.n} vs {setting.n}")
    s = setting.as_string()
    return ((term.x ^ s.x) | (term.z ^ s.z)) & term.support == 0


def _agree(a: PauliString, b: PauliString) -> bool:
    overlap = a.support & b.support
    return ((a.x ^ b.x) | (a.z ^ b.z)) & overlap == 0


def _covers(big: PauliString, small: PauliString) -> bool:
    """Every setting that measures ``big`` also measures ``small``."""
    return small.support & ~big.support == 0 and _agree(big, small)


def _merge(strings: Sequence[PauliString], n: int) -> MeasurementSetting:
    ops = [_FILL] * n
    for s in strings:
        for k, op in enumerate(s.ops):
            if op is not PauliOp.I:
                ops[k] = op
    return MeasurementSetting(tuple(ops))


@dataclass(frozen=True)
class SettingPlan:
    settings: tuple[MeasurementSetting, ...]
    assignment: tuple[int | None, ...]
    optimal: bool
    terms: tuple[PauliString, ...] = field(default=(), repr=False)

    @property
    def n_settings(self) -> int:
        return len(self.settings)

    @property
    def identity_terms(self) -> list[int]:
        """Indices of identity-only terms; they need no setting."""
        return [i for i, a in enumerate(self.assignment) if a is None]

    def is_valid(self) -> bool:
        used = {a for a in self.assignment if a is not None}
        if used != set(range(len(self.settings))):
            return False
        return all(
            a is None or compatible(t, self.settings[a]) for t, a in zip(self.terms, self.assignment)
        )

    def to_json(self) -> dict:
        return {
            "settings": [s.label for s in self.settings],
            "assignment": list(self.assignment),
            "optimal": self.optimal,
        }


def _exact_cover(universe: int, candidates: list[int]) -> list[int]:
    """Smallest list of candidate indices whose bitmasks cover ``universe``."""
    best: list[int] = []
    best_len = len(candidates) + 1

    by_element: dict[int, list[int]] = {}
    for idx, mask in enumerate(candidates):
        m = mask
        while m:
            low = m & -m
            by_element.setdefault(low.bit_length() - 1, []).append(idx)
            m ^= low
    largest = max(bin(c).count("1") for c in candidates)

    def search(covered: int, chosen: list[int]) -> None:
        nonlocal best, best_len
        if covered == universe:
            if len(chosen) < best_len:
                best, best_len = list(chosen), len(chosen)
            return
        remaining = bin(universe & ~covered).count("1")
        # every further setting covers at most `largest` new terms
        if len(chosen) + -(-remaining // largest) >= best_len:
            return
        uncovered = universe & ~covered
        element = (uncovered & -uncovered).bit_length() - 1
        for idx in by_element[element]:
            chosen.append(idx)
            search(covered | candidates[idx], chosen)
            chosen.pop()

    search(0, [])
    return best


def _maximal_terms(strings: list[PauliString]) -> tuple[list[int], list[int]]:
    """Split terms into a dominating subset and the rest.

    Sorted by weight, each term is either covered by a kept term or kept.
    Covering the kept ones covers everything.
    """
    order = sorted(range(len(strings)), key=lambda i: (-strings[i].weight, i))
    kept: list[int] = []
    dominated: list[int] = []
    for i in order:
        if any(_covers(strings[j], strings[i]) for j in kept):
            dominated.append(i)
        else:
            kept.append(i)
    return kept, dominated


def min_settings(terms: Sequence[PauliString], exact_limit: int = EXACT_LIMIT) -> SettingPlan:
    """Fewest settings measuring every term.

    Exact whenever the dominating terms number at most ``exact_limit``;
    otherwise a largest-uncovered-first greedy cover with ``optimal=False``.
    """
    terms = tuple(terms)
    if not terms:
        raise ValueError("no terms to schedule")
    n = terms[0].n
    if any(t.n != n for t in terms):
        raise ValueError("terms have different lengths")
    active = [i for i, t in enumerate(terms) if not t.is_identity]
    assignment: list[int | None] = [None] * len(terms)
    if not active:
        return SettingPlan((), tuple(assignment), True, terms)

    # unsigned copies: the phase does not affect measurability
    unique: dict[tuple[int, int], PauliString] = {}
    for i in active:
        unique.setdefault((terms[i].x, terms[i].z), terms[i].unsigned())
    strings = sorted(unique.values(), key=lambda s: s.label)
    kept_idx, _ = _maximal_terms(strings)
    kept = [strings[i] for i in kept_idx]

    optimal = len(kept) <= exact_limit
    if optimal:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(kept)))
        graph.add_edges_from(
            (a, b) for a in range(len(kept)) for b in range(a + 1, len(kept)) if _agree(kept[a], kept[b])
        )
        universe = (1 << len(kept)) - 1
        cliques = sorted(sorted(c) for c in nx.find_cliques(graph))
        masks = [sum(1 << v for v in c) for c in cliques]
        chosen = _exact_cover(universe, masks)
    else:
        cliques = _greedy_cliques(kept)
        chosen = list(range(len(cliques)))
        optimal = len(chosen) <= _conflict_lower_bound(kept)

    settings = sorted({_merge([kept[v] for v in cliques[i]], n).label for i in chosen})
    plan_settings = [MeasurementSetting.from_label(lbl) for lbl in settings]
    for i in active:
        t = terms[i]
        assignment[i] = next(k for k, s in enumerate(plan_settings) if compatible(t, s))
    used = sorted({a for a in assignment if a is not None})
    if len(used) != len(plan_settings):
        remap = {old: new for new, old in enumerate(used)}
        plan_settings = [plan_settings[k] for k in used]
        assignment = [None if a is None else remap[a] for a in assignment]
    return SettingPlan(tuple(plan_settings), tuple(assignment), optimal, terms)


def _conflict_lower_bound(strings: list[PauliString]) -> int:
    """Size of a greedily found set of pairwise incompatible terms."""
    picked: list[PauliString] = []
    for s in strings:
        if all(not _agree(s, p) for p in picked):
            picked.append(s)
    return len(picked)


def _greedy_cliques(kept: list[PauliString]) -> list[list[int]]:
    """Largest-uncovered-first: each round grows a merge from every uncovered
    seed over the uncovered terms and keeps the biggest."""
    uncovered = list(range(len(kept)))
    cliques: list[list[int]] = []
    while uncovered:
        best: list[int] = []
        for seed in uncovered:
            members = [seed]
            for j in uncovered:
                if j != seed and all(_agree(kept[j], kept[m]) for m in members):
                    members.append(j)
            if len(members) > len(best):
                best = members
        cliques.append(sorted(best))
        taken = set(best)
        uncovered = [j for j in uncovered if j not in taken]
    return cliques


def two_colorable(g: GraphSpec) -> list[int] | None:
    """Breadth-first 2-coloring (0/1 per vertex), or None for an odd cycle."""
    colors: list[int | None] = [None] * g.n_qubits
    for start in range(g.n_qubits):
        if colors[start] is not None:
            continue
        colors[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if colors[w] is None:
                    colors[w] = 1 - colors[v]
                    queue.append(w)
                elif colors[w] == colors[v]:
                    return None
    return [int(c) for c in colors]


def graph_witness_settings(g: GraphSpec) -> SettingPlan:
    if not g.is_connected():
        from .states import BiseparableGraphError

        raise BiseparableGraphError("graph is disconnected")
    terms = tuple(graph_generators(g))
    coloring = two_colorable(g)
    if coloring is None:
        return min_settings(terms)
    first = MeasurementSetting(tuple(PauliOp.X if c == 0 else PauliOp.Z for c in coloring))
    second = MeasurementSetting(tuple(PauliOp.Z if c == 0 else PauliOp.X for c in coloring))
    settings = tuple(sorted((first, second), key=lambda s: s.label))
    assignment = tuple(next(k for k, s in enumerate(settings) if compatible(t, s)) for t in terms)
    return SettingPlan(settings, assignment, True, terms)
