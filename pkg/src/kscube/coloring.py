"""Kochen-Specker {0,1} value assignments.

Constraint semantics: along every edge at most one endpoint is valued 1; in
every complete basis (a d-clique) exactly one vertex is valued 1.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from .corpus import H_LABELS, standard_graph
from .errors import GraphMismatch, InputError, TooLarge, Uncolorable
from .hilbert import RaySet
from .orthograph import OrthGraph, basis_cliques, build_graph, labeled_isomorphism

MAX_ENUMERATION_VERTICES = 30
DEFAULT_LIMIT = 64


@dataclass(frozen=True)
class KSAssignment:
    vertices: tuple[str, ...]
    values: tuple[int, ...]

    def __getitem__(self, label: str) -> int:
        return self.values[self.vertices.index(label)]

    def ones(self) -> tuple[str, ...]:
        return tuple(v for v, x in zip(self.vertices, self.values) if x)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.vertices, self.values))


@dataclass(frozen=True)
class ColoringProblem:
    graph: OrthGraph
    bases: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        for b in self.bases:
            for u, v in itertools.combinations(b, 2):
                if not self.graph.adjacent(u, v):
                    raise InputError(f"basis {b} is not a clique: {u!r} and {v!r} are not adjacent")

    @classmethod
    def from_graph(cls, g: OrthGraph, d: int) -> ColoringProblem:
        return cls(g, tuple(basis_cliques(g, d)))

    @classmethod
    def from_rays(cls, rs: RaySet) -> ColoringProblem:
        return cls.from_graph(build_graph(rs), rs.dimension)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices


@dataclass(frozen=True)
class KSEnumeration:
    assignments: tuple[KSAssignment, ...]
    count: int


@dataclass(frozen=True)
class ColoringResult:
    """Outcome of a witness search.

    ``forced`` lists the values implied by propagation from the pins alone, as
    ``(label, value)`` in the order they were derived; ``conflict`` names the
    contradiction that propagation reached, if any.
    """

    witness: KSAssignment | None
    forced: tuple[tuple[str, int], ...] = ()
    conflict: str | None = None

    @property
    def unsat(self) -> bool:
        return self.witness is None

    def forced_ones(self) -> tuple[str, ...]:
        return tuple(v for v, x in self.forced if x == 1)


def _basis_indices(p: ColoringProblem) -> list[tuple[int, ...]]:
    return [tuple(sorted(p.graph.index(v) for v in b)) for b in p.bases]


def iter_ks(p: ColoringProblem) -> Iterator[tuple[int, ...]]:
    """Yield every KS assignment as a 0/1 tuple, lexicographically over vertex order."""
    n = len(p.graph)
    if n > MAX_ENUMERATION_VERTICES:
        raise TooLarge(f"{n} vertices exceeds the enumeration limit {MAX_ENUMERATION_VERTICES}; use ks_colorable")
    masks = p.graph.neighbor_masks
    closing: list[list[int]] = [[] for _ in range(n)]
    for b in _basis_indices(p):
        closing[b[-1]].append(sum(1 << i for i in b))
    values = [0] * n

    def dfs(i: int, ones: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(values)
            return
        for x in (0, 1):
            if x and masks[i] & ones:
                continue
            new_ones = ones | (x << i)
            if any(not (b & new_ones) for b in closing[i]):
                continue
            values[i] = x
            yield from dfs(i + 1, new_ones)
        values[i] = 0

    yield from dfs(0, 0)


def enumerate_ks(p: ColoringProblem, limit: int | None = DEFAULT_LIMIT) -> KSEnumeration:
    """All KS assignments in lexicographic order; ``count`` is exact even when ``limit`` truncates."""
    kept: list[KSAssignment] = []
    count = 0
    for values in iter_ks(p):
        if limit is None or count < limit:
            kept.append(KSAssignment(p.vertices, values))
        count += 1
    return KSEnumeration(tuple(kept), count)


def _propagate(p: ColoringProblem, state: dict[str, int], log: list[tuple[str, int]]) -> str | None:
    """Round-based unit propagation, mutating ``state``; returns a conflict description or None.

    Each round derives every implication of the current state at once and only
    then applies them, so the reported contradiction reads the way one would
    argue it by hand.
    """
    g = p.graph
    while True:
        implied: dict[str, int] = {}
        for v, x in state.items():
            if x != 1:
                continue
            for w in g.neighbors(v):
                if state.get(w) == 1:
                    return f"adjacent {v} and {w} both valued 1"
                if w not in state:
                    implied[w] = 0
        for b in p.bases:
            vals = [state.get(v) for v in b]
            if vals.count(1) > 1:
                return f"basis {{{', '.join(b)}}} has more than one vertex valued 1"
            if vals.count(0) == len(b):
                return f"basis {{{', '.join(b)}}} has no vertex valued 1"
            if vals.count(0) == len(b) - 1 and None in vals:
                last = b[vals.index(None)]
                if implied.get(last) == 0:
                    return f"{last} is forced to both 0 and 1"
                implied[last] = 1
        if not implied:
            return None
        for v in p.vertices:
            if v in implied:
                state[v] = implied[v]
                log.append((v, implied[v]))
        newly_one = [v for v in p.vertices if implied.get(v) == 1]
        for u, w in itertools.combinations(newly_one, 2):
            if g.adjacent(u, w):
                return f"{u} and {w} are both forced to 1 but are adjacent"


def ks_colorable(p: ColoringProblem, pinned: Mapping[str, int] | None = None) -> ColoringResult:
    """Find a KS assignment (respecting ``pinned`` values) by backtracking with propagation."""
    pinned = dict(pinned or {})
    for v, x in pinned.items():
        p.graph.index(v)
        if x not in (0, 1):
            raise InputError(f"pinned value for {v!r} must be 0 or 1")

    state = dict(pinned)
    forced: list[tuple[str, int]] = []
    conflict = _propagate(p, state, forced)
    if conflict is not None:
        return ColoringResult(None, tuple(forced), conflict)

    degrees = p.graph.degrees()
    order = sorted(range(len(p.vertices)), key=lambda i: (-degrees[i], i))
    order = [p.vertices[i] for i in order]

    def search(state: dict[str, int]) -> dict[str, int] | None:
        free = next((v for v in order if v not in state), None)
        if free is None:
            return state
        for x in (0, 1):
            trial = dict(state)
            trial[free] = x
            if _propagate(p, trial, []) is None:
                found = search(trial)
                if found is not None:
                    return found
        return None

    solution = search(state)
    if solution is None:
        return ColoringResult(None, tuple(forced), "search exhausted")
    witness = KSAssignment(p.vertices, tuple(solution[v] for v in p.vertices))
    return ColoringResult(witness, tuple(forced), None)


def max_subset_sum(p: ColoringProblem, subset: Iterable[str]) -> tuple[int, KSAssignment]:
    """Largest number of ``subset`` vertices valued 1 by any KS assignment, with the first maximizer."""
    idx = [p.graph.index(v) for v in subset]
    best, witness = -1, None
    for values in iter_ks(p):
        s = sum(values[i] for i in idx)
        if s > best:
            best, witness = s, values
    if witness is None:
        raise Uncolorable("the problem admits no KS assignment")
    return best, KSAssignment(p.vertices, witness)


@dataclass(frozen=True)
class PairCase:
    pair: tuple[str, str]
    result: ColoringResult

    @property
    def unsat(self) -> bool:
        return self.result.unsat


@dataclass(frozen=True)
class HExclusionReport:
    cases: tuple[PairCase, ...]
    h_labels: tuple[str, ...] = field(default=H_LABELS)

    @property
    def at_most_one(self) -> bool:
        """No two h-vertices can be valued 1 together."""
        return all(c.unsat for c in self.cases)


def pairwise_h_exclusion(p: ColoringProblem) -> HExclusionReport:
    """Pin every pair of h-vertices to 1 and show each pinned problem is unsatisfiable."""
    iso = labeled_isomorphism(standard_graph(), p.graph)
    if iso is None:
        raise GraphMismatch("graph is not isomorphic to the 13-vertex magic-cube graph")
    hs = tuple(iso[h] for h in H_LABELS)
    cases = tuple(PairCase((a, b), ks_colorable(p, {a: 1, b: 1})) for a, b in itertools.combinations(hs, 2))
    return HExclusionReport(cases, hs)


def violations(p: ColoringProblem, values: Mapping[str, int] | Sequence[int]) -> list[str]:
    """Constraint violations of a full 0/1 assignment; empty when valid."""
    if not isinstance(values, Mapping):
        values = dict(zip(p.vertices, values))
    out = [f"edge {u}-{v}" for u, v in p.graph.edges() if values[u] and values[v]]
    out += [f"basis {b}" for b in p.bases if sum(values[v] for v in b) != 1]
    return out
