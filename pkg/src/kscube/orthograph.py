"""Orthogonality graphs: adjacency, complete-basis cliques, labeled isomorphism."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

from .errors import DuplicateRay, InputError, KTooLarge
from .hilbert import DEFAULT_EPS, RaySet, inner_product, overlap


@dataclass(frozen=True)
class OrthGraph:
    """Symmetric 0/1 adjacency over an ordered label sequence."""

    vertices: tuple[str, ...]
    gamma: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.vertices)
        if len(set(self.vertices)) != n:
            raise InputError("vertex labels must be unique")
        if len(self.gamma) != n or any(len(row) != n for row in self.gamma):
            raise InputError("adjacency matrix shape does not match the vertex count")
        for i in range(n):
            if self.gamma[i][i]:
                raise InputError(f"self-loop at {self.vertices[i]!r}")
            for j in range(i + 1, n):
                if self.gamma[i][j] not in (0, 1) or self.gamma[i][j] != self.gamma[j][i]:
                    raise InputError("adjacency matrix must be symmetric 0/1")

    @classmethod
    def from_edges(cls, vertices: Sequence[str], edges: Iterable[tuple[str, str]]) -> OrthGraph:
        vertices = tuple(vertices)
        pos = {v: i for i, v in enumerate(vertices)}
        m = [[0] * len(vertices) for _ in vertices]
        for u, v in edges:
            m[pos[u]][pos[v]] = m[pos[v]][pos[u]] = 1
        return cls(vertices, tuple(tuple(r) for r in m))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Bitmask of neighbors per vertex index (bit i = vertex i)."""
        return tuple(sum(1 << j for j, x in enumerate(row) if x) for row in self.gamma)

    def __len__(self) -> int:
        return len(self.vertices)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown vertex {label!r}") from None

    def adjacent(self, u: str, v: str) -> bool:
        return bool(self.gamma[self.index(u)][self.index(v)])

    def neighbors(self, v: str) -> tuple[str, ...]:
        row = self.gamma[self.index(v)]
        return tuple(w for w, x in zip(self.vertices, row) if x)

    def degree(self, v: str) -> int:
        return sum(self.gamma[self.index(v)])

    def degrees(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.gamma)

    def degree_multiset(self) -> dict[int, int]:
        """Map degree -> number of vertices with that degree."""
        return dict(sorted(Counter(self.degrees()).items(), reverse=True))

    def edges(self) -> list[tuple[str, str]]:
        n = len(self)
        return [(self.vertices[i], self.vertices[j]) for i in range(n) for j in range(i + 1, n) if self.gamma[i][j]]

    @property
    def edge_count(self) -> int:
        return sum(map(sum, self.gamma)) // 2

    def induced(self, labels: Iterable[str]) -> OrthGraph:
        idx = [self.index(v) for v in labels]
        return OrthGraph(
            tuple(self.vertices[i] for i in idx),
            tuple(tuple(self.gamma[i][j] for j in idx) for i in idx),
        )

    def without(self, *labels: str) -> OrthGraph:
        drop = set(labels)
        return self.induced(v for v in self.vertices if v not in drop)

    def reorder(self, labels: Sequence[str]) -> OrthGraph:
        """Same graph, vertices listed in a different order."""
        if sorted(labels) != sorted(self.vertices):
            raise InputError("reorder needs a permutation of the vertex labels")
        return self.induced(labels)


def _orthogonal(a, b, eps: float) -> bool:
    if a.exact and b.exact:
        return inner_product(a, b) == 0
    return math.sqrt(overlap(a, b)) <= eps


def _same_ray(a, b, eps: float) -> bool:
    if a.exact and b.exact:
        return a.components == b.components
    return overlap(a, b) >= 1 - eps


def build_graph(rs: RaySet, eps: float = DEFAULT_EPS) -> OrthGraph:
    """Orthogonality graph of a ray set: an edge for every orthogonal pair.

    Exact rays are tested exactly; float rays by |<u,v>| / (|u||v|) <= eps.
    """
    rays = rs.rays
    n = len(rays)
    m = [[0] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        if _same_ray(rays[i], rays[j], eps):
            raise DuplicateRay(f"{rays[i].label!r} and {rays[j].label!r} span the same ray")
        if _orthogonal(rays[i], rays[j], eps):
            m[i][j] = m[j][i] = 1
    return OrthGraph(rs.labels, tuple(tuple(r) for r in m))


def basis_cliques(g: OrthGraph, d: int) -> list[tuple[str, ...]]:
    """All d-cliques of ``g`` as label tuples in vertex order, sorted lexicographically by index."""
    if d < 2:
        raise InputError("basis size must be at least 2")
    masks = g.neighbor_masks
    out: list[tuple[str, ...]] = []

    def extend(chosen: list[int], common: int, start: int) -> None:
        if len(chosen) == d:
            out.append(tuple(g.vertices[i] for i in chosen))
            return
        for i in range(start, len(g)):
            if common >> i & 1:
                chosen.append(i)
                extend(chosen, common & masks[i], i + 1)
                chosen.pop()

    everything = (1 << len(g)) - 1
    extend([], everything, 0)
    return out


def isomorphisms(g1: OrthGraph, g2: OrthGraph) -> Iterator[dict[str, str]]:
    """Yield every adjacency-preserving bijection from ``g1`` onto ``g2``.

    Vertices of ``g1`` are mapped in their listed order.  Candidates are tried
    with the identically labeled vertex of ``g2`` first, then in ``g2`` order,
    so a graph compared with a reordering of itself yields the label-preserving
    map first.
    """
    n = len(g1)
    if n != len(g2) or g1.edge_count != g2.edge_count:
        return
    deg1, deg2 = g1.degrees(), g2.degrees()
    if sorted(deg1) != sorted(deg2):
        return

    candidates = []
    for i, label in enumerate(g1.vertices):
        same = [j for j in range(n) if deg2[j] == deg1[i]]
        pref = g2._index.get(label)
        if pref in same:
            same.remove(pref)
            same.insert(0, pref)
        candidates.append(same)

    image = [-1] * n
    used = [False] * n

    def search(i: int) -> Iterator[dict[str, str]]:
        if i == n:
            yield {g1.vertices[k]: g2.vertices[image[k]] for k in range(n)}
            return
        row1 = g1.gamma[i]
        for j in candidates[i]:
            if used[j]:
                continue
            row2 = g2.gamma[j]
            if any(row1[k] != row2[image[k]] for k in range(i)):
                continue
            image[i], used[j] = j, True
            yield from search(i + 1)
            image[i], used[j] = -1, False

    yield from search(0)


def labeled_isomorphism(g1: OrthGraph, g2: OrthGraph) -> dict[str, str] | None:
    """First isomorphism in search order, or None if the graphs are not isomorphic."""
    return next(isomorphisms(g1, g2), None)


def automorphisms(g: OrthGraph) -> list[dict[str, str]]:
    return list(isomorphisms(g, g))


def independent_pair_free(g: OrthGraph, subset: Iterable[str], k: int) -> bool:
    """True iff every k-subset of ``subset`` contains at least one edge of ``g``."""
    subset = sorted({g.index(v) for v in subset})
    if k > len(subset):
        raise KTooLarge(f"k={k} exceeds the subset size {len(subset)}")
    masks = g.neighbor_masks
    for combo in itertools.combinations(subset, k):
        bits = sum(1 << i for i in combo)
        if not any(masks[i] & bits for i in combo):
            return False
    return True
