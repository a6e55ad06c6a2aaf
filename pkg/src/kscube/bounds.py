"""Linear-plus-quadratic inequalities: classical bounds and quantum operators.

An inequality's value on a sign assignment ``a`` is

    L(a) = sum_v c_v a_v + sum_{u,v} W_uv a_u a_v

where the quadratic sum runs over *ordered* pairs, so each unordered pair
{u, v} contributes ``2 * W_uv * a_u * a_v``.  Files and constructors take the
unordered weight ``w = W_uv`` once per pair.

Two variable conventions are kept apart and never converted into each other:

* ``"sign"``: variables in {+1, -1}, quantum counterpart ``A_v = I - 2 P_v``;
  classical bound by exhaustive search over the hypercube.
* ``"ks"``: variables in {0, 1}, quantum counterpart ``P_v``; classical bound
  over KS value assignments of the ray set's orthogonality graph.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Literal

import numpy as np

from .coloring import ColoringProblem, KSAssignment, iter_ks
from .corpus import standard_graph
from .errors import GraphMismatch, InputError, NonCommutingPair, TooLarge, Uncolorable, WeightMismatch
from .hilbert import (
    DEFAULT_EPS,
    DensityMatrix,
    Operator,
    RaySet,
    Scalar,
    expectation,
    identity_multiple,
    linear_combination,
    observable,
    projector,
    real_value,
    to_scalar,
)
from .orthograph import OrthGraph, labeled_isomorphism

MAX_VERTICES = 30
MAX_MAXIMIZERS = 1024
DEFAULT_LOW_BITS = 16

Variables = Literal["sign", "ks"]


@dataclass(frozen=True)
class SignAssignment:
    """A total map vertex -> {+1, -1}.

    Assignments are ordered lexicographically over the vertex order with +1
    before -1; :attr:`mask` realizes that order as an integer (first vertex
    is the most significant bit, a set bit means -1).
    """

    vertices: tuple[str, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != len(self.vertices):
            raise InputError("one sign per vertex is required")
        if any(s not in (1, -1) for s in self.signs):
            raise InputError("signs must be +1 or -1")

    @classmethod
    def from_minus(cls, vertices: Sequence[str], minus: Iterable[str]) -> SignAssignment:
        minus = set(minus)
        unknown = minus - set(vertices)
        if unknown:
            raise InputError(f"unknown vertices {sorted(unknown)}")
        return cls(tuple(vertices), tuple(-1 if v in minus else 1 for v in vertices))

    @classmethod
    def from_mask(cls, vertices: Sequence[str], mask: int) -> SignAssignment:
        n = len(vertices)
        return cls(tuple(vertices), tuple(-1 if mask >> (n - 1 - i) & 1 else 1 for i in range(n)))

    @property
    def mask(self) -> int:
        n = len(self.vertices)
        return sum(1 << (n - 1 - i) for i, s in enumerate(self.signs) if s < 0)

    def __getitem__(self, label: str) -> int:
        return self.signs[self.vertices.index(label)]

    def minus(self) -> tuple[str, ...]:
        return tuple(v for v, s in zip(self.vertices, self.signs) if s < 0)

    def flipped(self) -> SignAssignment:
        return SignAssignment(self.vertices, tuple(-s for s in self.signs))

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.vertices, self.signs))


@dataclass(frozen=True)
class Inequality:
    vertices: tuple[str, ...]
    linear: tuple[Scalar, ...]
    pairs: tuple[tuple[str, str, Scalar], ...]
    variables: Variables = "sign"
    classical_bound: Scalar | None = None
    name: str = ""

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("inequality vertices must be unique")
        if len(self.linear) != len(self.vertices):
            raise InputError("one linear coefficient per vertex is required")
        if self.variables not in ("sign", "ks"):
            raise InputError(f"unknown variable convention {self.variables!r}")
        known = set(self.vertices)
        seen = set()
        for u, v, _ in self.pairs:
            if u == v:
                raise InputError(f"quadratic term on the diagonal at {u!r}")
            if u not in known or v not in known:
                raise InputError(f"quadratic term ({u!r}, {v!r}) references an unknown vertex")
            key = frozenset((u, v))
            if key in seen:
                raise InputError(f"quadratic term ({u!r}, {v!r}) given twice")
            seen.add(key)

    @classmethod
    def build(
        cls,
        vertices: Sequence[str],
        linear: Mapping[str, object] | None = None,
        quadratic: Mapping[tuple[str, str], object] | Iterable[tuple[str, str, object]] = (),
        variables: Variables = "sign",
        name: str = "",
    ) -> Inequality:
        """Assemble from sparse maps; ``quadratic`` holds the unordered weight w = W_uv per pair."""
        vertices = tuple(vertices)
        linear = dict(linear or {})
        unknown = set(linear) - set(vertices)
        if unknown:
            raise InputError(f"linear terms reference unknown vertices {sorted(unknown)}")
        lin = tuple(to_scalar(linear.get(v, 0)) for v in vertices)
        if isinstance(quadratic, Mapping):
            items = [(u, v, w) for (u, v), w in quadratic.items()]
        else:
            items = [tuple(t) for t in quadratic]
        pos = {v: i for i, v in enumerate(vertices)}
        pairs = []
        for u, v, w in items:
            w = to_scalar(w)
            if u in pos and v in pos and pos[u] > pos[v]:
                u, v = v, u
            pairs.append((u, v, w))
        pairs.sort(key=lambda t: (pos.get(t[0], -1), pos.get(t[1], -1)))
        return cls(vertices, lin, tuple(pairs), variables, None, name)

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.linear) and all(isinstance(w, Fraction) for *_, w in self.pairs)

    def coefficient(self, v: str) -> Scalar:
        return self.linear[self.vertices.index(v)]

    def weight(self, u: str, v: str) -> Scalar:
        """W_uv (zero when the pair carries no term)."""
        for a, b, w in self.pairs:
            if {a, b} == {u, v}:
                return w
        return Fraction(0)

    def nonzero_pairs(self) -> list[tuple[str, str, Scalar]]:
        return [(u, v, w) for u, v, w in self.pairs if w != 0]

    def value(self, assignment) -> Scalar:
        """L at a sign (or 0/1 for ``"ks"``) assignment: mapping, assignment object, or aligned sequence."""
        x = _values_by_label(self.vertices, assignment)
        total = sum((c * x[v] for v, c in zip(self.vertices, self.linear)), Fraction(0))
        total += sum((2 * w * x[u] * x[v] for u, v, w in self.pairs), Fraction(0))
        return total


def _values_by_label(vertices: Sequence[str], assignment) -> dict[str, int]:
    if isinstance(assignment, (SignAssignment, KSAssignment)):
        assignment = assignment.as_dict()
    if isinstance(assignment, Mapping):
        missing = set(vertices) - set(assignment)
        if missing:
            raise InputError(f"assignment misses vertices {sorted(missing)}")
        return {v: assignment[v] for v in vertices}
    assignment = list(assignment)
    if len(assignment) != len(vertices):
        raise InputError("assignment length does not match the vertex count")
    return dict(zip(vertices, assignment))


def graph_inequality(g: OrthGraph, name: str = "") -> Inequality:
    """sum_v a_v - (1/4) sum_{u,v} Gamma_uv a_u a_v over the vertices of ``g``."""
    quarter = Fraction(-1, 4)
    return Inequality.build(g.vertices, {v: 1 for v in g.vertices}, [(u, v, quarter) for u, v in g.edges()], name=name)


def _require_standard(g: OrthGraph) -> dict[str, str]:
    iso = labeled_isomorphism(standard_graph(), g)
    if iso is None:
        raise GraphMismatch("graph is not isomorphic to the 13-vertex magic-cube graph")
    return iso


def magic_cube_inequality(g: OrthGraph) -> Inequality:
    """The magic-cube inequality on a graph isomorphic to the 13-ray orthogonality graph."""
    _require_standard(g)
    return graph_inequality(g, name="magic-cube")


def subset_inequality(vertices: Sequence[str], subset: Iterable[str], variables: Variables = "ks", name: str = "") -> Inequality:
    """Unit linear form over ``subset``; with ``"ks"`` variables this is the h-sum bound's left-hand side."""
    return Inequality.build(vertices, {v: 1 for v in subset}, variables=variables, name=name)


# ---------------------------------------------------------------------------
# exhaustive hypercube search


@dataclass(frozen=True)
class BoundResult:
    bound: Scalar | float
    maximizers: tuple[SignAssignment, ...]
    maximizer_count: int
    inequality: Inequality

    @property
    def truncated(self) -> bool:
        return self.maximizer_count > len(self.maximizers)


def _integer_form(ineq: Inequality):
    """Scale to integers: returns (denominator D, c*D, W*D as a full symmetric matrix)."""
    n = len(ineq.vertices)
    pos = {v: i for i, v in enumerate(ineq.vertices)}
    if ineq.exact:
        den = math.lcm(1, *(c.denominator for c in ineq.linear), *(w.denominator for *_, w in ineq.pairs))
        lin = [int(c * den) for c in ineq.linear]
        quad = [[0] * n for _ in range(n)]
        for u, v, w in ineq.pairs:
            quad[pos[u]][pos[v]] = quad[pos[v]][pos[u]] = int(w * den)
        return den, lin, quad
    lin = [float(real_value(to_scalar(c))) for c in ineq.linear]
    quad = [[0.0] * n for _ in range(n)]
    for u, v, w in ineq.pairs:
        quad[pos[u]][pos[v]] = quad[pos[v]][pos[u]] = float(real_value(to_scalar(w)))
    return None, lin, quad


def _sign_table(m: int) -> np.ndarray:
    """Row r holds the signs of the m low vertices for low mask r (first low vertex = top bit)."""
    r = np.arange(1 << m, dtype=np.int64)[:, None]
    bits = (r >> np.arange(m - 1, -1, -1, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.float64)


def _solve_chunk(args) -> tuple[float, int, list[int]]:
    lin, quad, high, lo, hi, keep, tol = args
    lin = np.asarray(lin, dtype=np.float64)
    quad = np.asarray(quad, dtype=np.float64)
    n = len(lin)
    m = n - high
    S = _sign_table(m)
    c_low, w_low = lin[high:], quad[high:, high:]
    low_vals = S @ c_low + np.einsum("ij,ij->i", S @ w_low, S)
    cross_w = 2.0 * quad[high:, :high]

    best, count, found = -np.inf, 0, []
    for hmask in range(lo, hi):
        a_h = np.array([-1.0 if hmask >> (high - 1 - i) & 1 else 1.0 for i in range(high)])
        const = float(lin[:high] @ a_h + a_h @ quad[:high, :high] @ a_h) if high else 0.0
        vals = low_vals + S @ (cross_w @ a_h) + const if high else low_vals
        bm = float(vals.max())
        if bm > best + tol:
            best, count, found = bm, 0, []
        if bm >= best - tol:
            idx = np.flatnonzero(vals >= best - tol)
            count += len(idx)
            if len(found) < keep:
                found.extend(int((hmask << m) | i) for i in idx[: keep - len(found)])
    return best, count, found


def classical_bound(
    ineq: Inequality,
    workers: int = 1,
    low_bits: int = DEFAULT_LOW_BITS,
    max_maximizers: int = MAX_MAXIMIZERS,
) -> BoundResult:
    """Exact maximum of L over all sign assignments, with the lexicographically first maximizers.

    The hypercube is split into blocks sharing their first ``n - low_bits``
    signs; each block is evaluated as a vector.  Blocks are independent, so
    ``workers > 1`` farms contiguous ranges of them out to processes; the
    reduction (max, summed tie counts, merged maximizer lists) is the same
    for any partitioning.
    """
    if ineq.variables != "sign":
        raise InputError("classical_bound handles sign variables; use ks_bound for KS variables")
    n = len(ineq.vertices)
    if n > MAX_VERTICES:
        raise TooLarge(f"{n} vertices exceeds the exhaustive limit {MAX_VERTICES}")
    if n == 0:
        empty = SignAssignment((), ())
        return BoundResult(Fraction(0), (empty,), 1, replace(ineq, classical_bound=Fraction(0)))

    den, lin, quad = _integer_form(ineq)
    if den is not None:
        reach = sum(map(abs, lin)) + sum(abs(x) for row in quad for x in row)
        if reach >= 2**52:
            raise TooLarge("coefficients too large for exact evaluation in double precision")
        tol = 0.0
    else:
        reach = sum(map(abs, lin)) + sum(abs(x) for row in quad for x in row)
        tol = 1e-9 * max(1.0, reach)

    m = min(n, max(1, low_bits))
    high = n - m
    blocks = 1 << high
    workers = max(1, min(workers, blocks))
    edges = [blocks * k // workers for k in range(workers + 1)]
    jobs = [(lin, quad, high, edges[k], edges[k + 1], max_maximizers, tol) for k in range(workers)]
    if workers == 1:
        parts = [_solve_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_solve_chunk, jobs))

    best = max(p[0] for p in parts)
    count = 0
    masks: list[int] = []
    for b, c, found in parts:
        if b >= best - tol:
            count += c
            masks.extend(found)
    masks = sorted(masks)[:max_maximizers]

    bound = Fraction(round(best), den) if den is not None else best
    maximizers = tuple(SignAssignment.from_mask(ineq.vertices, k) for k in masks)
    return BoundResult(bound, maximizers, count, replace(ineq, classical_bound=bound))


TABLE_LIMIT = 20


def _mask_signs(n: int) -> np.ndarray:
    if n > TABLE_LIMIT:
        raise TooLarge(f"a full value table over {n} vertices is too large")
    return _sign_table(n).astype(np.int64)


def value_table(ineq: Inequality) -> tuple[int, np.ndarray]:
    """(D, D*L) for every sign assignment in mask order, in exact integer arithmetic."""
    if not ineq.exact or ineq.variables != "sign":
        raise InputError("value tables need an exact inequality over sign variables")
    den, lin, quad = _integer_form(ineq)
    S = _mask_signs(len(ineq.vertices))
    c = np.array(lin, dtype=np.int64)
    W = np.array(quad, dtype=np.int64).reshape(len(lin), len(lin))
    return den, S @ c + np.einsum("ij,ij->i", S @ W, S)


def counting_table(g: OrthGraph) -> np.ndarray:
    """1 + t + f - 2l for every sign assignment of ``g`` in mask order."""
    _require_standard(g)
    minus = (1 - _mask_signs(len(g))) // 2
    deg4 = np.array([g.degree(v) == 4 for v in g.vertices], dtype=np.int64)
    ends = np.array([(g.index(u), g.index(v)) for u, v in g.edges()], dtype=np.int64)
    t = minus.sum(axis=1)
    f = minus @ deg4
    l = (minus[:, ends[:, 0]] * minus[:, ends[:, 1]]).sum(axis=1)  # noqa: E741
    return 1 + t + f - 2 * l


def ks_bound(ineq: Inequality, problem: ColoringProblem) -> tuple[Scalar, KSAssignment]:
    """Maximum of L over the KS value assignments of ``problem`` (0/1 variables)."""
    if ineq.variables != "ks":
        raise InputError("ks_bound handles KS variables")
    missing = set(ineq.vertices) - set(problem.vertices)
    if missing:
        raise InputError(f"inequality vertices {sorted(missing)} are not in the coloring problem")
    best, witness = None, None
    for values in iter_ks(problem):
        x = dict(zip(problem.vertices, values))
        val = ineq.value(x)
        if best is None or val > best:
            best, witness = val, values
    if witness is None:
        raise Uncolorable("the problem admits no KS assignment")
    return best, KSAssignment(problem.vertices, witness)


# ---------------------------------------------------------------------------
# the counting formula


@dataclass(frozen=True)
class SignCounts:
    """Counts behind L = 1 + t + f - 2l on the 13-vertex graph."""

    t: int
    f: int
    l: int  # noqa: E741

    @property
    def value(self) -> int:
        return 1 + self.t + self.f - 2 * self.l


def counting_value(g: OrthGraph, a) -> SignCounts:
    """t = number of -1 signs, f = those on degree-4 vertices, l = edges with both ends -1."""
    _require_standard(g)
    signs = _values_by_label(g.vertices, a)
    minus = {v for v, s in signs.items() if s == -1}
    t = len(minus)
    f = sum(1 for v in minus if g.degree(v) == 4)
    l = sum(1 for u, v in g.edges() if u in minus and v in minus)  # noqa: E741
    return SignCounts(t, f, l)


# ---------------------------------------------------------------------------
# quantum side


def _variable_operators(ineq: Inequality, rs: RaySet) -> dict[str, Operator]:
    missing = [v for v in ineq.vertices if v not in rs]
    if missing:
        raise InputError(f"no ray for vertices {missing}")
    make = observable if ineq.variables == "sign" else projector
    return {v: make(rs[v]) for v in ineq.vertices}


def quantum_operator(ineq: Inequality, rs: RaySet, eps: float = DEFAULT_EPS) -> Operator:
    """sum_v c_v X_v + sum_{u,v} W_uv X_u X_v with X = A (sign) or P (ks).

    Every pair carrying a nonzero weight must commute; otherwise the
    correlation has no quantum meaning and :class:`NonCommutingPair` is raised.
    """
    ops = _variable_operators(ineq, rs)
    terms = [(c, ops[v]) for v, c in zip(ineq.vertices, ineq.linear) if c != 0]
    for u, v, w in ineq.nonzero_pairs():
        uv, vu = ops[u] @ ops[v], ops[v] @ ops[u]
        if not (uv == vu or (uv - vu).is_zero(eps)):
            raise NonCommutingPair(u, v)
        terms += [(w, uv), (w, vu)]
    return linear_combination(terms, rs.dimension)


@dataclass(frozen=True)
class ViolationReport:
    classical_bound: Scalar | float
    classical_kind: Variables
    operator: Operator
    identity_multiple: Scalar | None
    min_eigenvalue: float
    max_eigenvalue: float
    state_value: Scalar | float | None = None

    @property
    def proportional_to_identity(self) -> bool:
        return self.identity_multiple is not None

    @property
    def quantum_value(self) -> Scalar | float | None:
        """The state-independent value when the operator is a multiple of I, else the value at the given state."""
        if self.identity_multiple is not None:
            return real_value(self.identity_multiple)
        return self.state_value

    @property
    def margin(self) -> Scalar | float | None:
        q = self.quantum_value
        return None if q is None else q - self.classical_bound

    @property
    def violated_by_all_states(self) -> bool:
        if self.identity_multiple is not None:
            return real_value(self.identity_multiple) > self.classical_bound
        return self.min_eigenvalue > float(self.classical_bound)

    @property
    def violated(self) -> bool:
        m = self.margin
        return m is not None and m > 0


def violation_report(
    ineq: Inequality,
    rs: RaySet,
    rho: DensityMatrix | None = None,
    bound=None,
    eps: float = DEFAULT_EPS,
) -> ViolationReport:
    """Compare the classical bound with the quantum operator, optionally at a given state."""
    if bound is None:
        if ineq.variables == "sign":
            bound = classical_bound(ineq).bound
        else:
            bound = ks_bound(ineq, ColoringProblem.from_rays(rs))[0]
    op = quantum_operator(ineq, rs, eps)
    spectrum = np.linalg.eigvalsh(op.to_numpy())
    state_value = expectation(op, rho, eps) if rho is not None else None
    return ViolationReport(
        classical_bound=bound,
        classical_kind=ineq.variables,
        operator=op,
        identity_multiple=identity_multiple(op, eps),
        min_eigenvalue=float(spectrum.min()),
        max_eigenvalue=float(spectrum.max()),
        state_value=state_value,
    )


# ---------------------------------------------------------------------------
# noncontextual hidden-variable models


@dataclass(frozen=True)
class HVModel:
    """A finite distribution over deterministic sign assignments."""

    support: tuple[SignAssignment, ...]
    weights: tuple[Scalar, ...]
    eps: float = field(default=DEFAULT_EPS, compare=False)

    def __post_init__(self):
        if len(self.support) != len(self.weights) or not self.support:
            raise WeightMismatch(f"{len(self.support)} assignments but {len(self.weights)} weights")
        weights = [real_value(to_scalar(w)) for w in self.weights]
        if any(w < 0 for w in weights):
            raise WeightMismatch("weights must be nonnegative")
        total = sum(weights)
        if abs(total - 1) > self.eps:
            raise WeightMismatch(f"weights sum to {total}, not 1")
        verts = {a.vertices for a in self.support}
        if len(verts) != 1:
            raise InputError("every assignment of a model must cover the same vertices")

    @classmethod
    def point(cls, a: SignAssignment) -> HVModel:
        return cls((a,), (Fraction(1),))

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.support[0].vertices


def hv_expectation(model: HVModel, ineq: Inequality) -> Scalar | float:
    """sum_lambda p(lambda) L(a^lambda); exact when weights and coefficients are exact."""
    if set(ineq.vertices) - set(model.vertices):
        raise InputError("the model does not assign every inequality vertex")
    total = sum((to_scalar(w) * ineq.value(a.as_dict()) for a, w in zip(model.support, model.weights)), Fraction(0))
    return real_value(total)
