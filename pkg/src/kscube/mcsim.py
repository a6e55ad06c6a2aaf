"""Monte Carlo estimation of inequality values from simulated measurements.

Every term of an inequality (a single observable or a compatible pair) is
estimated on its own subensemble.  The random stream for term ``k`` is
numpy's PCG64 seeded with ``SeedSequence(seed, spawn_key=(k,))``, so a report
depends only on the seed and never on the order in which terms are sampled.

Pair outcomes are drawn from the exact joint distribution
``P(a, b) = tr(rho Pi_a^u Pi_b^v)`` with ``Pi_-1 = P_r`` and
``Pi_+1 = I - P_r``.  For commuting observables this equals the statistics of
ideal sequential measurements in either order, so no state-update step is
simulated.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import HVModel, Inequality, SignAssignment
from .errors import InputError, NonCommutingPair, PlanMismatch
from .hilbert import (
    DEFAULT_EPS,
    DensityMatrix,
    Operator,
    Ray,
    RaySet,
    Scalar,
    projector,
    real_value,
    to_scalar,
    validate_density,
)

SEED_MASK = (1 << 64) - 1


def term_rng(seed: int, index: int) -> np.random.Generator:
    """Independent substream for term ``index``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed & SEED_MASK, spawn_key=(index,))))


def random_pure_state(d: int, seed: int) -> DensityMatrix:
    """Haar-random pure state: a normalized complex Gaussian vector drawn from PCG64(seed)."""
    rng = np.random.default_rng(seed & SEED_MASK)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return validate_density(np.outer(v, v.conj()))


def _outcome_projectors(r: Ray) -> dict[int, Operator]:
    p = projector(r)
    return {-1: p, 1: Operator.identity(r.dimension) - p}


def single_distribution(rho: DensityMatrix, r: Ray) -> dict[int, Scalar | float]:
    """Outcome probabilities of A_r = I - 2 P_r; -1 means the projector fired."""
    return {a: real_value((rho @ pi).trace()) for a, pi in _outcome_projectors(r).items()}


def joint_distribution(rho: DensityMatrix, u: Ray, v: Ray, eps: float = DEFAULT_EPS) -> dict[tuple[int, int], Scalar | float]:
    """Exact joint outcome distribution of the compatible pair (A_u, A_v)."""
    pu, pv = _outcome_projectors(u), _outcome_projectors(v)
    if not pu[-1].commutes_with(pv[-1], eps):
        raise NonCommutingPair(u.label, v.label)
    return {(a, b): real_value((rho @ pu[a] @ pv[b]).trace()) for a in (-1, 1) for b in (-1, 1)}


def _probabilities(values) -> np.ndarray:
    p = np.array([float(x) for x in values], dtype=float)
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def sample_pair(rho: DensityMatrix, u: Ray, v: Ray, rng: np.random.Generator) -> tuple[int, int]:
    """One draw of the outcome pair (a, b) of a sequential measurement of A_u then A_v."""
    dist = joint_distribution(rho, u, v)
    keys = list(dist)
    k = rng.choice(len(keys), p=_probabilities(dist.values()))
    return keys[k]


@dataclass(frozen=True)
class MeasurementPlan:
    terms: tuple[tuple[str, ...], ...]
    shots_per_term: int
    seed: int

    def __post_init__(self):
        if self.shots_per_term < 1:
            raise InputError("shots_per_term must be positive")
        for t in self.terms:
            if len(t) not in (1, 2) or (len(t) == 2 and t[0] == t[1]):
                raise InputError(f"malformed plan term {t}")

    @classmethod
    def for_inequality(cls, ineq: Inequality, shots_per_term: int, seed: int) -> MeasurementPlan:
        """One term per nonzero linear coefficient, then one per nonzero pair weight."""
        terms = [(v,) for v, c in zip(ineq.vertices, ineq.linear) if c != 0]
        terms += [(u, v) for u, v, _ in ineq.nonzero_pairs()]
        return cls(tuple(terms), shots_per_term, seed)


@dataclass(frozen=True)
class TermEstimate:
    term: tuple[str, ...]
    coefficient: float
    mean: float
    stderr: float


@dataclass(frozen=True)
class EstimateReport:
    terms: tuple[TermEstimate, ...]
    estimate: float
    stderr: float
    seed: int
    shots_per_term: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["terms"] = [dict(t, term=list(t["term"])) for t in d["terms"]]
        return d


def _coefficients(ineq: Inequality, plan: MeasurementPlan) -> list[float]:
    expected = {(v,) for v, c in zip(ineq.vertices, ineq.linear) if c != 0}
    expected |= {frozenset((u, v)) for u, v, _ in ineq.nonzero_pairs()}
    given = {t if len(t) == 1 else frozenset(t) for t in plan.terms}
    if given != expected or len(plan.terms) != len(given):
        raise PlanMismatch("the plan must cover exactly the nonzero terms of the inequality, once each")
    coefs = []
    for t in plan.terms:
        if len(t) == 1:
            coefs.append(float(real_value(ineq.coefficient(t[0]))))
        else:
            coefs.append(2.0 * float(real_value(ineq.weight(*t))))
    return coefs


def _term_value(outcome: Sequence[int], variables: str) -> int:
    if variables == "ks":
        return math.prod((1 - a) // 2 for a in outcome)
    return math.prod(outcome)


def _summarize(counts: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    n = int(counts.sum())
    mean = float(counts @ values) / n
    if n < 2:
        return mean, 0.0
    var = float(counts @ (values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def _combine(plan: MeasurementPlan, coefs: list[float], stats: list[tuple[float, float]]) -> EstimateReport:
    terms = tuple(TermEstimate(t, c, m, s) for t, c, (m, s) in zip(plan.terms, coefs, stats))
    estimate = math.fsum(c * m for c, (m, _) in zip(coefs, stats))
    stderr = math.sqrt(math.fsum((c * s) ** 2 for c, (_, s) in zip(coefs, stats)))
    return EstimateReport(terms, estimate, stderr, plan.seed, plan.shots_per_term)


def estimate_quantum(rho: DensityMatrix, ineq: Inequality, rs: RaySet, plan: MeasurementPlan) -> EstimateReport:
    """Estimate the inequality's left-hand side from simulated subensembles prepared in ``rho``."""
    rho = rho if isinstance(rho, DensityMatrix) else validate_density(rho)
    coefs = _coefficients(ineq, plan)
    stats = []
    for k, t in enumerate(plan.terms):
        if len(t) == 1:
            dist = {(a,): p for a, p in single_distribution(rho, rs[t[0]]).items()}
        else:
            dist = joint_distribution(rho, rs[t[0]], rs[t[1]])
        outcomes = list(dist)
        values = np.array([_term_value(o, ineq.variables) for o in outcomes], dtype=float)
        counts = term_rng(plan.seed, k).multinomial(plan.shots_per_term, _probabilities(dist.values()))
        stats.append(_summarize(counts, values))
    return _combine(plan, coefs, stats)


def estimate_hv(model: HVModel, ineq: Inequality, plan: MeasurementPlan) -> EstimateReport:
    """Estimate the same quantity when every shot draws a hidden variable from ``model``."""
    if set(ineq.vertices) - set(model.vertices):
        raise InputError("the model does not assign every inequality vertex")
    coefs = _coefficients(ineq, plan)
    weights = _probabilities(real_value(to_scalar(w)) for w in model.weights)
    stats = []
    for k, t in enumerate(plan.terms):
        values = np.array([_term_value([a[v] for v in t], ineq.variables) for a in model.support], dtype=float)
        counts = term_rng(plan.seed, k).multinomial(plan.shots_per_term, weights)
        stats.append(_summarize(counts, values))
    return _combine(plan, coefs, stats)


def random_hv_model(vertices: Sequence[str], rng: np.random.Generator, max_support: int = 8) -> HVModel:
    """Random finite model: 1..max_support random sign assignments with Dirichlet weights."""
    size = int(rng.integers(1, max_support + 1))
    signs = rng.choice([-1, 1], size=(size, len(vertices)))
    weights = rng.dirichlet(np.ones(size))
    weights = weights / weights.sum()
    support = tuple(SignAssignment(tuple(vertices), tuple(int(s) for s in row)) for row in signs)
    return HVModel(support, tuple(float(w) for w in weights))
