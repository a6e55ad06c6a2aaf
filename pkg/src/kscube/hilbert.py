"""Scalars, rays, projectors and dichotomic observables for small Hilbert spaces.

Two scalar backends coexist:

* exact rationals, held as :class:`fractions.Fraction`;
* complex floats, held as Python ``complex``.

Arithmetic between two exact values stays exact; anything touching a float is
promoted to ``complex`` by Python's numeric tower, so the backend of a result
never has to be tracked by hand.  Matrices are tuples of tuples: at d <= 8 the
exactness is worth far more than vectorisation.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from numbers import Complex, Integral, Rational, Real
from typing import Union

import numpy as np

from .errors import (
    DimensionMismatch,
    InputError,
    NotAState,
    NotHermitian,
    ParseError,
    TooLarge,
    ZeroVector,
)

Scalar = Union[Fraction, complex]

MAX_DIMENSION = 8
DEFAULT_EPS = 1e-9


def to_scalar(x) -> Scalar:
    """Coerce ``x`` onto one of the two backends.

    Integers, fractions and ``"p/q"`` strings become exact; floats and complex
    numbers (including numpy scalars) become ``complex``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, Integral, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational number: {x!r}") from exc
    if isinstance(x, (Real, Complex, np.floating, np.complexfloating)):
        return complex(x)
    raise ParseError(f"cannot interpret {x!r} as a scalar")


def is_exact(x: Scalar) -> bool:
    return isinstance(x, Fraction)


def conj(x: Scalar) -> Scalar:
    return x if isinstance(x, Fraction) else x.conjugate()


def is_zero(x: Scalar, eps: float = DEFAULT_EPS) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= eps


def real_value(x: Scalar) -> Fraction | float:
    """Drop the (negligible) imaginary part of a float scalar; exact values pass through."""
    if isinstance(x, Fraction):
        return x
    return float(x.real)


# ---------------------------------------------------------------------------
# rays


@dataclass(frozen=True)
class Ray:
    """A projective vector, stored in canonical form.

    Build rays with :func:`canonicalize_ray`; the constructor does not
    canonicalize.
    """

    components: tuple[Scalar, ...]
    label: str = ""

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.components)

    def vector(self) -> np.ndarray:
        return np.array([complex(c) for c in self.components], dtype=complex)

    def norm_squared(self) -> Scalar:
        return sum((conj(c) * c for c in self.components), Fraction(0))

    def relabel(self, label: str) -> Ray:
        return Ray(self.components, label)

    def __str__(self) -> str:
        body = ", ".join(_format_component(c) for c in self.components)
        return f"{self.label}=({body})" if self.label else f"({body})"


def _format_component(c: Scalar) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return f"{c.real:.6g}{c.imag:+.6g}j"


def canonicalize_ray(components: Sequence, dimension: int | None = None, label: str = "") -> Ray:
    """Return the canonical representative of the ray spanned by ``components``.

    Exact input: denominators cleared, divided by the gcd, first nonzero entry
    made positive.  Float input: unit norm, global phase rotated so the first
    non-negligible entry is real positive.

    >>> canonicalize_ray([0, 2, -2], 3)
    Ray(components=(Fraction(0, 1), Fraction(1, 1), Fraction(-1, 1)), label='')
    """
    values = [to_scalar(c) for c in components]
    if dimension is None:
        dimension = len(values)
    if len(values) != dimension:
        raise DimensionMismatch(f"expected {dimension} components, got {len(values)}")
    if dimension < 1:
        raise DimensionMismatch("dimension must be positive")
    if dimension > MAX_DIMENSION:
        raise TooLarge(f"dimension {dimension} exceeds the supported maximum {MAX_DIMENSION}")

    if all(isinstance(v, Fraction) for v in values):
        if all(v == 0 for v in values):
            raise ZeroVector("all components are zero")
        scale = math.lcm(*(v.denominator for v in values))
        ints = [int(v * scale) for v in values]
        g = math.gcd(*ints)
        ints = [i // g for i in ints]
        if next(i for i in ints if i != 0) < 0:
            ints = [-i for i in ints]
        return Ray(tuple(Fraction(i) for i in ints), label)

    vec = np.array([complex(v) for v in values], dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0 or not np.isfinite(norm):
        raise ZeroVector("all components are zero")
    # Both steps are skipped on already-canonical input so canonicalization is idempotent bit for bit.
    if abs(norm - 1.0) > 4e-16:
        vec = vec / norm
    k = next(i for i, c in enumerate(vec) if abs(c) > DEFAULT_EPS)
    lead = vec[k]
    if lead.imag != 0 or lead.real < 0:
        vec = vec * (abs(lead) / lead)
        vec[k] = abs(lead)
    return Ray(tuple(complex(c) for c in vec), label)


def inner_product(a: Ray, b: Ray) -> Scalar:
    """<a|b>, conjugate-linear in ``a``."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"rays of dimension {a.dimension} and {b.dimension}")
    return sum((conj(x) * y for x, y in zip(a.components, b.components)), Fraction(0))


def overlap(a: Ray, b: Ray) -> float:
    """Normalized squared overlap |<a|b>|^2 / (<a|a><b|b>) as a float in [0, 1]."""
    ip = complex(inner_product(a, b))
    return abs(ip) ** 2 / (float(real_value(a.norm_squared())) * float(real_value(b.norm_squared())))


@dataclass(frozen=True)
class RaySet:
    """Labeled rays sharing one dimension."""

    rays: tuple[Ray, ...]
    name: str = ""

    def __post_init__(self):
        if not self.rays:
            raise InputError("a ray set needs at least one ray")
        dims = {r.dimension for r in self.rays}
        if len(dims) != 1:
            raise DimensionMismatch(f"rays of mixed dimensions {sorted(dims)}")
        labels = [r.label for r in self.rays]
        dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
        if dupes:
            raise InputError(f"duplicate labels: {dupes}")
        if any(not lab for lab in labels):
            raise InputError("every ray needs a label")

    @classmethod
    def from_components(cls, items: Iterable[tuple[str, Sequence]], name: str = "") -> RaySet:
        return cls(tuple(canonicalize_ray(comps, label=label) for label, comps in items), name)

    @property
    def dimension(self) -> int:
        return self.rays[0].dimension

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.rays)

    @property
    def exact(self) -> bool:
        return all(r.exact for r in self.rays)

    def __len__(self) -> int:
        return len(self.rays)

    def __iter__(self) -> Iterator[Ray]:
        return iter(self.rays)

    def __contains__(self, label: str) -> bool:
        return any(r.label == label for r in self.rays)

    def __getitem__(self, label: str) -> Ray:
        for r in self.rays:
            if r.label == label:
                return r
        raise KeyError(label)

    def select(self, labels: Iterable[str]) -> RaySet:
        return RaySet(tuple(self[lab] for lab in labels), self.name)

    def without(self, *labels: str) -> RaySet:
        drop = set(labels)
        return RaySet(tuple(r for r in self.rays if r.label not in drop), self.name)


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class Operator:
    """A d x d matrix of scalars."""

    rows: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        d = len(self.rows)
        if d == 0 or any(len(r) != d for r in self.rows):
            raise DimensionMismatch("operators must be square and nonempty")
        if d > MAX_DIMENSION:
            raise TooLarge(f"dimension {d} exceeds the supported maximum {MAX_DIMENSION}")

    @classmethod
    def from_rows(cls, rows) -> Operator:
        if isinstance(rows, Operator):
            return cls(rows.rows)
        return cls(tuple(tuple(to_scalar(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, d: int) -> Operator:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)))

    @classmethod
    def zero(cls, d: int) -> Operator:
        return cls(tuple(tuple(Fraction(0) for _ in range(d)) for _ in range(d)))

    @property
    def dimension(self) -> int:
        return len(self.rows)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for row in self.rows for x in row)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def _check(self, other: Operator) -> None:
        if other.dimension != self.dimension:
            raise DimensionMismatch(f"operators of dimension {self.dimension} and {other.dimension}")

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> Operator:
        return Operator(tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c) -> Operator:
        c = to_scalar(c)
        return Operator(tuple(tuple(c * a for a in r) for r in self.rows))

    def __mul__(self, c) -> Operator:
        return self.scale(c)

    __rmul__ = __mul__

    def _integer_rows(self) -> tuple[list[list[int]], int]:
        den = math.lcm(*(x.denominator for row in self.rows for x in row))
        return [[x.numerator * (den // x.denominator) for x in row] for row in self.rows], den

    def __matmul__(self, other: Operator) -> Operator:
        self._check(other)
        if self.exact and other.exact:
            # one common denominator per factor; only the d*d results become Fractions
            a, da = self._integer_rows()
            b, db = other._integer_rows()
            cols = list(zip(*b))
            den = da * db
            return Operator(tuple(tuple(Fraction(sum(x * y for x, y in zip(r, col)), den) for col in cols) for r in a))
        cols = list(zip(*other.rows))
        return Operator(
            tuple(tuple(sum((a * b for a, b in zip(r, col)), Fraction(0)) for col in cols) for r in self.rows)
        )

    def dagger(self) -> Operator:
        return Operator(tuple(tuple(conj(a) for a in col) for col in zip(*self.rows)))

    def trace(self) -> Scalar:
        return sum((self.rows[i][i] for i in range(self.dimension)), Fraction(0))

    def is_hermitian(self, eps: float = DEFAULT_EPS) -> bool:
        d = self.dimension
        return all(is_zero(self.rows[i][j] - conj(self.rows[j][i]), eps) for i in range(d) for j in range(i, d))

    def is_zero(self, eps: float = DEFAULT_EPS) -> bool:
        """Exact zero test on exact matrices; Frobenius norm <= eps otherwise."""
        if self.exact:
            return all(x == 0 for row in self.rows for x in row)
        return float(np.linalg.norm(self.to_numpy())) <= eps

    def commutes_with(self, other: Operator, eps: float = DEFAULT_EPS) -> bool:
        return (self @ other - other @ self).is_zero(eps)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.rows], dtype=complex)

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(_format_component(x) for x in r) + "]" for r in self.rows)


class DensityMatrix(Operator):
    """An operator that passed :func:`validate_density`."""


def _integer_components(r: Ray) -> list[int] | None:
    if r.exact and all(c.denominator == 1 for c in r.components):
        return [c.numerator for c in r.components]
    return None


def projector(r: Ray) -> Operator:
    """|r><r| / <r|r>."""
    v = _integer_components(r)
    if v is not None:
        n = sum(a * a for a in v)
        return Operator(tuple(tuple(Fraction(a * b, n) for b in v) for a in v))
    n = r.norm_squared()
    return Operator(tuple(tuple(a * conj(b) / n for b in r.components) for a in r.components))


def observable(r: Ray) -> Operator:
    """The dichotomic observable I - 2 P_r: eigenvalue -1 on r, +1 on its complement."""
    v = _integer_components(r)
    if v is not None:
        n = sum(a * a for a in v)
        d = len(v)
        return Operator(tuple(tuple(Fraction(n * (i == j) - 2 * v[i] * v[j], n) for j in range(d)) for i in range(d)))
    return Operator.identity(r.dimension) - projector(r).scale(2)


def linear_combination(terms: Iterable[tuple[Scalar, Operator]], d: int) -> Operator:
    """sum_k c_k O_k; exact terms are accumulated over one integer common denominator."""
    acc = [[0] * d for _ in range(d)]
    den = 1
    rest = Operator.zero(d)
    for c, op in terms:
        if op.dimension != d:
            raise DimensionMismatch(f"operators of dimension {d} and {op.dimension}")
        c = to_scalar(c)
        if not (isinstance(c, Fraction) and op.exact):
            rest = rest + op.scale(c)
            continue
        rows, od = op._integer_rows()
        e = od * c.denominator
        common = math.lcm(den, e)
        up, k = common // den, c.numerator * (common // e)
        acc = [[a * up + k * x for a, x in zip(ar, r)] for ar, r in zip(acc, rows)]
        den = common
    exact = Operator(tuple(tuple(Fraction(a, den) for a in row) for row in acc))
    return exact if rest.exact and rest.is_zero() else exact + rest


def sum_of_projectors(rays: Iterable[Ray]) -> Operator:
    rays = list(rays)
    if not rays:
        raise InputError("need at least one ray")
    d = rays[0].dimension
    if any(r.dimension != d for r in rays):
        raise DimensionMismatch("rays of mixed dimensions")
    return linear_combination(((1, projector(r)) for r in rays), d)


def identity_multiple(op: Operator, eps: float = DEFAULT_EPS) -> Scalar | None:
    """Return c if ``op == c * I`` (exactly, or within eps for floats), else None."""
    d = op.dimension
    c = op.rows[0][0]
    for i in range(d):
        for j in range(d):
            expected = c if i == j else 0
            if not is_zero(op.rows[i][j] - expected, eps):
                return None
    return c


def _as_density(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return validate_density(rho)


def expectation(op: Operator, rho, eps: float = DEFAULT_EPS) -> Fraction | float:
    """trace(rho @ op) for Hermitian ``op``; exact when both arguments are exact."""
    rho = _as_density(rho)
    if op.dimension != rho.dimension:
        raise DimensionMismatch(f"operator of dimension {op.dimension}, state of dimension {rho.dimension}")
    if not op.is_hermitian(eps):
        raise NotHermitian("expectation values need a Hermitian operator")
    return real_value((rho @ op).trace())


def _determinant(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def _exact_psd(op: Operator) -> bool:
    # All principal minors, not just the leading ones: a symmetric matrix with
    # nonnegative leading minors can still be indefinite when one vanishes.
    d = op.dimension
    for k in range(1, d + 1):
        for idx in itertools.combinations(range(d), k):
            minor = [[op.rows[i][j] for j in idx] for i in idx]
            if _determinant(minor) < 0:
                return False
    return True


def validate_density(matrix, eps: float = DEFAULT_EPS) -> DensityMatrix:
    """Check that ``matrix`` is a density matrix and return it as one.

    Raises :class:`NotAState` listing every violated condition among
    ``hermitian``, ``trace`` and ``positivity``.
    """
    op = Operator.from_rows(np.asarray(matrix).tolist() if isinstance(matrix, np.ndarray) else matrix)
    violations = []
    hermitian = op.is_hermitian(eps)
    if not hermitian:
        violations.append("hermitian")
    if not is_zero(op.trace() - 1, eps):
        violations.append("trace")
    if op.exact and hermitian:
        positive = _exact_psd(op)
    else:
        a = op.to_numpy()
        positive = float(np.linalg.eigvalsh((a + a.conj().T) / 2).min()) >= -eps
    if not positive:
        violations.append("positivity")
    if violations:
        raise NotAState(violations)
    return DensityMatrix(op.rows)


def pure_state(components: Sequence) -> DensityMatrix:
    """|psi><psi| / <psi|psi> as a validated density matrix."""
    return validate_density(projector(canonicalize_ray(components)))


def maximally_mixed(d: int) -> DensityMatrix:
    return validate_density(Operator.identity(d).scale(Fraction(1, d)))
