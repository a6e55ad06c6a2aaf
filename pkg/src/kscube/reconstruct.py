"""Carry any realization of the 13-vertex graph back to the standard rays.

The procedure follows the constructive uniqueness argument:

1. rotate so the three z-rays become the computational basis;
2. read the phases t1, t2, t3 off y1+ = (0, t1, 1), y2+ = (1, 0, t2), y3+ = (t3, 1, 0);
3. check |t_k| = 1 and t1 t2 t3 = 1;
4. apply the diagonal unitary that takes h0 to (1, 1, 1);
5. check every image against the standard set.

The standard set is real, so its complex conjugate is itself and the
anti-unitary freedom never produces a second, inequivalent branch.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .corpus import LABELS, standard_rays
from .errors import DimensionMismatch, GraphMismatch, PhaseConstraintViolated, VerificationFailed
from .hilbert import DEFAULT_EPS, RaySet, canonicalize_ray
from .orthograph import build_graph, labeled_isomorphism


@dataclass(frozen=True)
class Realization:
    """Rays plus the map from their labels onto the standard labels."""

    rays: RaySet
    iso: Mapping[str, str]

    @classmethod
    def infer(cls, rays: RaySet, eps: float = DEFAULT_EPS) -> Realization:
        """Use the identity map when the labels are standard, else the first graph isomorphism."""
        if set(rays.labels) == set(LABELS):
            return cls(rays, {v: v for v in rays.labels})
        iso = labeled_isomorphism(build_graph(rays, eps), build_graph(standard_rays()))
        if iso is None:
            raise GraphMismatch("orthogonality graph is not isomorphic to the 13-vertex magic-cube graph")
        return cls(rays, iso)


@dataclass(frozen=True)
class Reconstruction:
    unitary: np.ndarray
    rays: RaySet
    phases: tuple[complex, complex, complex]
    residual: float


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def projective_residual(a: np.ndarray, b: np.ndarray) -> float:
    """1 - |<a,b>|^2 / (|a|^2 |b|^2)."""
    ip = np.vdot(a, b)
    return float(max(0.0, 1.0 - abs(ip) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real)))


def projective_match(a: RaySet, b: RaySet, pairing: Mapping[str, str], eps: float = DEFAULT_EPS) -> tuple[bool, float]:
    """Whether every ray of ``a`` spans the same line as its partner in ``b``; also the worst residual."""
    if len(a) != len(b) or a.dimension != b.dimension:
        raise DimensionMismatch("ray sets differ in size or dimension")
    worst = max(projective_residual(a[u].vector(), b[pairing[u]].vector()) for u in a.labels)
    return worst <= eps, worst


def _check_graph(r: Realization, eps: float) -> None:
    if sorted(r.iso.values()) != sorted(LABELS) or sorted(r.iso) != sorted(r.rays.labels):
        raise GraphMismatch("the vertex map is not a bijection onto the 13 standard labels")
    g = build_graph(r.rays, eps)
    std = build_graph(standard_rays())
    bad = [(u, v) for i, u in enumerate(g.vertices) for v in g.vertices[i + 1:]
           if g.adjacent(u, v) != std.adjacent(r.iso[u], r.iso[v])]
    if bad:
        raise GraphMismatch("orthogonality relations differ from the 13-vertex magic-cube graph", bad)


def canonicalize_realization(r: Realization, eps: float = DEFAULT_EPS) -> Reconstruction:
    """Find the unitary U taking every ray of ``r`` onto its standard counterpart."""
    _check_graph(r, eps)
    by_std = {std: _unit(r.rays[own].vector()) for own, std in r.iso.items()}

    # Step 1: z-rays as columns, each dephased so its largest entry is real positive.
    cols = []
    for k in ("z1", "z2", "z3"):
        z = by_std[k]
        lead = z[np.argmax(np.abs(z))]
        cols.append(z * (abs(lead) / lead))
    w, _, vh = np.linalg.svd(np.column_stack(cols))
    basis = w @ vh  # nearest unitary, equal to the column matrix for exact input
    rotate = basis.conj().T
    img = {k: rotate @ v for k, v in by_std.items()}

    # Step 2: t_k from the y+ rays.
    def ratio(num: complex, den: complex) -> complex:
        if abs(den) <= eps:
            raise PhaseConstraintViolated("a y-ray has a vanishing component where the construction needs a phase")
        return complex(num / den)

    t1 = ratio(img["y1+"][1], img["y1+"][2])
    t2 = ratio(img["y2+"][2], img["y2+"][0])
    t3 = ratio(img["y3+"][0], img["y3+"][1])
    phases = (t1, t2, t3)

    # Step 3.
    worst = max(abs(abs(t) - 1) for t in phases)
    if worst > eps or abs(t1 * t2 * t3 - 1) > eps:
        raise PhaseConstraintViolated(
            f"phases violate |t_k| = 1 and t1 t2 t3 = 1 (|t| deviation {worst:.3g}, product {t1 * t2 * t3:.6g})"
        )

    # Step 4: dephase relative to the first entry of h0 so U is invariant under global phases.
    h0 = img["h0"]
    if np.min(np.abs(h0)) <= eps:
        raise PhaseConstraintViolated("h0 has a vanishing component in the z basis")
    ph = h0 / np.abs(h0)
    dephase = np.diag(ph[0] * ph.conj())
    unitary = dephase @ rotate

    # Step 5.
    std = standard_rays()
    rays = []
    residual = 0.0
    for own, s in r.iso.items():
        image = unitary @ r.rays[own].vector()
        residual = max(residual, projective_residual(image, std[s].vector()))
        rays.append(canonicalize_ray(image, label=s))
    if residual > eps:
        raise VerificationFailed(f"images miss the standard rays (residual {residual:.3g})")
    order = {lab: i for i, lab in enumerate(LABELS)}
    rays.sort(key=lambda ray: order[ray.label])
    return Reconstruction(unitary, RaySet(tuple(rays), std.name), phases, residual)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary (QR of a Ginibre matrix with the phase correction)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def scramble(rs: RaySet, rng: np.random.Generator, unitary: np.ndarray | None = None) -> RaySet:
    """Apply a unitary (random by default) and an independent random phase to every ray.

    The rays are left uncanonicalized so the per-ray phases survive.
    """
    from .hilbert import Ray

    u = random_unitary(rs.dimension, rng) if unitary is None else unitary
    out = []
    for ray in rs:
        phase = np.exp(2j * np.pi * rng.random())
        v = phase * (u @ ray.vector())
        out.append(Ray(tuple(complex(x) for x in v), ray.label))
    return RaySet(tuple(out), rs.name)
