"""The built-in 13-ray qutrit set and the label groups used throughout."""

from __future__ import annotations

from functools import lru_cache

from .hilbert import RaySet

NAME = "yu-oh-13"

# Canonical vertex order; adjacency matrices, bitmasks and reports depend on it.
Z_LABELS = ("z1", "z2", "z3")
Y_MINUS_LABELS = ("y1-", "y2-", "y3-")
Y_PLUS_LABELS = ("y1+", "y2+", "y3+")
H_LABELS = ("h0", "h1", "h2", "h3")
Y_LABELS = Y_MINUS_LABELS + Y_PLUS_LABELS
LABELS = Z_LABELS + Y_MINUS_LABELS + Y_PLUS_LABELS + H_LABELS

TRIPLES = {
    "z1": (1, 0, 0),
    "z2": (0, 1, 0),
    "z3": (0, 0, 1),
    "y1-": (0, 1, -1),
    "y2-": (1, 0, -1),
    "y3-": (1, -1, 0),
    "y1+": (0, 1, 1),
    "y2+": (1, 0, 1),
    "y3+": (1, 1, 0),
    "h0": (1, 1, 1),
    "h1": (-1, 1, 1),
    "h2": (1, -1, 1),
    "h3": (1, 1, -1),
}


@lru_cache(maxsize=None)
def standard_rays() -> RaySet:
    """The 13 rays read off the surface points of a 3x3x3 cube, in canonical order."""
    return RaySet.from_components(((label, TRIPLES[label]) for label in LABELS), name=NAME)


@lru_cache(maxsize=None)
def standard_graph():
    from .orthograph import build_graph

    return build_graph(standard_rays())


BUILTIN_SETS = {NAME: standard_rays}
