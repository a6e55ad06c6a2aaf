"""JSON file formats for ray sets, inequalities, hidden-variable models and states; DOT output.

Exact numbers travel as ``"p/q"`` strings and complex floats as ``[re, im]``
pairs.  Every ``parse_*`` has an ``emit_*`` partner with
``parse(emit(x)) == x``.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import HVModel, Inequality, SignAssignment, magic_cube_inequality
from .corpus import BUILTIN_SETS
from .errors import KSError, ParseError
from .hilbert import DensityMatrix, Operator, RaySet, Scalar, canonicalize_ray, maximally_mixed, validate_density
from .orthograph import OrthGraph, build_graph

PRESETS = ("magic-cube",)


def _require(doc: Mapping, key: str, kind=None):
    if not isinstance(doc, Mapping) or key not in doc:
        raise ParseError(f"missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"field {key!r} has the wrong type")
    return value


def encode_scalar(x: Scalar):
    if isinstance(x, Fraction):
        return str(x)
    return [float(x.real), float(x.imag)]


def decode_scalar(raw, field: str = "rational") -> Scalar:
    if field == "rational":
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            raise ParseError(f"rational entries must be 'p/q' strings, got {raw!r}")
        try:
            return Fraction(str(raw))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {raw!r}") from exc
    if field == "complex":
        if (
            not isinstance(raw, (list, tuple))
            or len(raw) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw)
        ):
            raise ParseError(f"complex entries must be [re, im] pairs, got {raw!r}")
        return complex(float(raw[0]), float(raw[1]))
    raise ParseError(f"unknown field {field!r}")


def load_json(path: str | Path) -> tuple[object, str]:
    """Parsed document and the sha256 of the raw bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(raw), hashlib.sha256(raw).hexdigest()
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def digest(doc) -> str:
    return hashlib.sha256(dumps(doc).encode()).hexdigest()


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# ray sets


def parse_ray_set(doc) -> RaySet:
    dim = _require(doc, "dimension", int)
    field = doc.get("field", "rational")
    rays = _require(doc, "rays", list)
    items = []
    for entry in rays:
        label = _require(entry, "label", str)
        comps = _require(entry, "components", list)
        if len(comps) != dim:
            raise ParseError(f"ray {label!r} has {len(comps)} components, expected {dim}")
        values = [decode_scalar(c, field) for c in comps]
        try:
            items.append(canonicalize_ray(values, dim, label))
        except KSError as exc:
            raise ParseError(f"ray {label!r}: {exc}") from exc
    try:
        return RaySet(tuple(items), str(doc.get("name", "")))
    except KSError as exc:
        raise ParseError(str(exc)) from exc


def emit_ray_set(rs: RaySet) -> dict:
    field = "rational" if rs.exact else "complex"
    rays = []
    for r in rs:
        comps = r.components if field == "rational" else [complex(c) for c in r.components]
        rays.append({"label": r.label, "components": [encode_scalar(c) for c in comps]})
    return {"name": rs.name, "dimension": rs.dimension, "field": field, "rays": rays}


def resolve_ray_set(source: str) -> tuple[RaySet, dict]:
    """A built-in name or a path; returns the set and an input record with its digest."""
    if source in BUILTIN_SETS:
        rs = BUILTIN_SETS[source]()
        return rs, {"source": f"builtin:{source}", "sha256": digest(emit_ray_set(rs))}
    doc, sha = load_json(source)
    return parse_ray_set(doc), {"source": str(source), "sha256": sha}


# ---------------------------------------------------------------------------
# inequalities


def parse_inequality(doc, rays: RaySet | None = None, graph: OrthGraph | None = None) -> Inequality:
    """Parse an inequality document; presets are expanded over the graph of ``rays``."""
    if isinstance(doc, Mapping) and "preset" in doc:
        preset = doc["preset"]
        if preset not in PRESETS:
            raise ParseError(f"unknown preset {preset!r}")
        if graph is None:
            if rays is None:
                raise ParseError("the magic-cube preset needs a ray set")
            graph = build_graph(rays)
        return magic_cube_inequality(graph)
    vertices = _require(doc, "vertices", list)
    if not all(isinstance(v, str) for v in vertices):
        raise ParseError("vertices must be labels")
    linear = {}
    for t in doc.get("linear", []):
        v = _require(t, "vertex", str)
        if v in linear:
            raise ParseError(f"linear coefficient for {v!r} given twice")
        linear[v] = decode_scalar(_require(t, "coefficient"))
    quad = [
        (_require(t, "u", str), _require(t, "v", str), decode_scalar(_require(t, "weight")))
        for t in doc.get("quadratic", [])
    ]
    try:
        return Inequality.build(vertices, linear, quad, doc.get("variables", "sign"), str(doc.get("name", "")))
    except KSError as exc:
        raise ParseError(str(exc)) from exc


def emit_inequality(ineq: Inequality) -> dict:
    if not ineq.exact:
        raise ParseError("only exact inequalities can be written to a file")
    return {
        "name": ineq.name,
        "variables": ineq.variables,
        "vertices": list(ineq.vertices),
        "linear": [{"vertex": v, "coefficient": str(c)} for v, c in zip(ineq.vertices, ineq.linear) if c != 0],
        "quadratic": [{"u": u, "v": v, "weight": str(w)} for u, v, w in ineq.pairs],
    }


def resolve_inequality(source: str, rays: RaySet | None) -> tuple[Inequality, dict]:
    if source in PRESETS:
        doc = {"preset": source}
        return parse_inequality(doc, rays), {"source": f"preset:{source}", "sha256": digest(doc)}
    doc, sha = load_json(source)
    return parse_inequality(doc, rays), {"source": str(source), "sha256": sha}


# ---------------------------------------------------------------------------
# hidden-variable models


def _encode_weight(w):
    if isinstance(w, (int, Fraction)):
        return str(Fraction(w))
    return float(w.real) if isinstance(w, complex) else float(w)


def _decode_weight(raw):
    if isinstance(raw, float):
        return raw
    return decode_scalar(raw)


def parse_hv_model(doc) -> HVModel:
    """``{"vertices": [...], "support": [[+-1, ...] | {"minus": [...]}, ...], "weights": ["p/q", ...]}``."""
    vertices = tuple(_require(doc, "vertices", list))
    support = []
    for entry in _require(doc, "support", list):
        try:
            if isinstance(entry, Mapping):
                support.append(SignAssignment.from_minus(vertices, _require(entry, "minus", list)))
            else:
                support.append(SignAssignment(vertices, tuple(int(s) for s in entry)))
        except (KSError, TypeError, ValueError) as exc:
            raise ParseError(f"bad assignment {entry!r}: {exc}") from exc
    weights = tuple(_decode_weight(w) for w in _require(doc, "weights", list))
    try:
        return HVModel(tuple(support), weights)
    except KSError as exc:
        raise ParseError(str(exc)) from exc


def emit_hv_model(model: HVModel) -> dict:
    return {
        "vertices": list(model.vertices),
        "support": [list(a.signs) for a in model.support],
        "weights": [_encode_weight(w) for w in model.weights],
    }


# ---------------------------------------------------------------------------
# states


def parse_state(doc) -> DensityMatrix:
    field = doc.get("field", "rational") if isinstance(doc, Mapping) else "rational"
    rows = _require(doc, "matrix", list)
    try:
        matrix = [[decode_scalar(x, field) for x in row] for row in rows]
    except TypeError as exc:
        raise ParseError("matrix must be a list of rows") from exc
    return validate_density(matrix)


def emit_state(rho: Operator) -> dict:
    field = "rational" if rho.exact else "complex"
    rows = [[encode_scalar(x if field == "rational" else complex(x)) for x in row] for row in rho.rows]
    return {"dimension": rho.dimension, "field": field, "matrix": rows}


def resolve_state(source: str, d: int) -> tuple[DensityMatrix, dict]:
    """``"mixed"``, ``"random:<seed>"`` (Haar-random pure state) or a path to a state file."""
    from .mcsim import random_pure_state

    if source == "mixed":
        return maximally_mixed(d), {"source": "mixed", "sha256": None}
    if source.startswith("random:"):
        try:
            seed = int(source.split(":", 1)[1])
        except ValueError as exc:
            raise ParseError(f"bad random-state seed in {source!r}") from exc
        return random_pure_state(d, seed), {"source": source, "sha256": None}
    doc, sha = load_json(source)
    return parse_state(doc), {"source": str(source), "sha256": sha}


# ---------------------------------------------------------------------------
# DOT


def to_dot(g: OrthGraph, name: str = "orthogonality") -> str:
    lines = [f'graph "{name}" {{']
    lines += [f'  "{v}";' for v in g.vertices]
    lines += [f'  "{u}" -- "{v}";' for u, v in g.edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"


def complex_matrix(a: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(a)]
