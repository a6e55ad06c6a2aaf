"""Verification reports rendered as JSON and as text from one dictionary.

Numbers computed exactly are stored as ``{"value": "p/q", "exact": true}``;
floats as ``{"value": <float>, "exact": false}``.  The text rendering prints
the same ``value`` tokens, so both renderings agree digit for digit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from . import __version__

STATUSES = ("pass", "fail", "skip", "info")


def number(x) -> dict:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return {"value": str(int(x)), "exact": True}
    if isinstance(x, Fraction):
        return {"value": str(x), "exact": True}
    if isinstance(x, complex):
        x = x.real
    return {"value": float(x), "exact": False}


def _is_number(obj) -> bool:
    return isinstance(obj, dict) and set(obj) == {"value", "exact"}


@dataclass
class Check:
    id: str
    claim: str
    status: str
    values: dict = field(default_factory=dict)
    message: str | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    def to_dict(self) -> dict:
        return {"id": self.id, "claim": self.claim, "status": self.status, "values": self.values, "message": self.message}


def verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


@dataclass
class Report:
    command: str
    argv: list[str]
    inputs: dict[str, dict] = field(default_factory=dict)
    seed: int | None = None
    checks: list[Check] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    error: dict | None = None

    def add(self, id: str, claim: str, status: str | bool, message: str | None = None, **values) -> Check:
        if isinstance(status, bool):
            status = verdict(status)
        c = Check(id, claim, status, values, message)
        self.checks.append(c)
        return c

    def fail_with(self, exc: Exception, exit_code: int) -> None:
        self.error = {"type": type(exc).__name__, "message": str(exc), "exit_code": exit_code}
        pairs = getattr(exc, "pairs", None)
        if pairs:
            self.error["pairs"] = [list(p) for p in pairs]

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.status != "fail" for c in self.checks)

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return self.error["exit_code"]
        return 0 if self.passed else 1

    def to_dict(self) -> dict:
        return {
            "tool": "kscube",
            "version": __version__,
            "command": self.command,
            "argv": list(self.argv),
            "inputs": self.inputs,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
            "results": self.results,
            "error": self.error,
            "passed": self.passed,
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"kscube {d['command']}  ({'PASS' if d['passed'] else 'FAIL'}, exit {d['exit_code']})"]
        for role, info in sorted(d["inputs"].items()):
            sha = info.get("sha256")
            lines.append(f"  input {role}: {info['source']}" + (f"  sha256={sha[:16]}" if sha else ""))
        if d["seed"] is not None:
            lines.append(f"  seed: {d['seed']}")
        for c in d["checks"]:
            lines.append(f"[{c['status'].upper():4}] {c['id']}: {c['claim']}")
            if c["message"]:
                lines.append(f"         {c['message']}")
            lines += [f"         {k} = {v}" for k, v in flatten(c["values"])]
        if d["results"]:
            lines.append("results:")
            lines += [f"  {k} = {v}" for k, v in flatten(d["results"])]
        if d["error"]:
            lines.append(f"error: {d['error']['type']}: {d['error']['message']}")
        return "\n".join(lines) + "\n"


def _token(value) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value)


def flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    """(dotted path, rendered value) pairs; number objects render as their bare value."""
    if _is_number(obj):
        return [(prefix, _token(obj["value"]))]
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        out = []
        for i, x in enumerate(obj):
            out += flatten(x, f"{prefix}[{i}]")
        return out
    if isinstance(obj, list):
        return [(prefix, "[" + ", ".join(_token(x) for x in obj) + "]")]
    return [(prefix, _token(obj))]


def schema() -> dict:
    return json.loads(resources.files("kscube").joinpath("data/report.schema.json").read_text())
