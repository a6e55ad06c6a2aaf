"""The ``kscube`` command: verify, bound, simulate, reconstruct.

Exit codes: 0 success, 1 a verification claim failed, 2 bad input,
3 resource limit.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from fractions import Fraction
from pathlib import Path

from .bounds import (
    counting_table,
    classical_bound,
    graph_inequality,
    hv_expectation,
    ks_bound,
    quantum_operator,
    value_table,
    violation_report,
)
from .coloring import ColoringProblem, enumerate_ks, iter_ks, ks_colorable, max_subset_sum, pairwise_h_exclusion
from .corpus import H_LABELS, NAME, Y_LABELS, Z_LABELS, standard_graph
from .errors import InputError, KSError
from .fileio import (
    PRESETS,
    complex_matrix,
    emit_ray_set,
    load_json,
    parse_hv_model,
    resolve_inequality,
    resolve_ray_set,
    resolve_state,
    to_dot,
)
from .hilbert import DEFAULT_EPS, expectation, identity_multiple, real_value, sum_of_projectors
from .mcsim import MeasurementPlan, estimate_hv, estimate_quantum
from .orthograph import basis_cliques, build_graph, independent_pair_free, labeled_isomorphism
from .reconstruct import Realization, canonicalize_realization
from .report import Report, number

REPORT_DIR_ENV = "KSCUBE_REPORT_DIR"

# Two known maximizers of the magic-cube form, as sets of -1 vertices.
QUOTED_MAXIMIZERS = (("z1", "y2-", "y3+", "h3"), ("z1", "y2-", "y3+", "y1-", "h3"))


def _minus_lists(assignments, limit: int) -> list[list[str]]:
    return [list(a.minus()) for a in assignments[:limit]]


# ---------------------------------------------------------------------------
# verify


def _magic_cube_claims(report: Report, rs, g, problem, iso: dict[str, str], limit: int, workers: int) -> None:
    m = iso.__getitem__

    report.add("graph.edges", "the graph has 24 edges", g.edge_count == 24, edges=g.edge_count)
    degrees = g.degree_multiset()
    report.add(
        "graph.degrees",
        "nine vertices of degree 4 and four of degree 3",
        degrees == {4: 9, 3: 4},
        degrees={str(k): v for k, v in degrees.items()},
    )
    expected = {frozenset(map(m, Z_LABELS))} | {
        frozenset((m(f"z{k}"), m(f"y{k}+"), m(f"y{k}-"))) for k in (1, 2, 3)
    }
    found = {frozenset(b) for b in problem.bases}
    report.add(
        "graph.bases",
        "exactly four complete bases: the z-triangle and each {z_k, y_k+, y_k-}",
        found == expected,
        count=len(problem.bases),
        bases=[list(b) for b in problem.bases],
    )
    deg4 = [v for v in g.vertices if g.degree(v) == 4]
    report.add(
        "graph.independence",
        "every 4 of the degree-4 vertices include an orthogonal pair",
        independent_pair_free(g, deg4, 4),
        subsets_checked=len(list(itertools.combinations(deg4, 4))),
    )

    enum = enumerate_ks(problem, limit)
    report.add(
        "ks.exist",
        "KS value assignments of the 13 rays exist",
        enum.count > 0,
        count=enum.count,
        witnesses_ones=[list(a.ones()) for a in enum.assignments],
    )
    hs = [m(h) for h in H_LABELS]
    h_idx = [problem.vertices.index(h) for h in hs]
    worst = max((sum(values[i] for i in h_idx) for values in iter_ks(problem)), default=None)
    best = max_subset_sum(problem, hs)[0] if enum.count else None
    report.add(
        "ks.h_sum",
        "every KS assignment values at most one h-ray 1, and one is attained",
        worst == 1 and best == 1,
        max_h_sum=best,
    )
    excl = pairwise_h_exclusion(problem)
    report.add(
        "ks.h_pairs",
        "pinning any two h-rays to 1 is contradictory",
        excl.at_most_one,
        cases=[
            {"pair": list(c.pair), "unsat": c.unsat, "forced_ones": list(c.result.forced_ones()), "conflict": c.result.conflict}
            for c in excl.cases
        ],
    )

    sums = {
        "y": (sum_of_projectors(rs[m(v)] for v in Y_LABELS), Fraction(2)),
        "h": (sum_of_projectors(rs[m(v)] for v in H_LABELS), Fraction(4, 3)),
        "z": (sum_of_projectors(rs[m(v)] for v in Z_LABELS), Fraction(1)),
    }
    mults = {k: identity_multiple(op) for k, (op, _) in sums.items()}
    ok = all(mults[k] is not None and abs(complex(mults[k] - want)) <= DEFAULT_EPS for k, (_, want) in sums.items())
    report.add(
        "operators.sums",
        "projector sums: y-rays 2I, h-rays (4/3)I, z-rays I",
        ok,
        **{f"{k}_multiple": (number(real_value(v)) if v is not None else None) for k, v in mults.items()},
    )

    ineq = graph_inequality(g, "magic-cube")
    res = classical_bound(ineq, workers=workers)
    wanted = [frozenset(map(m, a)) for a in QUOTED_MAXIMIZERS]
    present = {frozenset(a.minus()) for a in res.maximizers}
    report.add(
        "bound.classical",
        "the classical bound over all 8192 sign assignments is 8, attained by the quoted maximizers",
        res.bound == 8 and all(w in present for w in wanted),
        bound=number(res.bound),
        maximizer_count=res.maximizer_count,
        maximizers_minus=_minus_lists(res.maximizers, limit),
    )

    den, values = value_table(ineq)
    mismatches = int((values != den * counting_table(g)).sum())
    report.add(
        "bound.counting_formula",
        "L = 1 + t + f - 2l on every sign assignment",
        mismatches == 0,
        assignments=1 << len(g),
        mismatches=mismatches,
    )


def _state_independence(report: Report, rs, g, workers: int):
    """Check the graph inequality's quantum operator; returns the violation report or None if skipped."""
    ineq = graph_inequality(g, "graph")
    try:
        res = classical_bound(ineq, workers=workers)
    except KSError as exc:
        report.add("quantum.state_independent", "the graph inequality is violated by every state", "skip", message=str(exc))
        return None
    vr = violation_report(ineq, rs, bound=res.bound)
    values = {
        "classical_bound": number(res.bound),
        "min_eigenvalue": number(vr.min_eigenvalue),
        "max_eigenvalue": number(vr.max_eigenvalue),
    }
    if vr.identity_multiple is not None:
        values["quantum_value"] = number(real_value(vr.identity_multiple))
        values["margin"] = number(vr.margin)
    ok = vr.proportional_to_identity and vr.violated_by_all_states
    msg = None if vr.proportional_to_identity else "the quantum operator is not a multiple of the identity"
    report.add(
        "quantum.state_independent",
        "sum A_v - (1/4) sum Gamma_uv A_u A_v is a multiple of I exceeding the classical bound",
        ok,
        message=msg,
        **values,
    )
    return vr


def cmd_verify(args, report: Report) -> None:
    rs, info = resolve_ray_set(args.set)
    report.inputs["set"] = info
    g = build_graph(rs, args.eps)
    if args.dot:
        Path(args.dot).write_text(to_dot(g, rs.name or "orthogonality"))
    problem = ColoringProblem(g, tuple(basis_cliques(g, rs.dimension)))
    report.add(
        "graph.summary",
        "orthogonality graph",
        "info",
        vertices=len(g),
        edges=g.edge_count,
        degrees={str(k): v for k, v in g.degree_multiset().items()},
        bases=len(problem.bases),
    )
    iso = labeled_isomorphism(standard_graph(), g) if len(g) == 13 else None
    report.add("graph.magic_cube", "isomorphic to the 13-vertex magic-cube graph", "info", isomorphic=iso is not None)
    if iso is not None:
        _magic_cube_claims(report, rs, g, problem, iso, args.limit, args.workers)
    else:
        witness = ks_colorable(problem)
        report.add(
            "ks.colorable",
            "KS value assignment search",
            "info",
            colorable=not witness.unsat,
            witness_ones=list(witness.witness.ones()) if witness.witness else None,
        )
    vr = _state_independence(report, rs, g, args.workers)
    if iso is not None and vr is not None:
        q = vr.quantum_value
        if rs.exact:
            ok = q == Fraction(25, 3) and vr.margin == Fraction(1, 3)
        else:
            ok = q is not None and abs(q - 25 / 3) <= args.eps and abs(vr.margin - 1 / 3) <= args.eps
        report.add(
            "quantum.magic_cube",
            "quantum value 25/3 against classical bound 8, margin 1/3",
            ok,
            quantum_value=number(q) if q is not None else None,
            margin=number(vr.margin) if q is not None else None,
        )


# ---------------------------------------------------------------------------
# bound


def cmd_bound(args, report: Report) -> None:
    rs = None
    if args.set:
        rs, info = resolve_ray_set(args.set)
        report.inputs["set"] = info
    elif args.ineq in PRESETS:
        rs, info = resolve_ray_set(NAME)
        report.inputs["set"] = info
    ineq, info = resolve_inequality(args.ineq, rs)
    report.inputs["inequality"] = info

    results: dict = {"vertices": len(ineq.vertices), "variables": ineq.variables}
    if ineq.variables == "sign":
        res = classical_bound(ineq, workers=args.workers)
        bound = res.bound
        results["classical"] = {
            "bound": number(bound),
            "maximizer_count": res.maximizer_count,
            "maximizers_minus": _minus_lists(res.maximizers, args.limit),
        }
    else:
        if rs is None:
            raise InputError("KS-variable inequalities need --set to define the KS assignments")
        bound, witness = ks_bound(ineq, ColoringProblem.from_rays(rs))
        results["classical"] = {"bound": number(bound), "witness_ones": list(witness.ones())}
    report.results = results

    if rs is None:
        report.add("bound.quantum", "quantum operator", "skip", message="no ray set given")
        return
    vr = violation_report(ineq, rs, bound=bound, eps=args.eps)
    quantum = {
        "proportional_to_identity": vr.proportional_to_identity,
        "min_eigenvalue": number(vr.min_eigenvalue),
        "max_eigenvalue": number(vr.max_eigenvalue),
        "violated_by_all_states": vr.violated_by_all_states,
    }
    if vr.identity_multiple is not None:
        quantum["identity_multiple"] = number(real_value(vr.identity_multiple))
        quantum["margin"] = number(vr.margin)
    results["quantum"] = quantum


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args, report: Report) -> None:
    rs, info = resolve_ray_set(args.set)
    report.inputs["set"] = info
    ineq, info = resolve_inequality(args.ineq, rs)
    report.inputs["inequality"] = info
    report.seed = args.seed
    plan = MeasurementPlan.for_inequality(ineq, args.shots, args.seed)

    if args.model == "qm":
        rho, info = resolve_state(args.state, rs.dimension)
        report.inputs["state"] = info
        est = estimate_quantum(rho, ineq, rs, plan)
        target = expectation(quantum_operator(ineq, rs), rho)
    elif args.model.startswith("hv:"):
        doc, sha = load_json(args.model[3:])
        report.inputs["model"] = {"source": args.model[3:], "sha256": sha}
        model = parse_hv_model(doc)
        est = estimate_hv(model, ineq, plan)
        target = hv_expectation(model, ineq)
    else:
        raise InputError(f"unknown model {args.model!r}; use 'qm' or 'hv:<path>'")

    report.results = {
        "model": "qm" if args.model == "qm" else "hv",
        "shots_per_term": args.shots,
        "estimate": number(est.estimate),
        "stderr": number(est.stderr),
        "expected": number(target),
        "terms": [
            {"term": list(t.term), "coefficient": number(t.coefficient), "mean": number(t.mean), "stderr": number(t.stderr)}
            for t in est.terms
        ],
    }
    gap = abs(est.estimate - float(target))
    ok = gap <= 5 * est.stderr if est.stderr > 0 else gap <= 1e-9
    report.add("simulate.consistent", "estimate within 5 standard errors of the exact value", ok, deviation=number(gap))

    if ineq.variables == "sign" and len(ineq.vertices) <= 30:
        bound = classical_bound(ineq).bound
        if args.model == "qm":
            report.add(
                "simulate.violation",
                "estimated value compared with the classical bound",
                "info",
                classical_bound=number(bound),
                excess=number(est.estimate - float(bound)),
            )
        else:
            report.add(
                "simulate.below_bound",
                "hidden-variable estimate does not exceed the classical bound by more than 5 standard errors",
                est.estimate <= float(bound) + 5 * est.stderr + 1e-12,
                classical_bound=number(bound),
            )


# ---------------------------------------------------------------------------
# reconstruct


def cmd_reconstruct(args, report: Report) -> None:
    rs, info = resolve_ray_set(args.set)
    report.inputs["set"] = info
    if rs.dimension != 3 or len(rs) != 13:
        raise InputError(f"reconstruction needs 13 rays in dimension 3, got {len(rs)} in dimension {rs.dimension}")
    real = Realization.infer(rs, args.eps)
    rec = canonicalize_realization(real, args.eps)
    report.results = {
        "vertex_map": dict(sorted(real.iso.items())),
        "unitary": complex_matrix(rec.unitary),
        "phases": [[t.real, t.imag] for t in rec.phases],
        "residual": number(rec.residual),
        "canonical": emit_ray_set(rec.rays),
    }
    report.add(
        "reconstruct.match",
        "the rays are unitarily equivalent to the standard 13 rays",
        rec.residual <= args.eps,
        residual=number(rec.residual),
    )


# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS, help="float tolerance (default 1e-9)")
    p.add_argument("--report-dir", default=os.environ.get(REPORT_DIR_ENV), help=f"also write <command>.json here (env {REPORT_DIR_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kscube", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run every check on a ray set")
    p.add_argument("set", nargs="?", default=NAME, help=f"ray-set file or '{NAME}'")
    p.add_argument("--dot", help="write the orthogonality graph in DOT format")
    p.add_argument("--limit", type=int, default=64, help="witnesses and maximizers to list")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("bound", help="classical bound and quantum operator of an inequality")
    p.add_argument("--ineq", default="magic-cube", help="inequality file or preset 'magic-cube'")
    p.add_argument("--set", help=f"ray-set file or '{NAME}'")
    p.add_argument("--limit", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of an inequality")
    p.add_argument("--set", default=NAME)
    p.add_argument("--ineq", default="magic-cube")
    p.add_argument("--state", default="mixed", help="'mixed', 'random:<seed>' or a state file")
    p.add_argument("--model", default="qm", help="'qm' or 'hv:<model file>'")
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("reconstruct", help="carry a 13-ray realization to the standard form")
    p.add_argument("set", help="ray-set file")
    _add_common(p)
    return parser


COMMANDS = {"verify": cmd_verify, "bound": cmd_bound, "simulate": cmd_simulate, "reconstruct": cmd_reconstruct}


def run(argv: list[str]) -> tuple[argparse.Namespace, Report]:
    """Parse ``argv`` and execute, collecting the outcome in a report (never raises KSError)."""
    args = build_parser().parse_args(argv)
    report = Report(args.command, list(argv))
    try:
        COMMANDS[args.command](args, report)
    except KSError as exc:
        report.fail_with(exc, exc.exit_code)
    return args, report


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args, report = run(argv)
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    if report.error and not args.json:
        print(f"kscube: {report.error['type']}: {report.error['message']}", file=sys.stderr)
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.json").write_text(report.to_json())
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
