"""Command-line interface.

Exit codes: 0 when a run converges (or a rate report shows convergence),
2 for non-convergence statuses, 1 for usage and input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .exceptions import NonFiniteIterate, SubgradNewtonError
from .geometry import (PolyhedralUnion, coderivative_kernel_trivial, cone_to_dict,
                       graphical_derivative_kernel_trivial, limiting_normal_cone,
                       regular_normal_cone, tangent_cone)
from .harness import RateClass, compare_solvers, estimate_rate, run_solver
from .lasso import LassoInstance, lasso_solve
from .problems import (C11_PROBLEMS, PROX_PROBLEMS, SET_FIXTURES, C11Problem,
                       ProxRegularProblem, get_problem, problem_graph)
from .solver_c11 import SolverConfig, semismoothstar_residual
from .solver_prox import ProxConfig
from .trace import Status, parse_trace, serialize_trace, to_dict

EXIT_OK, EXIT_ERROR, EXIT_NONCONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_vector(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc
    if not vals:
        raise UsageError("empty vector")
    return np.array(vals)


def _dump(obj):
    return json.dumps(obj, indent=2)


VECTOR_OPTIONS = ("--x0", "--point", "--xstar", "--reference")


def _join_vector_values(argv):
    """Attach vector values to their option so ``--x0 -2,0,0`` is not read as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VECTOR_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser():
    p = _Parser(prog="subgrad-newton", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("list-problems", help="list named problems and fixtures")

    s = sub.add_parser("solve", help="run a solver and record its trace")
    s.add_argument("--problem")
    s.add_argument("--instance", help="Lasso instance JSON {A, b, mu}")
    s.add_argument("--solver", choices=("c11", "ssn", "prox"))
    s.add_argument("--x0", required=True)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--select", choices=("min-norm", "first", "scripted"), default="min-norm")
    s.add_argument("--script", help="JSON array of direction vectors")
    s.add_argument("--line-search", action="store_true")
    s.add_argument("--out", help="write the trace to a .json or .csv file")

    n = sub.add_parser("normal-cone", help="cones of a problem graph at a point")
    n.add_argument("--problem", required=True)
    n.add_argument("--point", required=True)
    n.add_argument("--kind", choices=("limiting", "regular", "tangent"), default="limiting")

    d = sub.add_parser("diagnose", help="regularity and semismooth* diagnostics")
    d.add_argument("--problem", required=True)
    d.add_argument("--point", required=True)
    d.add_argument("--reference", help="reference point for the semismooth* residual")

    r = sub.add_parser("rate", help="convergence rate of a stored trace")
    r.add_argument("--trace", required=True)
    r.add_argument("--xstar", required=True)

    c = sub.add_parser("compare", help="run several solvers from one start")
    c.add_argument("--problem", required=True)
    c.add_argument("--solvers", required=True)
    c.add_argument("--x0", required=True)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--max-iter", type=int, default=100)
    return p


def _problem(name):
    try:
        return get_problem(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def cmd_list(args, out):
    for name in sorted(C11_PROBLEMS):
        print(f"{name}\tc11", file=out)
    for name in sorted(PROX_PROBLEMS):
        print(f"{name}\tprox", file=out)
    for name in sorted(SET_FIXTURES):
        print(f"{name}\tgraph", file=out)
    print("lasso\tprox (via --instance)", file=out)
    return EXIT_OK


def cmd_solve(args, out):
    x0 = _csv_vector(args.x0)
    script = None
    if args.script:
        doc = _load_json(args.script)
        if not isinstance(doc, list) or not doc:
            raise UsageError("script must be a non-empty JSON array of vectors")
        script = [np.asarray(v, dtype=float) for v in doc]
    if args.select == "scripted" and script is None:
        raise UsageError("--select scripted requires --script")

    if args.problem is None and args.instance is None:
        raise UsageError("one of --problem or --instance is required")
    if args.instance or args.problem == "lasso":
        if not args.instance:
            raise UsageError("the lasso problem needs --instance")
        if args.problem not in (None, "lasso"):
            raise UsageError("--instance is only valid with --problem lasso")
        if args.solver not in (None, "prox"):
            raise UsageError("lasso instances are solved with --solver prox")
        try:
            inst = LassoInstance.from_dict(_load_json(args.instance))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed instance: {exc}") from exc
        cfg = ProxConfig(lam=1.0 if args.lam is None else args.lam, tol=args.tol,
                         max_iter=args.max_iter)
        trace = lasso_solve(inst, x0, cfg)
    else:
        problem = _problem(args.problem)
        if isinstance(problem, PolyhedralUnion):
            raise UsageError(f"{args.problem!r} is a set fixture, not a solvable problem")
        solver = args.solver or ("prox" if isinstance(problem, ProxRegularProblem) else "c11")
        if x0.size != problem.dim:
            raise UsageError(f"x0 has {x0.size} entries, problem dimension is {problem.dim}")
        if solver == "prox":
            cfg = ProxConfig(lam=args.lam, tol=args.tol, max_iter=args.max_iter,
                             selection=args.select, script=script)
        else:
            cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter, selection=args.select,
                               script=script, line_search=args.line_search)
        trace = run_solver(problem, solver, x0, cfg)

    if args.out:
        fmt = "csv" if args.out.endswith(".csv") else "json"
        Path(args.out).write_text(serialize_trace(trace, fmt))
    summary = {"problem": trace.problem, "solver": trace.solver, "status": str(trace.status),
               "iterations": trace.n_iter, "residual_norm": trace.final_residual,
               "x": [float(t) for t in trace.x]}
    print(_dump(summary), file=out)
    return EXIT_OK if trace.status is Status.CONVERGED else EXIT_NONCONVERGED


def _graph_point(obj, graph, point):
    if point.size == graph.dim:
        return point
    n = graph.dim // 2
    if isinstance(obj, C11Problem) and point.size == n:
        return np.concatenate([point, obj.gradient(point)])
    raise UsageError(f"point must have {graph.dim} entries"
                     + (f" (or {n} for a gradient problem)" if isinstance(obj, C11Problem) else ""))


def cmd_normal_cone(args, out):
    obj = _problem(args.problem)
    graph = problem_graph(obj)
    if graph is None:
        raise UsageError(f"{args.problem!r} has no polyhedral graph")
    z = _graph_point(obj, graph, _csv_vector(args.point))
    if args.kind == "regular":
        pieces = [regular_normal_cone(graph, z)]
    elif args.kind == "tangent":
        pieces = list(tangent_cone(graph, z).pieces)
    else:
        pieces = list(limiting_normal_cone(graph, z).pieces)
    doc = {"problem": args.problem, "kind": args.kind, "point": [float(t) for t in z],
           "pieces": [cone_to_dict(p) for p in pieces]}
    print(_dump(doc), file=out)
    return EXIT_OK


def cmd_diagnose(args, out):
    obj = _problem(args.problem)
    point = _csv_vector(args.point)
    graph = problem_graph(obj)
    doc = {"problem": args.problem, "point": [float(t) for t in point],
           "coderivative_kernel_trivial": None, "graphical_derivative_kernel_trivial": None,
           "semismoothstar_residual": None}
    if graph is not None:
        z = _graph_point(obj, graph, point)
        n = graph.dim // 2
        doc["coderivative_kernel_trivial"] = coderivative_kernel_trivial(graph, z[:n], z[n:])
        doc["graphical_derivative_kernel_trivial"] = graphical_derivative_kernel_trivial(
            graph, z[:n], z[n:])
    if isinstance(obj, C11Problem):
        ref = _csv_vector(args.reference) if args.reference else obj.solution
        x = point[:obj.dim]
        if ref is not None and np.linalg.norm(x - ref) > 0:
            doc["reference"] = [float(t) for t in ref]
            doc["semismoothstar_residual"] = semismoothstar_residual(obj, x, ref)
    print(_dump(doc), file=out)
    return EXIT_OK


def cmd_rate(args, out):
    try:
        text = Path(args.trace).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.trace}: {exc}") from exc
    try:
        trace = parse_trace(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    xstar = _csv_vector(args.xstar)
    if xstar.size != trace.records[0].x.size:
        raise UsageError("xstar dimension does not match the trace")
    report = estimate_rate(trace, xstar)
    print(_dump(report.to_dict()), file=out)
    return EXIT_NONCONVERGED if report.classification is RateClass.NONE else EXIT_OK


def cmd_compare(args, out):
    obj = _problem(args.problem)
    if isinstance(obj, PolyhedralUnion):
        raise UsageError(f"{args.problem!r} is a set fixture, not a solvable problem")
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if not solvers:
        raise UsageError("no solvers given")
    x0 = _csv_vector(args.x0)
    if x0.size != obj.dim:
        raise UsageError(f"x0 has {x0.size} entries, problem dimension is {obj.dim}")
    cfg = (ProxConfig(tol=args.tol, max_iter=args.max_iter)
           if isinstance(obj, ProxRegularProblem)
           else SolverConfig(tol=args.tol, max_iter=args.max_iter))
    rows = compare_solvers(obj, solvers, x0, cfg)
    print(_dump({"problem": args.problem, "x0": [float(t) for t in x0],
                 "rows": [r.to_dict() for r in rows]}), file=out)
    ok = all(r.status == str(Status.CONVERGED) for r in rows)
    return EXIT_OK if ok else EXIT_NONCONVERGED


COMMANDS = {
    "list-problems": cmd_list,
    "solve": cmd_solve,
    "normal-cone": cmd_normal_cone,
    "diagnose": cmd_diagnose,
    "rate": cmd_rate,
    "compare": cmd_compare,
}


def run_cli(argv=None, out=None, err=None) -> int:
    """Run the CLI with an argument list and return the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = build_parser().parse_args(_join_vector_values(argv))
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR
    except NonFiniteIterate as exc:
        print(f"error: {exc}", file=err)
        return EXIT_NONCONVERGED
    except (SubgradNewtonError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
