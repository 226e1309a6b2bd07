"""Command-line front end.

One binary, subcommand style.  Structured results go to stdout as canonical
JSON (or to ``--output``); human-readable diagnostics go to stderr and are
silenced by ``--quiet``.  Exit codes: 0 success, 2 usage, 3 malformed input
file, 4 mathematical failure (validation, positivity, guard, consistency).
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import ipf as _ipf
from .complexity import markov_dimension, sign_count_bound, sign_of, xor_scan
from .diffs import first_difference, second_difference
from .errors import FormatError, MarkovOddsError, PositivityError
from .factorize import PRUNE_THRESHOLD, membership_violations, mobius_decompose
from .graphs import UndirectedGraph, maximal_cliques, moralize, separates
from .models import (
    DEFAULT_CI_TOL,
    ci_details,
    decide,
    from_log_odds,
    is_g_markov,
)
from .serialization import (
    canonical_dumps,
    factorization_to_obj,
    function_to_obj,
    graph_to_obj,
    load_dag,
    load_dataset,
    load_decision,
    load_function,
    load_graph,
    load_model,
    model_to_obj,
)
from .tables import CategoricalDomain, TabularFunction

__all__ = ["CommandResult", "run_command", "main", "render_grid"]


@dataclass(frozen=True)
class CommandResult:
    """Outcome of one invocation: exit code, JSON payload, stderr lines."""

    exit_code: int
    payload: object | None
    messages: tuple[str, ...] = ()
    output: str | None = None
    quiet: bool = False


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def render_grid(f: TabularFunction) -> list[str]:
    """Fixed-width text table; two-variable functions get a row/column grid."""
    domain = f.domain

    def name(i: int, v: int) -> str:
        return domain.labels[i][v] if domain.labels is not None else str(v)

    def fmt(v: float) -> str:
        return f"{v:g}"

    nd = f.as_nd()
    if domain.n == 2:
        rows = [[""] + [name(1, j) for j in range(domain.cardinalities[1])]]
        for i in range(domain.cardinalities[0]):
            rows.append([name(0, i)] + [fmt(v) for v in nd[i]])
        widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
        return ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    lines = []
    for idx, x in enumerate(domain.assignments()):
        coords = ",".join(name(i, v) for i, v in enumerate(x))
        lines.append(f"({coords})  {fmt(float(f.values[idx]))}")
    return lines


# -- handlers ----------------------------------------------------------------

def _cmd_diff(args) -> tuple[object, list[str]]:
    f = load_function(args.function)
    base = tuple(args.base) if args.base is not None else None
    if args.vars_b is not None:
        result = second_difference(f, args.vars, args.vars_b, base)
    else:
        result = first_difference(f, args.vars, base)
    return function_to_obj(result), render_grid(result)


def _cmd_cliques(args) -> tuple[object, list[str]]:
    graph = load_graph(args.graph)
    cliques = maximal_cliques(graph)
    return {"cliques": [list(c) for c in cliques]}, [
        f"{len(cliques)} maximal clique(s)"
    ]


def _cmd_separates(args) -> tuple[object, list[str]]:
    graph = load_graph(args.graph)
    verdict = separates(graph, args.a, args.b, args.d)
    return {"separates": verdict}, []


def _cmd_moralize(args) -> tuple[object, list[str]]:
    dag = load_dag(args.dag)
    return graph_to_obj(moralize(dag)), []


def _cmd_decompose(args) -> tuple[object, list[str]]:
    f = load_function(args.function)
    graph = load_graph(args.graph) if args.graph else None
    base = tuple(args.base) if args.base is not None else None
    fac = mobius_decompose(f, base=base, graph=graph, prune=args.prune, raw=args.raw)
    return factorization_to_obj(fac), [f"{len(fac.terms)} interaction term(s)"]


def _cmd_check_markov(args) -> tuple[object, list[str]]:
    f = load_function(args.function)
    graph = load_graph(args.graph)
    tol = args.tol if args.tol is not None else DEFAULT_CI_TOL
    violations = membership_violations(f, graph, tol=tol)
    payload = {
        "markov": not violations,
        "violations": [
            {"a": list(a), "b": list(b), "max_abs": gap} for a, b, gap in violations
        ],
    }
    messages = [
        f"second difference on ({a},{b}) reaches {gap:.3e}" for a, b, gap in violations
    ]
    return payload, messages


def _domain_for(args) -> CategoricalDomain:
    return CategoricalDomain(tuple(args.cards))


def _cmd_dim(args) -> tuple[object, list[str]]:
    graph = load_graph(args.graph)
    return {"dim": markov_dimension(graph, _domain_for(args))}, []


def _cmd_bound(args) -> tuple[object, list[str]]:
    graph = load_graph(args.graph)
    domain = _domain_for(args)
    return {
        "dim": markov_dimension(graph, domain),
        "bound": sign_count_bound(graph, domain),
    }, []


def _cmd_xor_scan(args) -> tuple[object, list[str]]:
    if args.decision is not None:
        phi = load_decision(args.decision)
    else:
        phi = sign_of(load_function(args.function))
    witnesses = xor_scan(phi, max_order=args.max_order)
    payload = {
        "subsets": [list(w.subset) for w in witnesses],
        "witnesses": [
            {
                "vars": list(w.subset),
                "context": list(w.context),
                "pairs": [list(p) for p in w.pairs],
            }
            for w in witnesses
        ],
    }
    return payload, [f"{len(witnesses)} xor subset(s) found"]


def _cmd_classify(args) -> tuple[object, list[str]]:
    model = load_model(args.model)
    label = decide(model, args.x)
    i = model.domain.flat_index(args.x)
    p, q = float(model.p_plus[i]), float(model.p_minus[i])
    if p <= 0.0 or q <= 0.0:
        raise PositivityError(
            f"log-odds undefined at {args.x}: joint probabilities ({p}, {q})"
        )
    return {"label": label, "log_odds": math.log(p) - math.log(q)}, []


def _cmd_check_ci(args) -> tuple[object, list[str]]:
    model = load_model(args.model)
    tol = args.tol if args.tol is not None else DEFAULT_CI_TOL
    check = ci_details(model, args.a, args.b, tol=tol)
    payload = {
        "independent": check.independent,
        "toric_residual": check.toric_residual,
        "diff_residual": check.diff_residual,
        "toric_only": check.toric_only,
    }
    messages = []
    if check.toric_only:
        messages.append("zeros present: differential route skipped")
    return payload, messages


def _cmd_verify_markov(args) -> tuple[object, list[str]]:
    model = load_model(args.model)
    graph = load_graph(args.graph)
    tol = args.tol if args.tol is not None else DEFAULT_CI_TOL
    return {"markov": is_g_markov(model, graph, tol=tol)}, []


def _cmd_build(args) -> tuple[object, list[str]]:
    f = load_function(args.function)
    g = load_function(args.g) if args.g else None
    graph = load_graph(args.graph) if args.graph else None
    tol = args.tol if args.tol is not None else DEFAULT_CI_TOL
    model = from_log_odds(f, g=g, graph=graph, tol=tol)
    return model_to_obj(model), []


def _cmd_fit_ipf(args) -> tuple[object, list[str]]:
    f = load_function(args.function)
    graph = load_graph(args.graph)
    data = load_dataset(
        args.data,
        class_col=args.class_col,
        labels_path=args.labels,
        class_coding=args.class_coding,
    )
    tol = args.tol if args.tol is not None else _ipf.DEFAULT_TOL
    model, report = _ipf.fit_ipf(f, graph, data, tol=tol, max_sweeps=args.max_sweeps)
    report_obj = {
        "iterations": report.iterations,
        "final_marginal_gap": report.final_marginal_gap,
        "converged": report.converged,
    }
    if args.trace:
        report_obj["loglik_trace"] = list(report.loglik_trace)
        report_obj["odds_gap_trace"] = list(report.odds_gap_trace)
    state = "converged" if report.converged else "stopped"
    messages = [
        f"{state} after {report.iterations} sweep(s), "
        f"marginal gap {report.final_marginal_gap:.3e}"
    ]
    return {"model": model_to_obj(model), "report": report_obj}, messages


def builtin_two_predictor_example() -> TabularFunction:
    """The worked 2x3 example shipped with the docs (see data/)."""
    domain = CategoricalDomain((2, 3), labels=(("0", "1"), ("1", "2", "3")))
    return TabularFunction(domain, np.array([-1.0, 5.0, 2.0, 3.0, -7.0, -4.0]))


def _cmd_reproduce(args) -> tuple[object, list[str]]:
    if args.target == "table1":
        f = builtin_two_predictor_example()
        d2 = second_difference(f, (0,), (1,), base=(0, 0))
        payload = {"grid": [[float(v) for v in row] for row in d2.as_nd()]}
        messages = ["function:"] + render_grid(f) + ["second difference:"] + render_grid(d2)
        return payload, messages
    graph = UndirectedGraph.cycle(4)
    domain = CategoricalDomain((2, 2, 2, 2))
    return {
        "dim": markov_dimension(graph, domain),
        "bound": sign_count_bound(graph, domain),
    }, []


_HANDLERS: dict[str, Callable] = {
    "diff": _cmd_diff,
    "cliques": _cmd_cliques,
    "separates": _cmd_separates,
    "moralize": _cmd_moralize,
    "decompose": _cmd_decompose,
    "check-markov": _cmd_check_markov,
    "dim": _cmd_dim,
    "bound": _cmd_bound,
    "xor-scan": _cmd_xor_scan,
    "classify": _cmd_classify,
    "check-ci": _cmd_check_ci,
    "verify-markov": _cmd_verify_markov,
    "build": _cmd_build,
    "fit-ipf": _cmd_fit_ipf,
    "reproduce": _cmd_reproduce,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="numeric tolerance")
    common.add_argument("--output", default=None, help="write the JSON payload here")
    common.add_argument("--quiet", action="store_true", help="suppress diagnostics")

    parser = argparse.ArgumentParser(
        prog="markovodds",
        description="difference calculus, Markov factorization, and IPF "
        "for categorical log-odds tables",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diff", parents=[common], help="first or second difference")
    p.add_argument("--function", required=True)
    p.add_argument("--vars", type=_ints, required=True, help="subset A, e.g. 0 or 0,2")
    p.add_argument("--vars-b", type=_ints, default=None, help="subset B for the second difference")
    p.add_argument("--base", type=_ints, default=None, help="base point, default all zeros")

    p = sub.add_parser("cliques", parents=[common], help="maximal cliques")
    p.add_argument("--graph", required=True)

    p = sub.add_parser("separates", parents=[common], help="does D separate A from B")
    p.add_argument("--graph", required=True)
    p.add_argument("--a", type=_ints, required=True)
    p.add_argument("--b", type=_ints, required=True)
    p.add_argument("--d", type=_ints, default=())

    p = sub.add_parser("moralize", parents=[common], help="moral graph of a DAG")
    p.add_argument("--dag", required=True)

    p = sub.add_parser("decompose", parents=[common], help="interaction-term decomposition")
    p.add_argument("--function", required=True)
    p.add_argument("--graph", default=None, help="restrict terms to this graph's cliques")
    p.add_argument("--base", type=_ints, default=None)
    p.add_argument("--prune", type=float, default=PRUNE_THRESHOLD)
    p.add_argument("--raw", action="store_true", help="keep zero terms")

    p = sub.add_parser("check-markov", parents=[common], help="does f split over the graph")
    p.add_argument("--function", required=True)
    p.add_argument("--graph", required=True)

    p = sub.add_parser("dim", parents=[common], help="dimension of the representable family")
    p.add_argument("--graph", required=True)
    p.add_argument("--cards", type=_ints, required=True, help="cardinalities, e.g. 2,2,2,2")

    p = sub.add_parser("bound", parents=[common], help="sign-pattern counting bound")
    p.add_argument("--graph", required=True)
    p.add_argument("--cards", type=_ints, required=True)

    p = sub.add_parser("xor-scan", parents=[common], help="find xor-shaped sign patterns")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--function", default=None)
    src.add_argument("--decision", default=None)
    p.add_argument("--max-order", type=int, default=None)

    p = sub.add_parser("classify", parents=[common], help="label one assignment")
    p.add_argument("--model", required=True)
    p.add_argument("--x", type=_ints, required=True)

    p = sub.add_parser("check-ci", parents=[common], help="conditional independence test")
    p.add_argument("--model", required=True)
    p.add_argument("--a", type=_ints, required=True)
    p.add_argument("--b", type=_ints, required=True)

    p = sub.add_parser("verify-markov", parents=[common], help="is the model G-Markov")
    p.add_argument("--model", required=True)
    p.add_argument("--graph", required=True)

    p = sub.add_parser("build", parents=[common], help="classifier from log-odds (+ optional marginal term)")
    p.add_argument("--function", required=True)
    p.add_argument("--g", default=None, help="class-independent log term")
    p.add_argument("--graph", default=None, help="require membership for f and g")

    p = sub.add_parser("fit-ipf", parents=[common], help="fixed-log-odds maximum likelihood")
    p.add_argument("--function", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--class-col", default="class")
    p.add_argument("--labels", default=None, help="category-order sidecar JSON")
    p.add_argument("--class-coding", choices=["pm1", "01"], default="pm1")
    p.add_argument("--max-sweeps", type=int, default=_ipf.DEFAULT_MAX_SWEEPS)
    p.add_argument("--trace", action="store_true", help="include per-sweep traces")

    p = sub.add_parser("reproduce", parents=[common], help="rebuild the worked examples")
    p.add_argument("target", choices=["table1", "example2"])

    return parser


def run_command(argv: Sequence[str]) -> CommandResult:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return CommandResult(code, None)
    try:
        payload, messages = _HANDLERS[args.command](args)
    except FormatError as exc:
        return CommandResult(3, None, (f"error: {exc}",), args.output, args.quiet)
    except OSError as exc:
        return CommandResult(3, None, (f"error: {exc}",), args.output, args.quiet)
    except MarkovOddsError as exc:
        return CommandResult(4, None, (f"error: {exc}",), args.output, args.quiet)
    return CommandResult(0, payload, tuple(messages), args.output, args.quiet)


def main(argv: Sequence[str] | None = None) -> int:
    result = run_command(sys.argv[1:] if argv is None else argv)
    if result.messages and (not result.quiet or result.exit_code != 0):
        for line in result.messages:
            print(line, file=sys.stderr)
    if result.payload is not None:
        text = canonical_dumps(result.payload)
        if result.output:
            Path(result.output).write_text(text)
        else:
            sys.stdout.write(text)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
