"""Command-line front end.

stdout carries one JSON document per invocation; diagnostics go to stderr.
Exit codes: 0 success (chordal / inside the polytope), 2 usage or parse
error, 10 nonchordal, 11 chordal input where contextuality is required,
12 nonchordal input to ``extend``, 13 inconsistent marginals, 20 contextual,
30 realization or search failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .graphs import (
    DEFAULT_FILTER_MODE,
    FILTER_MODES,
    MAX_ENUMERATION_N,
    GraphFormatError,
    NoContextualityError,
    census,
    classify,
    enumerate_scenarios,
    is_chordal,
)
from .marginals import InconsistentMarginalsError, NotChordalError, OutcomeSpace, vorobyev_extend
from .polytope import SolverError, classical_bound, membership, ncycle_witness

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCHORDAL = 10
EXIT_CHORDAL = 11
EXIT_EXTEND_NONCHORDAL = 12
EXIT_INCONSISTENT = 13
EXIT_CONTEXTUAL = 20
EXIT_SEARCH = 30

NO_CONTEXTUALITY = "no contextuality possible"


class CliError(Exception):
    def __init__(self, code: int, message: str, payload: dict | None = None):
        super().__init__(message)
        self.code = code
        self.payload = payload


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc}") from exc


def _graph(path: str):
    try:
        return io.load_graph(path)
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands; each returns (json object, exit code, report lines)


def cmd_check_chordal(args):
    g = _graph(args.graph)
    cert = is_chordal(g)
    report = [f"graph {g.to_text()}", f"verdict: {cert.verdict}"]
    if not cert.chordal:
        report.append(f"induced cycle: {list(cert.induced_cycle)}")
    return cert.to_dict(), EXIT_OK if cert.chordal else EXIT_NONCHORDAL, report


def cmd_classify(args):
    g = _graph(args.graph)
    try:
        cls = classify(g)
    except NoContextualityError:
        raise CliError(EXIT_CHORDAL, NO_CONTEXTUALITY, {"verdict": "chordal", "message": NO_CONTEXTUALITY})
    obj = cls.to_dict()
    obj["certificate"] = is_chordal(g).to_dict()
    return obj, EXIT_OK, [f"graph {g.to_text()}", f"class {obj['class']}, partition {obj['partition']}"]


def cmd_enumerate(args):
    if not 0 <= args.max_n <= MAX_ENUMERATION_N:
        raise CliError(EXIT_USAGE, f"--max-n must be between 0 and {MAX_ENUMERATION_N}")
    records = enumerate_scenarios(args.max_n, args.filter_mode)
    counts = census(records)
    obj = {
        "max_n": args.max_n,
        "filter_mode": args.filter_mode,
        "counts": counts,
        "total": len(records),
        "records": [r.to_dict() for r in records],
    }
    report = [f"{len(records)} scenarios up to {args.max_n} measurements ({args.filter_mode} filter)",
              "counts: " + ", ".join(f"{k}={v}" for k, v in counts.items())]
    report += [f"  {r.scenario_class.label.value}  {r.graph.to_text()}" for r in records]
    if args.csv:
        _scenario_csv(records, args.csv, args.seed)
    return obj, EXIT_OK, report


def _scenario_csv(records, path, seed):
    from .quantum import realize_nonchordal

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "canonical_form", "class", "cycle_length", "witness_value", "classical_bound"])
        for r in records:
            real = realize_nonchordal(r.graph, seed=seed, check_membership=False)
            cw = real.cycle_witness
            w.writerow([r.graph.n, r.canonical_form, r.scenario_class.label.value, len(real.cycle),
                        f"{float(cw.value):.12g}", f"{float(cw.classical_bound):.12g}"])


def _marginals_with_graph(path: str, g=None):
    obj = _load_json(path)
    if g is not None:
        if "graph" not in obj and "behavior" not in obj:
            obj = dict(obj, graph=io.graph_to_obj(g))
    try:
        m = io.marginals_from_obj(obj)
    except (io.FormatError, GraphFormatError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"bad table file {path}: {exc}") from exc
    if g is not None and m.graph != g:
        raise CliError(EXIT_USAGE, "graph file and table file describe different graphs")
    return m


def cmd_extend(args):
    g = _graph(args.graph)
    m = _marginals_with_graph(args.marginals, g)
    try:
        j = vorobyev_extend(g, m, tol=args.tol if args.tol is not None else 1e-9)
    except NotChordalError as exc:
        raise CliError(EXIT_EXTEND_NONCHORDAL, str(exc), {"verdict": "nonchordal",
                                                          "induced_cycle": list(is_chordal(g).induced_cycle)})
    except InconsistentMarginalsError as exc:
        raise CliError(EXIT_INCONSISTENT, exc.report.message, {"verdict": "inconsistent"})
    return io.joint_to_obj(j, g), EXIT_OK, [f"joint over {g.n} measurements, {j.table.size} cells"]


def cmd_membership(args):
    b = _marginals_with_graph(args.behavior)
    try:
        res = membership(b, tol=args.tol)
    except InconsistentMarginalsError as exc:
        raise CliError(EXIT_INCONSISTENT, exc.report.message, {"verdict": "inconsistent"})
    except SolverError as exc:
        raise CliError(EXIT_SEARCH, f"solver failure: {exc}")
    obj = res.to_dict()
    report = [f"verdict: {res.verdict}"]
    if res.witness is not None:
        report.append(f"witness value {float(res.witness.value):.6f} > classical bound {float(res.witness.classical_bound):.6f}")
    else:
        report.append(f"{len(res.weights)} deterministic assignments in the mixture")
    return obj, EXIT_CONTEXTUAL if res.contextual else EXIT_OK, report


def cmd_realize(args):
    from .quantum import RealizationError, realize_nonchordal

    g = _graph(args.graph)
    try:
        r = realize_nonchordal(g, cycle=args.cycle, seed=args.seed, even_method=args.even_method.replace("-", "_"))
    except NoContextualityError:
        raise CliError(EXIT_CHORDAL, NO_CONTEXTUALITY, {"verdict": "chordal", "message": NO_CONTEXTUALITY})
    except (RealizationError, SolverError) as exc:
        raise CliError(EXIT_SEARCH, f"realization failed: {exc}")
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    cw = r.cycle_witness
    report = [
        f"graph {g.to_text()}",
        f"cycle {list(r.cycle)}, registers {list(r.measurements.dims)}",
        f"cycle witness {float(cw.value):.6f} vs classical bound {float(cw.classical_bound):.6f}",
        f"membership: {r.membership.verdict}",
    ]
    return io.realization_to_obj(r), EXIT_OK, report


def cmd_maxquantum(args):
    from .seesaw import seesaw_max

    g = _graph(args.graph)
    if args.witness:
        wobj = _load_json(args.witness)
        outcomes = io.outcomes_from_obj(wobj.get("outcomes"), g.n)
        entries = wobj.get("coeffs", wobj.get("witness", {}).get("coeffs") if isinstance(wobj.get("witness"), dict) else None)
        if entries is None:
            raise CliError(EXIT_USAGE, "witness file needs a 'coeffs' list")
        coeffs = io.coeffs_from_obj(entries, outcomes)
        cycle = None
    else:
        cert = is_chordal(g)
        if cert.chordal:
            raise CliError(EXIT_CHORDAL, NO_CONTEXTUALITY + " (no default witness for a chordal graph)",
                           {"verdict": "chordal", "message": NO_CONTEXTUALITY})
        cycle = list(cert.induced_cycle)
        outcomes = OutcomeSpace.uniform(g.n)
        coeffs = ncycle_witness(cycle, outcomes)
    try:
        cb = classical_bound(coeffs, g, outcomes)
        res = seesaw_max(coeffs, g, args.dim, restarts=args.restarts, seed=args.seed, sizes=outcomes.sizes)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    obj = {
        "dim": args.dim,
        "cycle": cycle,
        "value": res.value,
        "classical_bound": io.encode_number(cb),
        "converged": res.converged,
        "restart_values": res.restarts,
    }
    report = [f"see-saw value {res.value:.6f} (dimension {args.dim}, {args.restarts} restarts)",
              f"classical bound {float(cb):.6f}", f"converged: {res.converged}"]
    code = EXIT_OK if res.converged else EXIT_SEARCH
    return obj, code, report


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="numerical tolerance override")
    common.add_argument("--seed", type=int, default=0, help="seed for search-based paths")
    common.add_argument("--filter-mode", choices=FILTER_MODES, default=DEFAULT_FILTER_MODE)
    common.add_argument("--out", help="also write the JSON output to this file")
    common.add_argument("--report", help="write a human-readable summary to this file ('-' for stderr)")
    common.add_argument("--csv", help="enumerate: per-scenario witness values as CSV")

    p = argparse.ArgumentParser(prog="ctxgraph", description="Compatibility graphs and quantum contextuality.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-chordal", parents=[common], help="chordality certificate")
    s.add_argument("graph")
    s.set_defaults(func=cmd_check_chordal)

    s = sub.add_parser("classify", parents=[common], help="scenario class of a nonchordal graph")
    s.add_argument("graph")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("enumerate", parents=[common], help="atlas of relevant nonchordal graphs")
    s.add_argument("--max-n", type=int, required=True)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("extend", parents=[common], help="global joint from chordal marginals")
    s.add_argument("graph")
    s.add_argument("marginals")
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("membership", parents=[common], help="noncontextual polytope membership")
    s.add_argument("behavior")
    s.set_defaults(func=cmd_membership)

    s = sub.add_parser("realize", parents=[common], help="contextual quantum realization")
    s.add_argument("graph")
    s.add_argument("--cycle", type=lambda t: [int(x) for x in t.split(",")], default=None,
                   help="induced cycle to realize, e.g. 0,1,2,3,4")
    s.add_argument("--even-method", choices=["direct-sum", "search"], default="direct-sum",
                   help="even cycles of length >= 6: explicit 4+3 block layout, or see-saw search in d=4")
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("maxquantum", parents=[common], help="see-saw lower bound on a witness")
    s.add_argument("graph")
    s.add_argument("--witness", help="witness JSON (default: n-cycle witness on the first induced cycle)")
    s.add_argument("--dim", type=int, default=4)
    s.add_argument("--restarts", type=int, default=20)
    s.set_defaults(func=cmd_maxquantum)
    return p


def _emit(obj, args, report):
    text = json.dumps(obj, indent=2)
    print(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    if getattr(args, "report", None) and report:
        body = "\n".join(report) + "\n"
        if args.report == "-":
            sys.stderr.write(body)
        else:
            Path(args.report).write_text(body)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        obj, code, report = args.func(args)
    except CliError as exc:
        _err(f"ctxgraph {args.command}: {exc}")
        if exc.payload is not None:
            _emit(exc.payload, args, [str(exc)])
        return exc.code
    except (GraphFormatError, io.FormatError) as exc:
        _err(f"ctxgraph {args.command}: parse error: {exc}")
        return EXIT_USAGE
    _emit(obj, args, report)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
