"""File formats: graphs, marginal/behavior tables, joints, witnesses, realizations.

Graphs: ``{"n": 4, "edges": [[0, 1], ...]}`` or one line ``"4: 0-1,1-2,2-3,0-3"``.
Tables: ``{"graph": ..., "outcomes": {"0": [labels], ...}, "tables":
[{"clique": [0, 1], "p": {"0,0": 0.5, ...}}]}``. Probabilities may be JSON
numbers (floating point) or strings ``"p/q"`` (exact rationals).
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .graphs import CompatibilityGraph, GraphFormatError
from .marginals import ContextMarginals, JointDistribution, OutcomeSpace, as_table


class FormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# numbers


def encode_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def decode_number(x):
    if isinstance(x, bool):
        raise FormatError(f"not a probability: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise FormatError(f"bad number {x!r}") from exc
    raise FormatError(f"bad number {x!r}")


# ---------------------------------------------------------------------------
# graphs


def parse_graph_text(text: str) -> CompatibilityGraph:
    """Parse ``"n: u-v,u-v,..."``."""
    head, _, body = text.strip().partition(":")
    try:
        n = int(head)
        edges = []
        for tok in filter(None, (t.strip() for t in body.split(","))):
            u, v = tok.split("-")
            edges.append((int(u), int(v)))
    except ValueError as exc:
        raise GraphFormatError(f"cannot parse graph text {text!r}") from exc
    return CompatibilityGraph.from_edges(n, edges)


def graph_from_obj(obj: Any) -> CompatibilityGraph:
    if isinstance(obj, str):
        return parse_graph_text(obj)
    if not isinstance(obj, Mapping):
        raise GraphFormatError("graph must be an object or a text line")
    if "n" not in obj and "graph" in obj:
        return graph_from_obj(obj["graph"])
    try:
        n = obj["n"]
        edges = obj.get("edges", [])
        if not isinstance(n, int) or isinstance(n, bool):
            raise GraphFormatError(f"n must be an integer, got {n!r}")
        pairs = []
        for e in edges:
            if len(e) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in e):
                raise GraphFormatError(f"bad edge {e!r}")
            pairs.append(tuple(e))
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"bad graph object: {exc}") from exc
    return CompatibilityGraph.from_edges(n, pairs)


def graph_to_obj(g: CompatibilityGraph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.sorted_edges()]}


def load_graph(path: str | Path) -> CompatibilityGraph:
    text = Path(path).read_text()
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from exc
        return graph_from_obj(obj)
    return parse_graph_text(stripped)


# ---------------------------------------------------------------------------
# tables


def _cell_key(labels) -> str:
    return ",".join(str(x) for x in labels)


def outcomes_from_obj(obj: Mapping | None, n: int) -> OutcomeSpace:
    if obj is None:
        return OutcomeSpace.uniform(n, 2)
    labels = []
    for v in range(n):
        ls = obj.get(str(v), obj.get(v, [0, 1]))
        labels.append(tuple(ls))
    return OutcomeSpace(tuple(labels))


def outcomes_to_obj(o: OutcomeSpace) -> dict:
    return {str(v): list(ls) for v, ls in enumerate(o.labels)}


def _decode_table(cells: Mapping, clique, outcomes: OutcomeSpace) -> np.ndarray:
    shape = outcomes.shape(clique)
    index = {
        _cell_key(lab): i for i, lab in enumerate(itertools.product(*(outcomes.labels[v] for v in clique)))
    }
    vals: list = [Fraction(0)] * int(np.prod(shape))
    for key, p in cells.items():
        if key not in index:
            raise FormatError(f"unknown outcome cell {key!r} for clique {list(clique)}")
        vals[index[key]] = decode_number(p)
    return as_table(vals, shape)


def encode_table(table: np.ndarray, clique, outcomes: OutcomeSpace, skip_zero: bool = False) -> dict:
    out = {}
    for lab, x in zip(itertools.product(*(outcomes.labels[v] for v in clique)), np.asarray(table).reshape(-1)):
        if skip_zero and x == 0:
            continue
        out[_cell_key(lab)] = encode_number(x)
    return out


def marginals_from_obj(obj: Mapping) -> ContextMarginals:
    if "tables" not in obj and "behavior" in obj:
        return marginals_from_obj(obj["behavior"])
    try:
        g = graph_from_obj(obj["graph"])
        outcomes = outcomes_from_obj(obj.get("outcomes"), g.n)
        tables = {}
        for entry in obj["tables"]:
            clique = tuple(sorted(entry["clique"]))
            tables[clique] = _decode_table(entry["p"], clique, outcomes)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad marginals object: {exc}") from exc
    return ContextMarginals(g, outcomes, tables)


def marginals_to_obj(m: ContextMarginals) -> dict:
    return {
        "graph": graph_to_obj(m.graph),
        "outcomes": outcomes_to_obj(m.outcomes),
        "tables": [
            {"clique": list(c), "p": encode_table(t, c, m.outcomes)} for c, t in sorted(m.tables.items())
        ],
    }


def load_marginals(path: str | Path) -> ContextMarginals:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return marginals_from_obj(obj)


def joint_to_obj(j: JointDistribution, g: CompatibilityGraph | None = None) -> dict:
    """Joint as a table over all measurements; with ``g`` it also carries the
    context marginals so the output re-reads as a behavior file."""
    allv = list(range(j.n))
    obj = {
        "joint": {"clique": allv, "p": encode_table(j.table, allv, j.outcomes)},
        "outcomes": outcomes_to_obj(j.outcomes),
    }
    if g is not None:
        m = ContextMarginals.from_joint(g, j)
        obj["graph"] = graph_to_obj(g)
        obj["tables"] = marginals_to_obj(m)["tables"]
    return obj


def joint_from_obj(obj: Mapping) -> JointDistribution:
    n = len(obj["joint"]["clique"])
    outcomes = outcomes_from_obj(obj.get("outcomes"), n)
    return JointDistribution(outcomes, _decode_table(obj["joint"]["p"], tuple(range(n)), outcomes))


def encode_coeffs(coeffs: Mapping, outcomes: OutcomeSpace | None = None) -> list:
    out = []
    for c, t in sorted(coeffs.items()):
        t = np.asarray(t)
        if outcomes is None:
            labs = itertools.product(*(range(k) for k in t.shape))
            cells = {_cell_key(lab): encode_number(x) for lab, x in zip(labs, t.reshape(-1))}
        else:
            cells = encode_table(t, c, outcomes)
        out.append({"clique": list(c), "c": cells})
    return out


def coeffs_from_obj(entries, outcomes: OutcomeSpace) -> dict:
    coeffs = {}
    for entry in entries:
        clique = tuple(sorted(entry["clique"]))
        t = _decode_table(entry["c"], clique, outcomes)
        coeffs[clique] = t.astype(float) if t.dtype != object else t
    return coeffs


# ---------------------------------------------------------------------------
# complex matrices


def encode_matrix(a: np.ndarray) -> dict:
    """Row-major list of ``[re, im]`` pairs (floats round-trip exactly through repr)."""
    a = np.asarray(a, dtype=complex)
    return {
        "shape": list(a.shape),
        "data": [[float(format(z.real, ".17g")), float(format(z.imag, ".17g"))] for z in a.reshape(-1)],
    }


def decode_matrix(obj: Mapping) -> np.ndarray:
    data = np.array(obj["data"], dtype=float)
    return (data[:, 0] + 1j * data[:, 1]).reshape(obj["shape"])


def dump_json(obj, path: str | Path | None = None) -> str:
    text = json.dumps(obj, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


# ---------------------------------------------------------------------------
# realizations


def tensorop_to_obj(op) -> dict:
    return {
        "dims": list(op.dims),
        "terms": [
            {"coef": [float(format(complex(c).real, ".17g")), float(format(complex(c).imag, ".17g"))],
             "factors": [encode_matrix(f) for f in fs]}
            for c, fs in op.terms
        ],
    }


def tensorop_from_obj(obj: Mapping):
    from .tensor import TensorOp

    terms = tuple(
        (complex(t["coef"][0], t["coef"][1]), tuple(decode_matrix(f) for f in t["factors"])) for t in obj["terms"]
    )
    return TensorOp(tuple(obj["dims"]), terms)


def realization_to_obj(r) -> dict:
    """Registers, factor matrices, state, verified graph, behavior and verdict."""
    s = r.measurements
    return {
        "dims": list(s.dims),
        "graph": graph_to_obj(s.graph),
        "cycle": list(r.cycle),
        "measurements": [
            {"vertex": v, "outcomes": list(m.outcomes), "projectors": [tensorop_to_obj(p) for p in m.projectors]}
            for v, m in enumerate(s.measurements)
        ],
        "state": tensorop_to_obj(r.state.rho),
        "behavior": marginals_to_obj(r.behavior),
        "membership": r.membership.to_dict(),
        "cycle_witness": r.cycle_witness.to_dict(),
    }


def measurement_set_from_obj(obj: Mapping):
    """``(state, MeasurementSet)`` from a realization object (no verification)."""
    from .quantum import IdealMeasurement, MeasurementSet, QuantumState

    g = graph_from_obj(obj["graph"])
    ms = tuple(
        IdealMeasurement(tuple(m["outcomes"]), tuple(tensorop_from_obj(p) for p in m["projectors"]))
        for m in sorted(obj["measurements"], key=lambda m: m["vertex"])
    )
    return QuantumState(tensorop_from_obj(obj["state"])), MeasurementSet(ms, g)
