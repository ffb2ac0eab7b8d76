"""
Result payloads shared by the CLI and the HTTP routes, and their
table/json/csv renderings.

Payloads are plain dictionaries with a fixed key order, so the JSON
output is stable across runs.
"""

import csv
import io
import json
import logging
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Union

from .cdga import PDModel, validate
from .exactlin import format_scalar
from .exceptions import PipelineError
from .hochschild import build_chain_complex
from .model_service import ModelPair
from .report import Report
from .stringtop import LoopAlgebra
from .sullivan import HodgeTable, SullivanModel, build_free_loop_model, hodge_table

logger = logging.getLogger(__name__)

FORMATS = ("table", "json", "csv")
PIPELINES = ("hochschild", "sullivan", "both")


def _texts(vec: Mapping[str, Fraction]) -> Dict[str, str]:
    return {label: format_scalar(value) for label, value in vec.items() if value}


def format_vector(vec: Mapping[str, Fraction]) -> str:
    terms = []
    for label, value in vec.items():
        if not value:
            continue
        magnitude = abs(value)
        body = label if magnitude == 1 else f"{format_scalar(magnitude)}·{label}"
        if not terms:
            terms.append(body if value > 0 else f"-{body}")
        else:
            terms.append(f"+ {body}" if value > 0 else f"- {body}")
    return " ".join(terms) if terms else "0"


def validation_payload(model: Union[PDModel, SullivanModel]) -> Dict[str, object]:
    violations = validate(model)
    return {
        "model": model.name,
        "kind": "pd-cdga" if isinstance(model, PDModel) else "sullivan",
        "valid": not violations,
        "violations": [
            {"axiom": v.axiom, "witness": list(v.witness), "detail": v.detail} for v in violations
        ],
    }


def betti_payload(pair: ModelPair, N: int, pipeline: Optional[str] = None) -> Dict[str, object]:
    """
    dim H^n(LM) for n ≤ N from the selected pipeline, or the one the input supports

    Raises:
        PipelineError: the pipeline needs a model the input does not provide
    """
    pipeline = pipeline or pair.default_pipeline
    if pipeline not in PIPELINES:
        raise PipelineError(f"unknown pipeline {pipeline!r}")
    if pipeline in ("hochschild", "both") and pair.pd is None:
        raise PipelineError("the Hochschild pipeline needs a pd-cdga model")
    if pipeline in ("sullivan", "both") and pair.sullivan is None:
        raise PipelineError("the Sullivan pipeline needs a Sullivan model")
    hochschild = build_chain_complex(pair.pd, N).betti() if pair.pd is not None and pipeline != "sullivan" else {}
    sullivan = (
        hodge_table(build_free_loop_model(pair.sullivan, N), N).totals
        if pair.sullivan is not None and pipeline != "hochschild"
        else {}
    )
    rows = []
    for n in range(0, N + 1):
        row = {"degree": n, "hochschild": hochschild.get(n), "sullivan": sullivan.get(n), "match": None}
        if pipeline == "both":
            row["match"] = hochschild[n] == sullivan[n]
        rows.append(row)
    return {"model": pair.name, "max_degree": N, "pipeline": pipeline, "rows": rows}


def loop_payload(la: LoopAlgebra) -> Dict[str, object]:
    delta = []
    for label in la.space.labels:
        if la.delta_defined(la.degree(label)):
            image = la.delta.image(label)
            if image:
                delta.append({"label": label, "value": _texts(image)})
    return {
        "model": la.model.name,
        "max_degree": la.truncation,
        "dimension": la.dimension,
        "basis": {str(p): list(la.basis(p)) for p in la.space.degrees()},
        "unit": _texts(la.unit),
        "product": [
            {"left": x, "right": y, "value": _texts(value)} for (x, y), value in la.product.items() if value
        ],
        "delta": delta,
        "bracket": [
            {"left": x, "right": y, "value": _texts(value)} for (x, y), value in la.bracket.items() if value
        ],
    }


def hodge_payload(name: str, table: HodgeTable) -> Dict[str, object]:
    weights = table.weights or [0]
    sums = table.row_sums()
    return {
        "model": name,
        "max_degree": table.max_degree,
        "weights": weights,
        "rows": [
            {
                "degree": n,
                "dims": [table.dim(n, p) for p in weights],
                "sum": sums[n],
                "total": table.totals[n],
            }
            for n in range(0, table.max_degree + 1)
        ],
    }


def check_payload(name: str, N: int, reports: List[Report]) -> Dict[str, object]:
    return {
        "model": name,
        "max_degree": N,
        "passed": all(r.passed for r in reports),
        "reports": [r.summary() for r in reports],
    }


def _table(header: List[str], rows: List[List[object]]) -> str:
    cells = [[str(c) for c in header]] + [["" if c is None else str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _csv(header: List[str], rows: List[List[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if c is None else c for c in row])
    return buffer.getvalue().rstrip("\n")


def _rows(kind: str, payload: Dict[str, object]) -> Dict[str, object]:
    if kind == "validate":
        header = ["axiom", "witness", "detail"]
        rows = [[v["axiom"], " ".join(v["witness"]), v["detail"]] for v in payload["violations"]]
    elif kind == "betti":
        header = ["n", "hochschild", "sullivan", "match"]
        rows = [[r["degree"], r["hochschild"], r["sullivan"], r["match"]] for r in payload["rows"]]
    elif kind == "hodge":
        header = ["n"] + [f"p={p}" for p in payload["weights"]] + ["sum", "total"]
        rows = [[r["degree"], *r["dims"], r["sum"], r["total"]] for r in payload["rows"]]
    elif kind == "loop":
        header = ["table", "left", "right", "value"]
        rows = [["unit", "", "", format_vector(payload["unit"])]]
        rows += [["product", e["left"], e["right"], format_vector(e["value"])] for e in payload["product"]]
        rows += [["delta", e["label"], "", format_vector(e["value"])] for e in payload["delta"]]
        rows += [["bracket", e["left"], e["right"], format_vector(e["value"])] for e in payload["bracket"]]
    elif kind == "check":
        header = ["report", "check", "passed"]
        rows = [[r["title"], c["name"], c["passed"]] for r in payload["reports"] for c in r["checks"]]
    else:
        raise ValueError(f"unknown payload kind {kind!r}")
    return {"header": header, "rows": rows}


def _headline(kind: str, payload: Dict[str, object]) -> List[str]:
    if kind == "validate":
        state = "valid" if payload["valid"] else f"{len(payload['violations'])} violation(s)"
        return [f"{payload['model']} ({payload['kind']}): {state}"]
    if kind == "loop":
        lines = [f"loop homology of {payload['model']} (m = {payload['dimension']}, N = {payload['max_degree']})"]
        for p, labels in payload["basis"].items():
            if labels:
                lines.append(f"  ℍ_{p}: {', '.join(labels)}")
        return lines
    if kind == "check":
        lines = []
        for r in payload["reports"]:
            if r["passed"]:
                lines.append(f"PASS  {r['title']} ({len(r['checks'])} checks)")
            else:
                first = r["failures"][0]
                lines.append(f"FAIL  {r['title']}: {first['check']} at {first['witness']} {first['detail']}".rstrip())
        return lines
    return [f"{payload['model']} through degree {payload['max_degree']}"]


def render(kind: str, payload: Dict[str, object], fmt: str = "table") -> str:
    """Render a payload as an aligned table, JSON or CSV"""
    if fmt == "json":
        return json.dumps(payload, indent=2, ensure_ascii=False)
    table = _rows(kind, payload)
    if fmt == "csv":
        return _csv(table["header"], table["rows"])
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    lines = _headline(kind, payload)
    if kind == "check":
        return "\n".join(lines)
    if table["rows"]:
        lines += ["", _table(table["header"], table["rows"])]
    return "\n".join(lines)
