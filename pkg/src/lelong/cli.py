"""Batch front end: problem files in, reports out.

A problem file is JSON with a dimension, named objects (exponent sets
under kind "monomial_weight", polynomial log-moduli under
"polynomial_log", expression trees under "expr") and a list of tasks.
Rationals are written as integers, "p/q" strings, or [num, den] pairs,
and survive the round trip exactly.  Reports serialize deterministically:
byte-identical output for identical input.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import demailly, indicator_calculus, numeric_oracle, poly_geom, weights
from .numeric_oracle import RadialSchedule

__all__ = ["ProblemFile", "Report", "parse_problem", "execute", "emit", "main"]


class ProblemError(ValueError):
    """Problem-file validation failure, with field context."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ProblemFile:
    name: str
    dimension: int
    objects: dict[str, Any]
    tasks: tuple[dict, ...]


@dataclass
class Report:
    problem: str
    dimension: int
    config: dict
    tasks: list[dict] = field(default_factory=list)

    @property
    def any_error(self) -> bool:
        return any(t["status"] == "error" for t in self.tasks)

    @property
    def any_fail(self) -> bool:
        return any(t["status"] == "fail" for t in self.tasks)

    def exit_code(self) -> int:
        if self.any_error:
            return 1
        if self.any_fail:
            return 2
        return 0


# ---------------------------------------------------------------------------
# parsing


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ProblemError(where, "expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ProblemError(where, f"bad rational string {value!r}: {exc}") from None
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value):
        if value[1] == 0:
            raise ProblemError(where, "zero denominator")
        return Fraction(value[0], value[1])
    raise ProblemError(
        where, f"expected int, 'p/q' or [num, den], got {json.dumps(value)}"
    )


def _parse_object(name: str, spec, dimension: int):
    where = f"objects.{name}"
    if not isinstance(spec, dict):
        raise ProblemError(where, "object must be a JSON object")
    kind = spec.get("kind")
    if kind == "monomial_weight":
        _require_keys(spec, {"kind", "exponents"}, where)
        rows = spec.get("exponents")
        if not isinstance(rows, list) or not rows:
            raise ProblemError(f"{where}.exponents", "expected a nonempty list of vectors")
        points = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != dimension:
                raise ProblemError(
                    f"{where}.exponents[{i}]",
                    f"expected a vector of length {dimension}",
                )
            points.append([_rational(x, f"{where}.exponents[{i}][{j}]") for j, x in enumerate(row)])
        try:
            return poly_geom.ExponentSet.of(points, dimension)
        except ValueError as exc:
            raise ProblemError(f"{where}.exponents", str(exc)) from None
    if kind == "polynomial_log":
        _require_keys(spec, {"kind", "terms"}, where)
        return _parse_polylog(spec.get("terms"), dimension, f"{where}.terms")
    if kind == "expr":
        _require_keys(spec, {"kind", "expr"}, where)
        return _parse_expr(spec.get("expr"), dimension, f"{where}.expr")
    raise ProblemError(
        f"{where}.kind", f"unknown kind {kind!r}; expected monomial_weight, polynomial_log or expr"
    )


def _parse_polylog(terms, dimension: int, where: str) -> weights.PolyLog:
    if not isinstance(terms, list) or not terms:
        raise ProblemError(where, "expected a nonempty list of terms")
    parsed = []
    for i, term in enumerate(terms):
        w = f"{where}[{i}]"
        if not isinstance(term, dict):
            raise ProblemError(w, "term must be an object")
        _require_keys(term, {"coeff", "exponent"}, w)
        coeff = term.get("coeff")
        if not (isinstance(coeff, list) and len(coeff) == 2
                and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeff)):
            raise ProblemError(f"{w}.coeff", "expected [re, im]")
        expo = term.get("exponent")
        if not (isinstance(expo, list) and len(expo) == dimension
                and all(isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in expo)):
            raise ProblemError(
                f"{w}.exponent", f"expected {dimension} nonnegative integers"
            )
        parsed.append((complex(coeff[0], coeff[1]), tuple(expo)))
    try:
        return weights.PolyLog(tuple(parsed))
    except ValueError as exc:
        raise ProblemError(where, str(exc)) from None


def _parse_expr(node, dimension: int, where: str):
    if not isinstance(node, dict):
        raise ProblemError(where, "expression node must be an object")
    tag = node.get("node")
    try:
        if tag == "max":
            _require_keys(node, {"node", "children"}, where)
            children = node.get("children")
            if not isinstance(children, list) or not children:
                raise ProblemError(f"{where}.children", "expected a nonempty list")
            return weights.MaxOf(
                tuple(_parse_expr(c, dimension, f"{where}.children[{i}]") for i, c in enumerate(children))
            )
        if tag == "scale":
            _require_keys(node, {"node", "factor", "child"}, where)
            factor = node.get("factor")
            if isinstance(factor, float):
                f: Fraction | float = factor
            else:
                f = _rational(factor, f"{where}.factor")
            return weights.Scale(f, _parse_expr(node.get("child"), dimension, f"{where}.child"))
        if tag == "neg_pow_log":
            _require_keys(node, {"node", "axis", "power"}, where)
            axis = _axis(node.get("axis"), dimension, f"{where}.axis")
            return weights.NegPowLog(axis, _rational(node.get("power"), f"{where}.power"))
        if tag == "coord_log":
            _require_keys(node, {"node", "axis"}, where)
            return weights.CoordLog(_axis(node.get("axis"), dimension, f"{where}.axis"))
        if tag == "poly_log":
            _require_keys(node, {"node", "terms"}, where)
            return _parse_polylog(node.get("terms"), dimension, f"{where}.terms")
    except ValueError as exc:
        if isinstance(exc, ProblemError):
            raise
        raise ProblemError(where, str(exc)) from None
    raise ProblemError(
        f"{where}.node",
        f"unknown node {tag!r}; expected max, scale, neg_pow_log, coord_log or poly_log",
    )


def _axis(value, dimension: int, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= dimension:
        raise ProblemError(where, f"axis must be an integer in 1..{dimension}")
    return value


def _require_keys(obj: dict, allowed: set[str], where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ProblemError(where, f"unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")


_TASK_KEYS = {
    "dominated_hull": {"phi"},
    "sublevel_vertices": {"phi"},
    "gamma_measure": {"phi"},
    "newton_number": {"phi"},
    "dual_face": {"phi", "t0"},
    "directional_lelong_exact": {"u", "a"},
    "generalized_lelong_exact": {"u", "phi"},
    "tau": {"phi", "k"},
    "directional_lelong_numeric": {"w", "a", "schedule"},
    "classical_lelong_numeric": {"w", "schedule"},
    "generalized_lelong_numeric": {"phi", "w", "schedule"},
    "swept_measure_apply": {"phi", "w", "r", "nodes"},
    "slice_lelong": {"w", "k", "schedule"},
    "indicator_profile": {"w", "directions", "schedule"},
    "scaling_transform": {"w", "m"},
    "sandwich_check": {"u", "m_list", "degree_cap"},
    "lelong_bounds_check": {"u", "phi", "m_list", "degree_cap", "tolerance", "schedule"},
}

# slot -> required object kind, per op ("exponent" is a monomial_weight,
# "evaluable" is a polynomial_log or expr tree)
_SLOT_KINDS: dict[str, dict[str, str]] = {
    "dominated_hull": {"phi": "exponent"},
    "sublevel_vertices": {"phi": "exponent"},
    "gamma_measure": {"phi": "exponent"},
    "newton_number": {"phi": "exponent"},
    "dual_face": {"phi": "exponent"},
    "directional_lelong_exact": {"u": "exponent"},
    "generalized_lelong_exact": {"u": "exponent", "phi": "exponent"},
    "tau": {"phi": "exponent"},
    "directional_lelong_numeric": {"w": "evaluable"},
    "classical_lelong_numeric": {"w": "evaluable"},
    "generalized_lelong_numeric": {"phi": "exponent", "w": "evaluable"},
    "swept_measure_apply": {"phi": "exponent", "w": "evaluable"},
    "slice_lelong": {"w": "evaluable"},
    "indicator_profile": {"w": "evaluable"},
    "scaling_transform": {"w": "evaluable"},
    "sandwich_check": {"u": "evaluable"},
    "lelong_bounds_check": {"u": "evaluable", "phi": "exponent"},
}


def parse_problem(source, name: str | None = None) -> ProblemFile:
    """Read and validate a problem file (path, file object, or dict)."""
    if isinstance(source, dict):
        data = source
        label = name or "<inline>"
    else:
        if hasattr(source, "read"):
            text = source.read()
            label = name or getattr(source, "name", "<stream>")
        else:
            label = name or str(source)
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemError(label, f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ProblemError(label, "top level must be a JSON object")
    _require_keys(data, {"dimension", "objects", "tasks"}, label)
    dim = data.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ProblemError(f"{label}.dimension", "expected a positive integer")
    raw_objects = data.get("objects")
    if not isinstance(raw_objects, dict):
        raise ProblemError(f"{label}.objects", "expected an object map")
    objects = {}
    for oname, spec in raw_objects.items():
        objects[oname] = _parse_object(oname, spec, dim)
    raw_tasks = data.get("tasks")
    if not isinstance(raw_tasks, list):
        raise ProblemError(f"{label}.tasks", "expected a list")
    tasks = []
    for i, task in enumerate(raw_tasks):
        where = f"tasks[{i}]"
        if not isinstance(task, dict):
            raise ProblemError(where, "task must be an object")
        op = task.get("op")
        if op not in _TASK_KEYS:
            raise ProblemError(f"{where}.op", f"unknown op {op!r}")
        _require_keys(task, _TASK_KEYS[op] | {"op"}, where)
        for slot, kind in _SLOT_KINDS[op].items():
            if slot not in task:
                raise ProblemError(where, f"op {op!r} needs a {slot!r} reference")
            ref = task[slot]
            if ref not in objects:
                raise ProblemError(f"{where}.{slot}", f"undefined object {ref!r}")
            is_exponent = isinstance(objects[ref], poly_geom.ExponentSet)
            if kind == "exponent" and not is_exponent:
                raise ProblemError(
                    f"{where}.{slot}", f"object {ref!r} must be a monomial_weight"
                )
            if kind == "evaluable" and is_exponent:
                raise ProblemError(
                    f"{where}.{slot}",
                    f"object {ref!r} must be pointwise evaluable (polynomial_log or expr)",
                )
        tasks.append(task)
    return ProblemFile(name=label, dimension=dim, objects=objects, tasks=tuple(tasks))


# ---------------------------------------------------------------------------
# execution


def _schedule_from(task: dict, default: RadialSchedule, where: str) -> RadialSchedule:
    spec = task.get("schedule")
    if spec is None:
        return default
    if not isinstance(spec, dict):
        raise ProblemError(f"{where}.schedule", "expected an object")
    _require_keys(spec, {"levels", "nodes", "extrapolation"}, f"{where}.schedule")
    levels = spec.get("levels", list(default.levels))
    nodes = spec.get("nodes", default.angular_nodes)
    extrap = spec.get("extrapolation", default.extrapolation)
    try:
        return RadialSchedule(tuple(float(x) for x in levels), int(nodes), str(extrap))
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"{where}.schedule", str(exc)) from None


def _floatlike(value, where: str) -> float:
    """Accept JSON numbers and exact-rational forms in float slots."""
    if isinstance(value, bool):
        raise ProblemError(where, "expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    return float(_rational(value, where))


def _frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _vec_strs(v) -> list[str]:
    return [_frac_str(x) for x in v]


def _estimate_record(est: numeric_oracle.LimitEstimate) -> dict:
    return {
        "value": est.value,
        "stderr": est.stderr,
        "levels_used": list(est.levels_used),
        "per_level": [
            {
                "r": lv["r"],
                "mean": lv["mean"],
                "ratio": lv["ratio"],
                "clipped": lv["clipped"],
                "rejected": lv["rejected"],
            }
            for lv in est.diagnostics.get("levels", [])
        ],
        "extrapolation": est.diagnostics.get("extrapolation"),
        "angular_nodes": est.diagnostics.get("angular_nodes"),
    }


def _expr_record(w) -> dict:
    if isinstance(w, weights.PolyLog):
        return {
            "node": "poly_log",
            "terms": [
                {"coeff": [c.real, c.imag], "exponent": list(J)} for c, J in w.terms
            ],
        }
    if isinstance(w, weights.CoordLog):
        return {"node": "coord_log", "axis": w.axis}
    if isinstance(w, weights.NegPowLog):
        return {"node": "neg_pow_log", "axis": w.axis, "power": _frac_str(w.power)}
    if isinstance(w, weights.MaxOf):
        return {"node": "max", "children": [_expr_record(c) for c in w.children]}
    if isinstance(w, weights.Scale):
        factor = _frac_str(w.factor) if isinstance(w.factor, Fraction) else w.factor
        return {"node": "scale", "factor": factor, "child": _expr_record(w.child)}
    raise TypeError(type(w).__name__)


def _run_task(task: dict, p: ProblemFile, default_sched: RadialSchedule,
              default_tol: float, where: str) -> tuple[str, dict]:
    op = task["op"]
    obj = p.objects

    if op == "dominated_hull":
        hull = poly_geom.dominated_hull(obj[task["phi"]])
        return "ok", {
            "hull_vertices": [_vec_strs(v) for v in hull.hull_vertices],
            "bounded_faces": [
                {"vertices": [_vec_strs(v) for v in f.vertices], "normal": _vec_strs(f.normal)}
                for f in hull.bounded_faces
            ],
        }
    if op == "sublevel_vertices":
        sub = poly_geom.sublevel_vertices(obj[task["phi"]])
        return "ok", {"extreme_points": [_vec_strs(v) for v in sub.extreme_points]}
    if op == "gamma_measure":
        gm = poly_geom.gamma_measure(obj[task["phi"]])
        return "ok", {
            "atoms": [
                {"vertex": _vec_strs(t0), "mass": _frac_str(mass)} for t0, mass in gm.atoms
            ],
            "total_mass": _frac_str(gm.total_mass),
        }
    if op == "newton_number":
        vv = indicator_calculus.newton_number(obj[task["phi"]])
        return "ok", {"value": _frac_str(vv.value), "kind": vv.kind}
    if op == "dual_face":
        t0 = [_rational(x, f"{where}.t0[{i}]") for i, x in enumerate(task["t0"])]
        face = poly_geom.dual_face(obj[task["phi"]], t0)
        return "ok", {"face_vertices": [_vec_strs(v) for v in face]}
    if op == "directional_lelong_exact":
        a = [_rational(x, f"{where}.a[{i}]") for i, x in enumerate(task["a"])]
        vv = indicator_calculus.directional_lelong_exact(obj[task["u"]], a)
        return "ok", {"value": _frac_str(vv.value), "kind": vv.kind}
    if op == "generalized_lelong_exact":
        vv = indicator_calculus.generalized_lelong_exact(obj[task["u"]], obj[task["phi"]])
        return "ok", {"value": _frac_str(vv.value), "kind": vv.kind}
    if op == "tau":
        vv = indicator_calculus.tau(obj[task["phi"]], int(task["k"]))
        return "ok", {"value": _frac_str(vv.value), "kind": vv.kind}
    if op == "directional_lelong_numeric":
        sched = _schedule_from(task, default_sched, where)
        a = [_floatlike(x, f"{where}.a[{i}]") for i, x in enumerate(task["a"])]
        est = numeric_oracle.directional_lelong_numeric(obj[task["w"]], a, sched)
        return "ok", _estimate_record(est)
    if op == "classical_lelong_numeric":
        sched = _schedule_from(task, default_sched, where)
        est = numeric_oracle.classical_lelong_numeric(obj[task["w"]], sched, dim=p.dimension)
        return "ok", _estimate_record(est)
    if op == "generalized_lelong_numeric":
        sched = _schedule_from(task, default_sched, where)
        est = numeric_oracle.generalized_lelong_numeric(obj[task["phi"]], obj[task["w"]], sched)
        return "ok", _estimate_record(est)
    if op == "swept_measure_apply":
        nodes = int(task.get("nodes", default_sched.angular_nodes))
        r = _floatlike(task["r"], f"{where}.r")
        val = numeric_oracle.swept_measure_apply(obj[task["phi"]], obj[task["w"]], r, nodes)
        return "ok", {"value": val, "r": r, "nodes": nodes}
    if op == "slice_lelong":
        sched = _schedule_from(task, default_sched, where)
        est = numeric_oracle.slice_lelong(obj[task["w"]], int(task["k"]), sched, dim=p.dimension)
        return "ok", _estimate_record(est)
    if op == "indicator_profile":
        sched = _schedule_from(task, default_sched, where)
        directions = [
            [_floatlike(x, f"{where}.directions[{i}][{j}]") for j, x in enumerate(d)]
            for i, d in enumerate(task["directions"])
        ]
        entries = numeric_oracle.indicator_profile(obj[task["w"]], directions, sched)
        return "ok", {
            "profile": [
                {
                    "direction": list(e.direction),
                    "value": None if e.estimate is None else e.estimate.value,
                    "stderr": None if e.estimate is None else e.estimate.stderr,
                    "error": e.error,
                }
                for e in entries
            ]
        }
    if op == "scaling_transform":
        out = weights.scaling_transform(obj[task["w"]], int(task["m"]))
        return "ok", {"expr": _expr_record(out)}
    if op == "sandwich_check":
        rep = demailly.sandwich_check(
            obj[task["u"]], [int(m) for m in task["m_list"]],
            task.get("degree_cap"), dim=p.dimension,
        )
        status = "pass" if rep.passed else "fail"
        return status, {
            "c1_by_m": {str(m): v for m, v in rep.c1_by_m.items()},
            "c2_by_m": {str(m): v for m, v in rep.c2_by_m.items()},
        }
    if op == "lelong_bounds_check":
        sched = _schedule_from(task, default_sched, where)
        tol = float(task.get("tolerance", default_tol))
        rep = demailly.lelong_bounds_check(
            obj[task["u"]], obj[task["phi"]], [int(m) for m in task["m_list"]],
            task.get("degree_cap"), sched=sched, tolerance=tol, dim=p.dimension,
        )
        status = "pass" if rep.passed else "fail"
        return status, {
            "exact": _frac_str(rep.exact),
            "tau_sum": _frac_str(rep.tau_sum),
            "estimates_by_m": {
                str(m): {
                    "estimate": rec["estimate"],
                    "stderr": rec["stderr"],
                    "lower_ok": rec["lower_ok"],
                    "upper_ok": rec["upper_ok"],
                    "admissible": rec["admissible"],
                }
                for m, rec in rep.estimates_by_m.items()
            },
            "tolerance": tol,
        }
    raise AssertionError(f"unhandled op {op}")


def execute(p: ProblemFile, default_sched: RadialSchedule = numeric_oracle.DEFAULT_SCHEDULE,
            default_tol: float = 0.02) -> Report:
    """Run all tasks in file order; task failures are isolated per task."""
    report = Report(
        problem=p.name,
        dimension=p.dimension,
        config={
            "schedule": {
                "levels": list(default_sched.levels),
                "nodes": default_sched.angular_nodes,
                "extrapolation": default_sched.extrapolation,
            },
            "tolerance": default_tol,
            "clip_floor": numeric_oracle.CLIP_FLOOR,
        },
    )
    for i, task in enumerate(p.tasks):
        where = f"tasks[{i}]"
        record = {"index": i, "op": task["op"], "inputs": _echo(task)}
        try:
            status, result = _run_task(task, p, default_sched, default_tol, where)
            record["status"] = status
            record["result"] = result
        except Exception as exc:  # isolate per task
            record["status"] = "error"
            record["error"] = f"{type(exc).__name__}: {exc}"
        report.tasks.append(record)
    return report


def _echo(task: dict) -> dict:
    return json.loads(json.dumps(task, sort_keys=True))


# ---------------------------------------------------------------------------
# emission


def _round_floats(x):
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return repr(x)
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _round_floats(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round_floats(v) for v in x]
    return x


def report_dict(report: Report) -> dict:
    return _round_floats(
        {
            "problem": report.problem,
            "dimension": report.dimension,
            "config": report.config,
            "tasks": report.tasks,
            "summary": {
                "total": len(report.tasks),
                "errors": sum(t["status"] == "error" for t in report.tasks),
                "failed_checks": sum(t["status"] == "fail" for t in report.tasks),
            },
        }
    )


def emit(report: Report, fmt: str) -> bytes:
    """Deterministic serialization; rationals exact, floats at 12 digits."""
    if fmt == "json":
        payload = json.dumps(report_dict(report), sort_keys=True, indent=2)
        return (payload + "\n").encode("utf-8")
    if fmt == "text":
        return _emit_text(report).encode("utf-8")
    if fmt == "csv":
        return _emit_csv(report).encode("utf-8")
    raise ValueError(f"unsupported format {fmt!r}; expected text, json or csv")


def _flatten(prefix: str, value, rows: list[tuple[str, str]]):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(value)))


def _emit_text(report: Report) -> str:
    out = io.StringIO()
    data = report_dict(report)
    out.write(f"problem: {data['problem']}   dimension: {data['dimension']}\n")
    for task in data["tasks"]:
        out.write(f"\n[{task['index']}] {task['op']}  ->  {task['status'].upper()}\n")
        rows: list[tuple[str, str]] = []
        _flatten("inputs", task["inputs"], rows)
        if "result" in task:
            _flatten("result", task["result"], rows)
        if "error" in task:
            rows.append(("error", json.dumps(task["error"])))
        width = max((len(k) for k, _ in rows), default=0)
        for k, v in rows:
            out.write(f"  {k.ljust(width)}  {v}\n")
    s = data["summary"]
    out.write(
        f"\nsummary: {s['total']} tasks, {s['errors']} errors, {s['failed_checks']} failed checks\n"
    )
    return out.getvalue()


def _emit_csv(report: Report) -> str:
    out = io.StringIO()
    data = report_dict(report)
    for task in data["tasks"]:
        out.write(f"# task {task['index']}: {task['op']} ({task['status']})\n")
        result = task.get("result", {})
        if task["op"] == "gamma_measure" and "atoms" in result:
            dim = report.dimension
            coord_cols = ",".join(f"vertex_{k + 1}" for k in range(dim))
            out.write(f"{coord_cols},mass_num,mass_den\n")
            for atom in result["atoms"]:
                mass = Fraction(atom["mass"])
                out.write(
                    ",".join(atom["vertex"])
                    + f",{mass.numerator},{mass.denominator}\n"
                )
            out.write(f"total_mass,{result['total_mass']}\n")
        else:
            rows: list[tuple[str, str]] = []
            _flatten("", result, rows)
            if "error" in task:
                rows.append(("error", json.dumps(task["error"])))
            out.write("field,value\n")
            for k, v in rows:
                out.write(f"{k},{v}\n")
        out.write("\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# built-in golden suite


def _golden_problems() -> list[tuple[dict, list[dict]]]:
    """(problem, expectations) pairs; expectations name a task index and check."""
    exact_problem = {
        "dimension": 2,
        "objects": {
            "diag_mono": {"kind": "monomial_weight", "exponents": [[1, 1]]},
            "diag_tri": {"kind": "monomial_weight", "exponents": [[4, 0], [1, 1], [0, 4]]},
            "diag_cusp": {"kind": "monomial_weight", "exponents": [[2, 0], [0, 3]]},
            "diag_axes": {"kind": "monomial_weight", "exponents": [[1, 0], [0, 1]]},
        },
        "tasks": [
            {"op": "newton_number", "phi": "diag_cusp"},
            {"op": "newton_number", "phi": "diag_axes"},
            {"op": "newton_number", "phi": "diag_tri"},
            {"op": "gamma_measure", "phi": "diag_tri"},
            {"op": "generalized_lelong_exact", "u": "diag_mono", "phi": "diag_tri"},
            {"op": "tau", "phi": "diag_cusp", "k": 1},
            {"op": "tau", "phi": "diag_cusp", "k": 2},
            {"op": "directional_lelong_exact", "u": "diag_cusp", "a": [1, 1]},
            {"op": "dual_face", "phi": "diag_tri", "t0": ["-1/4", "-3/4"]},
        ],
    }
    exact_expect = [
        {"task": 0, "path": ("result", "value"), "equals": "6"},
        {"task": 1, "path": ("result", "value"), "equals": "1"},
        {"task": 2, "path": ("result", "value"), "equals": "8"},
        {"task": 3, "path": ("result", "total_mass"), "equals": "4"},
        {"task": 4, "path": ("result", "value"), "equals": "8"},
        {"task": 5, "path": ("result", "value"), "equals": "3"},
        {"task": 6, "path": ("result", "value"), "equals": "2"},
        {"task": 7, "path": ("result", "value"), "equals": "2"},
        {"task": 8, "path": ("result", "face_vertices"), "equals": [["1", "1"], ["4", "0"]]},
    ]
    numeric_problem = {
        "dimension": 2,
        "objects": {
            "cusp_poly": {
                "kind": "polynomial_log",
                "terms": [
                    {"coeff": [1, 0], "exponent": [2, 0]},
                    {"coeff": [1, 0], "exponent": [0, 3]},
                ],
            },
            "axes_weight": {"kind": "monomial_weight", "exponents": [[1, 0], [0, 1]]},
            "flat_weight": {
                "kind": "expr",
                "expr": {
                    "node": "max",
                    "children": [
                        {"node": "neg_pow_log", "axis": 1, "power": "1/2"},
                        {"node": "coord_log", "axis": 2},
                    ],
                },
            },
        },
        "tasks": [
            {"op": "directional_lelong_numeric", "w": "cusp_poly", "a": [1, 1]},
            {"op": "generalized_lelong_numeric", "phi": "axes_weight", "w": "cusp_poly"},
            {"op": "slice_lelong", "w": "flat_weight", "k": 1},
            {"op": "swept_measure_apply", "phi": "axes_weight", "w": "cusp_poly", "r": -5, "nodes": 256},
        ],
    }
    numeric_expect = [
        {"task": 0, "path": ("result", "value"), "close_to": 2.0, "rel_tol": 0.02},
        {"task": 1, "path": ("result", "value"), "close_to": 2.0, "rel_tol": 0.02},
        {"task": 2, "path": ("result", "value"), "close_to": 1.0, "rel_tol": 0.01},
        {"task": 3, "path": ("result", "value"), "close_to": -10.0, "rel_tol": 0.01},
    ]
    return [(exact_problem, exact_expect), (numeric_problem, numeric_expect)]


def run_selftest() -> tuple[dict, int]:
    """Execute the embedded golden problems and check the frozen expectations."""
    sections = []
    worst = 0
    for idx, (problem, expectations) in enumerate(_golden_problems()):
        p = parse_problem(problem, name=f"selftest[{idx}]")
        report = execute(p)
        data = report_dict(report)
        checks = []
        for exp in expectations:
            task = data["tasks"][exp["task"]]
            value: Any = task
            try:
                for key in exp["path"]:
                    value = value[key]
            except (KeyError, TypeError):
                value = None
            if "equals" in exp:
                ok = value == exp["equals"]
                checks.append(
                    {"task": exp["task"], "expect": exp["equals"], "got": value, "pass": ok}
                )
            else:
                target = exp["close_to"]
                ok = (
                    isinstance(value, (int, float))
                    and abs(value - target) <= exp["rel_tol"] * abs(target)
                )
                checks.append(
                    {"task": exp["task"], "expect": target, "got": value,
                     "rel_tol": exp["rel_tol"], "pass": ok}
                )
            if not checks[-1]["pass"]:
                worst = max(worst, 2)
        if report.any_error:
            worst = max(worst, 1)
        sections.append({"problem": data, "checks": checks})
    payload = _round_floats({"selftest": sections, "exit_code": worst})
    return payload, worst


# ---------------------------------------------------------------------------
# entry point


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lelong",
        description="Exact and numerical Lelong-number calculus for monomial-type weights.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a JSON problem file")
    run_p.add_argument("file", help="problem file path")
    run_p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    run_p.add_argument("--out", default=None, help="write output to a file instead of stdout")
    run_p.add_argument("--rmin", type=float, default=-30.0, help="deepest schedule level")
    run_p.add_argument("--levels", type=int, default=4, help="number of schedule levels")
    run_p.add_argument("--nodes", type=int, default=256, help="angular quadrature nodes")
    run_p.add_argument("--tol", type=float, default=0.02, help="default check tolerance")

    sub.add_parser("selftest", help="run the built-in golden suite (JSON on stdout)")

    args = parser.parse_args(argv)

    if args.command == "selftest":
        payload, code = run_selftest()
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return code

    try:
        problem = parse_problem(args.file)
    except (ProblemError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    if args.rmin >= 0:
        sys.stderr.write("error: --rmin must be negative\n")
        return 1
    sched = RadialSchedule.geometric(args.rmin, args.levels, args.nodes)
    report = execute(problem, default_sched=sched, default_tol=args.tol)
    blob = emit(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(blob)
    else:
        sys.stdout.buffer.write(blob)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
