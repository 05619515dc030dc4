"""Machine-readable reports and their text/CSV renderings.

Reports are plain dicts of JSON types. Stored numbers are never rounded;
rounding happens only in ``render_table``, so a report parsed back from JSON
renders identically. Schemas are described in ``docs/report-schemas.md``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import fields

from . import __version__
from .constants import AtomSpec, ConstantSet, convert
from .extraction import (ExtractionInput, MonteCarloResult, PrecisionPlan, extract_zemach_radius,
                         linear_breakdown, residual_decomposition)
from .formfactors import FormFactorModel, model_to_dict
from .hfs import HfsBudget
from .units import Measurement, Unit
from .zemach import ZemachResult, zemach_factor


def _m(m: Measurement) -> dict:
    return m.to_dict()


def _header(schema: str, constants: ConstantSet) -> dict:
    return {"schema": schema, "generator": f"hfszemach {__version__}",
            "constants_version": constants.version}


def _atom(atom: AtomSpec) -> dict:
    return {"name": atom.name, "lepton": atom.lepton.value,
            "lepton_mass": _m(atom.lepton_mass), "reduced_mass": _m(atom.reduced_mass),
            "lepton_anomaly": _m(atom.lepton_anomaly)}


def budget_report(budget: HfsBudget, radius: Measurement, constants: ConstantSet,
                  model: FormFactorModel | None = None) -> dict:
    total = budget.total
    rep = _header("hfszemach.budget/1", constants)
    rep.update({
        "atom": _atom(budget.atom),
        "radius": _m(radius),
        "fermi": _m(budget.fermi),
        "terms": [t.to_dict() for t in budget.terms],
        "correction_sum": budget.correction_sum,
        "combination": budget.combination,
        "total": {
            "native": _m(total),
            "Hz": _m(convert(total, Unit.HZ, constants)),
            "eV": _m(convert(total, Unit.EV, constants)),
            "um": _m(convert(total, Unit.UM, constants)),
        },
    })
    if model is not None:
        rep["model"] = {"name": model.name, "source": model.source}
    return rep


def zemach_report(results: list[dict], constants: ConstantSet) -> dict:
    """``results`` items: {"model": FormFactorModel, "momentum": ZemachResult, ...}."""
    rows = []
    for item in results:
        model: FormFactorModel = item["model"]
        row = {"model": model.name, "source": model.source, "definition": model_to_dict(model)}
        for key in ("momentum", "coordinate", "analytic"):
            res: ZemachResult | None = item.get(key)
            if res is not None:
                row[key] = {"radius_fm": res.radius.value, "quadrature_error_fm": res.quadrature_error}
        rows.append(row)
    rep = _header("hfszemach.zemach/1", constants)
    rep["results"] = rows
    radii = [r["momentum"]["radius_fm"] for r in rows if "momentum" in r]
    if len(radii) > 1:
        rep["model_spread_fm"] = {"min": min(radii), "max": max(radii),
                                  "spread": max(radii) - min(radii)}
    return rep


def extraction_report(inp: ExtractionInput, mc: MonteCarloResult | None = None,
                      mc_settings: dict | None = None) -> dict:
    radius = extract_zemach_radius(inp)
    factor = zemach_factor(inp.atom, inp.constants)
    breakdown = {k: {"fm": v, "ppm": v * factor * 1e6}
                 for k, v in sorted(linear_breakdown(inp).items())}
    rep = _header("hfszemach.extraction/1", inp.constants)
    rep.update({
        "atom": _atom(inp.atom),
        "exp_hfs": _m(inp.exp_hfs),
        "corrections": [t.to_dict() for t in inp.corrections],
        "radius": _m(radius),
        "uncertainty_breakdown": breakdown,
        "residual_decomposition": residual_decomposition(inp),
    })
    if mc is not None:
        rep["monte_carlo"] = {
            "mean_fm": mc.radius.value, "sigma_fm": mc.radius.uncertainty,
            "sigma_standard_error_fm": mc.sigma_standard_error,
            "negative_draws": mc.negative_draws, "algorithm": mc.algorithm,
            **(mc_settings or {}),
        }
    return rep


def plan_report(plan: PrecisionPlan, atom: AtomSpec, constants: ConstantSet,
                radius: Measurement) -> dict:
    rep = _header("hfszemach.plan/1", constants)
    rep.update({"atom": _atom(atom), "radius_assumed": _m(radius), "plan": plan.to_dict()})
    return rep


def models_report(models: dict) -> dict:
    return {"schema": "hfszemach.models/1", "generator": f"hfszemach {__version__}",
            "models": [{"name": name, "kind": model_to_dict(m)["kind"], "source": m.source}
                       for name, m in models.items()]}


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n"


# --- text rendering ----------------------------------------------------------

# row order is fixed here, not taken from dict order, so JSON round trips render the same
_TOTAL_UNITS = ("native", "Hz", "eV", "um")
_PLAN_FIELDS = tuple(f.name for f in fields(PrecisionPlan))


def _fmt(x, spec=".10g") -> str:
    return "-" if x is None else format(x, spec)


def _table(rows, headers) -> str:
    widths = [max(len(str(r[i])) for r in [headers, *rows]) for i in range(len(headers))]
    line = "  ".join("{:<%d}" % w for w in widths)
    out = [line.format(*headers), line.format(*("-" * w for w in widths))]
    out += [line.format(*map(str, r)) for r in rows]
    return "\n".join(s.rstrip() for s in out)


def _meas_row(label, d):
    return [label, _fmt(d["value"]), _fmt(d["uncertainty"], ".3g"), d["unit"]]


def render_table(report: dict) -> str:
    schema = report["schema"].split("/")[0]
    head = [f"# {report['schema']}"]
    if "constants_version" in report:
        head.append(f"# constants: {report['constants_version']}")
    if schema == "hfszemach.budget":
        head.append(f"# atom: {report['atom']['name']}  R_p = {_fmt(report['radius']['value'])} fm"
                    + (f"  model: {report['model']['name']}" if "model" in report else ""))
        rows = [_meas_row("E_F", report["fermi"])]
        rows += [[f"delta_{t['name']}", _fmt(t["value"]), _fmt(t["uncertainty"], ".3g"),
                  t["provenance"]] for t in report["terms"]]
        rows += [_meas_row(f"total [{k}]", report["total"][k]) for k in _TOTAL_UNITS]
        body = _table(rows, ["quantity", "value", "uncertainty", "unit/provenance"])
    elif schema == "hfszemach.zemach":
        rows = []
        for r in report["results"]:
            rows.append([r["model"],
                         _fmt(r.get("momentum", {}).get("radius_fm")),
                         _fmt(r.get("coordinate", {}).get("radius_fm")),
                         _fmt(r.get("analytic", {}).get("radius_fm")),
                         _fmt(r.get("momentum", {}).get("quadrature_error_fm"), ".2g")])
        body = _table(rows, ["model", "momentum [fm]", "coordinate [fm]", "analytic [fm]",
                             "quad. error [fm]"])
        if "model_spread_fm" in report:
            s = report["model_spread_fm"]
            body += f"\nmodel spread: {_fmt(s['spread'], '.4g')} fm ({_fmt(s['min'], '.5g')} .. {_fmt(s['max'], '.5g')})"
    elif schema == "hfszemach.extraction":
        r = report["radius"]
        head.append(f"# atom: {report['atom']['name']}")
        rows = [_meas_row("exp HFS", report["exp_hfs"])]
        rows += [[f"delta_{t['name']}", _fmt(t["value"]), _fmt(t["uncertainty"], ".3g"),
                  t["provenance"]] for t in report["corrections"]]
        rows.append(_meas_row("R_p", r))
        body = _table(rows, ["quantity", "value", "uncertainty", "unit/provenance"])
        brows = [[k, _fmt(v["fm"], ".4g"), _fmt(v["ppm"], ".4g")]
                 for k, v in report["uncertainty_breakdown"].items()]
        body += "\n\n" + _table(brows, ["source", "sigma [fm]", "sigma [ppm]"])
        if "monte_carlo" in report:
            mc = report["monte_carlo"]
            body += (f"\n\nMonte Carlo: R_p = {_fmt(mc['mean_fm'])} fm, sigma = {_fmt(mc['sigma_fm'], '.6g')}"
                     f" ± {_fmt(mc['sigma_standard_error_fm'], '.2g')} fm")
    elif schema == "hfszemach.plan":
        p = report["plan"]
        head.append(f"# atom: {report['atom']['name']}  R_p assumed = {_fmt(report['radius_assumed']['value'])} fm")
        rows = [[k, str(p[k]) if isinstance(p[k], bool) else _fmt(p[k])] for k in _PLAN_FIELDS]
        body = _table(rows, ["quantity", "value"])
    elif schema == "hfszemach.models":
        body = _table([[m["name"], m["kind"], m["source"]] for m in report["models"]],
                      ["name", "kind", "source"])
    else:
        raise ValueError(f"unknown report schema {report['schema']!r}")
    return "\n".join(head) + "\n" + body + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            key = v.get("name", v.get("model", i)) if isinstance(v, dict) else i
            yield from _flatten(v, f"{prefix}[{key}]")
    else:
        yield prefix, obj


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in _flatten(report):
        writer.writerow([key, repr(value) if isinstance(value, float) else value])
    return buf.getvalue()
