import json

import pytest

from hfszemach import (ExtractionInput, Measurement, assemble_budget, propagate_monte_carlo,
                       plan_precision, zemach_radius_momentum)
from hfszemach.formfactors import bundled_models
from hfszemach.report import (budget_report, extraction_report, models_report, plan_report,
                              render_csv, render_table, to_json, zemach_report)

R104 = Measurement(1.04, 0.0, "fm")


@pytest.fixture(scope="module")
def reports(constants, hydrogen, muonic):
    models = bundled_models()
    inp = ExtractionInput.with_defaults(hydrogen, Measurement(1420405751.7667, 0.0009, "Hz"), constants)
    return {
        "budget": budget_report(assemble_budget(muonic, R104, constants=constants), R104, constants),
        "zemach": zemach_report([{"model": m, "momentum": zemach_radius_momentum(m, constants)}
                                 for m in models.values()], constants),
        "extraction": extraction_report(inp, propagate_monte_carlo(inp, 2000), {"samples": 2000, "seed": 0}),
        "plan": plan_report(plan_precision(muonic, 0.005, 3e-5, constants), muonic, constants, R104),
        "models": models_report(models),
    }


KINDS = ["budget", "zemach", "extraction", "plan", "models"]


@pytest.mark.parametrize("kind", KINDS)
def test_schema_header(reports, kind):
    rep = reports[kind]
    assert rep["schema"] == f"hfszemach.{kind}/1"
    assert rep["generator"].startswith("hfszemach ")


@pytest.mark.parametrize("kind", KINDS)
def test_json_round_trip_renders_identically(reports, kind):
    rep = reports[kind]
    again = json.loads(to_json(rep))
    assert again == rep
    assert render_table(again) == render_table(rep)
    assert render_csv(again) == render_csv(rep)


def test_constants_version_recorded(reports):
    for kind in ("budget", "zemach", "extraction", "plan"):
        assert reports[kind]["constants_version"] == "CODATA-2018"


def test_budget_units(reports):
    total = reports["budget"]["total"]
    assert set(total) == {"native", "Hz", "eV", "um"}
    assert total["native"]["unit"] == "meV"
    assert total["um"]["value"] == pytest.approx(6.82, abs=0.01)


def test_zemach_spread(reports):
    s = reports["zemach"]["model_spread_fm"]
    assert s["spread"] == pytest.approx(s["max"] - s["min"])
    assert s["min"] == pytest.approx(1.0246, abs=1e-4)


def test_extraction_breakdown_in_fm_and_ppm(reports, hydrogen, constants):
    br = reports["extraction"]["uncertainty_breakdown"]
    assert br["pol"]["ppm"] == pytest.approx(0.6, rel=1e-12)
    assert "monte_carlo" in reports["extraction"]


def test_table_has_fermi_row(reports):
    text = render_table(reports["budget"])
    assert "E_F" in text and "182.44" in text


def test_unknown_schema():
    with pytest.raises(ValueError):
        render_table({"schema": "other/1"})
