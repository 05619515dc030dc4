import math

import numpy as np
import pytest

from hfszemach import (ConstantSet, CorrectionTerm, ExtractionInput, Measurement, PhysicalConstant,
                       assemble_budget, extract_zemach_radius, plan_precision, propagate_monte_carlo)
from hfszemach.extraction import (ExtractionError, linear_breakdown, monte_carlo_samples,
                                  residual_decomposition)
from hfszemach.hfs import standard_corrections
from hfszemach.zemach import zemach_factor

EXP_H = Measurement(1420405751.7667, 0.0009, "Hz")


def _synthetic(atom, constants, radius, rel_unc=0.0):
    total = assemble_budget(atom, Measurement(radius, 0.0, "fm"), constants=constants).total
    return ExtractionInput.with_defaults(atom, Measurement(total.value, rel_unc * total.value, total.unit),
                                         constants)


def test_hydrogen_extraction(constants, hydrogen):
    r = extract_zemach_radius(ExtractionInput.with_defaults(hydrogen, EXP_H, constants))
    assert r.value == pytest.approx(1.040, abs=0.025)
    assert r.value == pytest.approx(1.06388, abs=1e-5)
    assert r.uncertainty == pytest.approx(0.016, abs=0.001)


def test_pol_sets_the_uncertainty(constants, hydrogen):
    br = linear_breakdown(ExtractionInput.with_defaults(hydrogen, EXP_H, constants))
    assert br["pol"] == pytest.approx(0.6e-6 / zemach_factor(hydrogen, constants), rel=1e-14)
    assert br["pol"] == pytest.approx(0.0159, abs=1e-4)
    assert max(br, key=br.get) == "pol"


def test_point_proton_closure(constants, atom):
    terms = standard_corrections(atom, constants)
    from hfszemach import fermi_energy
    f = fermi_energy(atom, constants)
    exp = Measurement(f.value * (1.0 + math.fsum(t.value.value for t in terms)), 0.0, f.unit)
    r = extract_zemach_radius(ExtractionInput(atom, exp, terms, constants))
    assert abs(r.value) < 1e-12


@pytest.mark.parametrize("radius", [0.5, 1.0, 1.5])
def test_round_trip(constants, atom, radius):
    r = extract_zemach_radius(_synthetic(atom, constants, radius))
    assert r.value == pytest.approx(radius, rel=1e-10)


def test_derivative_with_respect_to_pol(constants, atom):
    h = 1e-7
    base = ExtractionInput.with_defaults(atom, _synthetic(atom, constants, 1.0).exp_hfs, constants)
    pol = base.term("pol").value.value

    def radius(p):
        inp = ExtractionInput.with_defaults(atom, base.exp_hfs, constants, [CorrectionTerm.user("pol", p, 0.0)])
        return extract_zemach_radius(inp).value

    # R = -(E/F - 1 - ... - pol)/(2 α m_r), so a larger pol raises R
    slope = (radius(pol + h) - radius(pol - h)) / (2 * h)
    assert slope == pytest.approx(1.0 / zemach_factor(atom, constants), rel=1e-8)


def test_negative_radius_reports_terms(constants, hydrogen):
    with pytest.raises(ExtractionError) as info:
        extract_zemach_radius(ExtractionInput.with_defaults(hydrogen, Measurement(1.43e9, 0.0, "Hz"),
                                                            constants))
    assert "delta_pol" in info.value.decomposition


def test_residual_decomposition_sums(constants, hydrogen):
    d = residual_decomposition(ExtractionInput.with_defaults(hydrogen, EXP_H, constants))
    parts = d["exp_over_fermi_minus_one"] - sum(d[f"delta_{n}"] for n in ("qed", "recoil", "pol", "hvp"))
    assert d["zemach_residual"] == pytest.approx(parts, rel=1e-12)
    assert d["radius_fm"] == pytest.approx(-d["zemach_residual"] / d["zemach_factor_per_fm"], rel=1e-15)


def test_exp_in_other_unit(constants, hydrogen):
    a = extract_zemach_radius(ExtractionInput.with_defaults(hydrogen, EXP_H, constants))
    b = extract_zemach_radius(ExtractionInput.with_defaults(hydrogen, EXP_H.scale(1e-6, "MHz"), constants))
    assert b.value == pytest.approx(a.value, rel=1e-12)


def test_input_validation(constants, hydrogen):
    terms = standard_corrections(hydrogen, constants)[:3]
    with pytest.raises(ValueError, match="exactly"):
        ExtractionInput(hydrogen, EXP_H, terms, constants)
    with pytest.raises(ValueError):
        ExtractionInput.with_defaults(hydrogen, EXP_H, constants, [CorrectionTerm.user("zemach", 0.0)])
    with pytest.raises(ValueError):
        ExtractionInput.with_defaults(hydrogen, Measurement(1.0, 0.0, "GeV^2"), constants)


# --- Monte Carlo -----------------------------------------------------------------

def _mc_input(atom, constants):
    if atom.name == "hydrogen":
        return ExtractionInput.with_defaults(atom, EXP_H, constants)
    return _synthetic(atom, constants, 1.04, 30e-6)


def test_mc_matches_linear(constants, atom):
    inp = _mc_input(atom, constants)
    mc = propagate_monte_carlo(inp, 100_000, seed=1)
    lin = extract_zemach_radius(inp)
    assert abs(mc.radius.uncertainty - lin.uncertainty) <= 3 * mc.sigma_standard_error
    assert mc.radius.value == pytest.approx(lin.value, abs=3 * lin.uncertainty / math.sqrt(100_000) * 1.5)


def test_mc_partition_invariant(constants, hydrogen):
    inp = _mc_input(hydrogen, constants)
    a = monte_carlo_samples(inp, 40_000, seed=7, n_jobs=1)
    b = monte_carlo_samples(inp, 40_000, seed=7, n_jobs=4)
    assert np.array_equal(a, b)


def test_mc_seed_controls_stream(constants, hydrogen):
    inp = _mc_input(hydrogen, constants)
    assert propagate_monte_carlo(inp, 5000, seed=3) == propagate_monte_carlo(inp, 5000, seed=3)
    assert propagate_monte_carlo(inp, 5000, seed=3).radius != propagate_monte_carlo(inp, 5000, seed=4).radius


def test_mc_without_uncertainty(constants, hydrogen):
    exact = ConstantSet("exact", {n: PhysicalConstant(n, c.value, 0.0, c.unit)
                                  for n, c in constants.constants.items()})
    from hfszemach import make_atom
    atom = make_atom(exact, "hydrogen")
    terms = [CorrectionTerm.user(t.name, t.value.value, 0.0) for t in standard_corrections(atom, exact)]
    inp = ExtractionInput(atom, Measurement(EXP_H.value, 0.0, "Hz"), terms, exact)
    mc = propagate_monte_carlo(inp, 2000, seed=0)
    assert mc.radius.uncertainty == pytest.approx(0.0, abs=1e-12)
    assert mc.radius.value == pytest.approx(extract_zemach_radius(inp).value, rel=1e-12)


def test_mc_doubling_pol_doubles_sigma(constants, hydrogen):
    base = ExtractionInput.with_defaults(hydrogen, EXP_H, constants)
    wide = ExtractionInput.with_defaults(hydrogen, EXP_H, constants, [CorrectionTerm.user("pol", 1.6e-6, 1.2e-6)])
    a = propagate_monte_carlo(base, 50_000, seed=5)
    b = propagate_monte_carlo(wide, 50_000, seed=5)
    assert b.radius.uncertainty / a.radius.uncertainty == pytest.approx(2.0, abs=6 * b.sigma_standard_error / a.radius.uncertainty)


def test_mc_keeps_samples(constants, hydrogen):
    mc = propagate_monte_carlo(_mc_input(hydrogen, constants), 3000, keep_samples=True)
    assert mc.samples.shape == (3000,)
    assert mc.negative_draws == int(np.sum(mc.samples < 0))


def test_mc_needs_samples(constants, hydrogen):
    with pytest.raises(ValueError):
        propagate_monte_carlo(_mc_input(hydrogen, constants), 999)


# --- planner -----------------------------------------------------------------------

def test_planner_anchor(constants, muonic):
    plan = plan_precision(muonic, 0.005, 3e-5, constants)
    assert plan.feasible
    assert plan.required_exp_error_ppm <= 30.0
    assert 30.0 / plan.required_exp_error_ppm <= 1.5
    assert plan.required_exp_error_ppm == pytest.approx(20.77, abs=0.01)


def test_planner_infeasible(constants, muonic):
    plan = plan_precision(muonic, 0.01, 0.8e-4, constants)
    assert not plan.feasible
    assert plan.required_exp_error_ppm == 0.0
    assert plan.theory_sigma_rp_fm == pytest.approx(0.0114, abs=1e-4)
    assert plan.theory_sigma_rp_fm > plan.target_sigma_rp_fm


def test_planner_unconstrained(constants, muonic):
    plan = plan_precision(muonic, math.inf, 0.8e-4, constants)
    assert plan.feasible and math.isinf(plan.required_exp_error_ppm)


def test_planner_pol_ceiling(constants, muonic):
    plan = plan_precision(muonic, 0.005, 3e-5, constants)
    edge = plan_precision(muonic, 0.005, plan.required_pol_uncertainty * (1 - 1e-9), constants)
    assert edge.feasible and edge.required_exp_error_ppm < 0.1
    assert not plan_precision(muonic, 0.005, plan.required_pol_uncertainty * 1.001, constants).feasible


@pytest.mark.parametrize("target", [0.02, 0.03, 0.05])
def test_planner_inverts_linear_propagation(constants, atom, target):
    radius = 1.04
    pol_unc = standard_corrections(atom, constants)[2].value.uncertainty
    probe = _synthetic(atom, constants, radius)
    factor = zemach_factor(atom, constants)
    others = {k: v * factor for k, v in linear_breakdown(probe).items() if k not in ("exp_hfs", "pol")}
    plan = plan_precision(atom, target, pol_unc, constants, Measurement(radius, 0.0, "fm"), others)
    assert plan.feasible
    inp = _synthetic(atom, constants, radius, plan.required_exp_error_ppm * 1e-6)
    sigma = extract_zemach_radius(inp).uncertainty
    assert sigma == pytest.approx(target * radius, rel=1e-10)


def test_planner_rejects_bad_target(constants, muonic):
    with pytest.raises(ValueError):
        plan_precision(muonic, 0.0, 3e-5, constants)
