import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hfszemach import Dipole, MultipoleSum, RatioHybrid, Side, density, g_e, g_m, load_model, ratio
from hfszemach.formfactors import (FormFactorError, bundled_models, model_from_dict,
                                   model_to_dict, zemach_bracket)
from hfszemach.quadrature import integrate_semi_infinite

MODELS = bundled_models()
SIMON = MODELS["simon"]
k2s = st.floats(min_value=0.0, max_value=50.0)


def test_dipole_values(constants):
    d = Dipole(0.71)
    assert g_e(d, 0.0, constants) == 1.0
    assert g_e(d, 0.71, constants) == pytest.approx(0.25, rel=1e-15)
    assert g_m(d, 0.0, constants) == constants.value("mu_p")


def test_simon_normalization(constants):
    assert g_e(SIMON, 0.0, constants) == pytest.approx(1.0, abs=1e-6)
    assert g_m(SIMON, 0.0, constants) / constants.value("mu_p") == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("name", list(MODELS))
def test_magnetic_normalization(constants, name):
    assert g_m(MODELS[name], 0.0, constants) / constants.value("mu_p") == pytest.approx(1.0, abs=1e-6)


def test_simon_electric_radius(constants):
    # r_E^2 = -6 dG_E/dq^2 = 6 sum a_i/m2_i
    expected = math.sqrt(6.0 * sum(a / m2 for a, m2 in SIMON.electric))
    k2 = 1e-8
    hc = constants.value("hbar_c") * 1e-3
    slope = (g_e(SIMON, k2, constants) - 1.0) / (k2 / hc**2)
    assert math.sqrt(-6.0 * slope) == pytest.approx(expected, rel=1e-6)
    assert expected == pytest.approx(0.862, abs=0.005)


def test_unliteral_hybrid_ratio_is_one_at_intercept(constants):
    base = RatioHybrid(SIMON, Side.ELECTRIC, normalize=False, k2_max=None)
    assert ratio(base, 0.04, constants) == pytest.approx(1.0, rel=1e-14)
    assert g_m(base, 0.04, constants) == pytest.approx(
        constants.value("mu_p") * g_e(SIMON, 0.04, constants), rel=1e-14)
    assert ratio(base, 1.0, constants) == pytest.approx(1.0 - 0.13 * 0.96, rel=1e-14)


@pytest.mark.parametrize("name", ["simon-hybrid-electric", "simon-hybrid-magnetic"])
@settings(max_examples=30, deadline=None)
@given(k2=st.floats(min_value=0.0, max_value=5.0))
def test_hybrid_ratio_closure(constants, name, k2):
    model = MODELS[name]
    expected = (1.0 - 0.13 * (k2 - 0.04)) / (1.0 + 0.13 * 0.04)
    assert ratio(model, k2, constants) == pytest.approx(expected, rel=1e-13)


def test_hybrid_ratio_frozen_beyond_k2_max(constants):
    model = MODELS["simon-hybrid-electric"]
    assert ratio(model, 20.0, constants) == pytest.approx(ratio(model, 5.0, constants), rel=1e-14)


def test_hybrid_fixed_side_is_base(constants):
    k2 = np.linspace(0.0, 8.0, 9)
    e = MODELS["simon-hybrid-electric"]
    m = MODELS["simon-hybrid-magnetic"]
    assert np.allclose(g_e(e, k2, constants), g_e(SIMON, k2, constants), rtol=1e-15)
    assert np.allclose(g_m(m, k2, constants), g_m(SIMON, k2, constants), rtol=1e-15)


def test_literal_ratio_fails_past_zero(constants):
    literal = RatioHybrid(SIMON, normalize=False, k2_max=None)
    with pytest.raises(FormFactorError, match="ratio"):
        g_m(literal, 10.0, constants)


def test_negative_k2_rejected(constants):
    for fn in (g_e, g_m, ratio):
        with pytest.raises(FormFactorError):
            fn(Dipole(), -0.1, constants)


@pytest.mark.parametrize("bad", [
    lambda: Dipole(0.0),
    lambda: MultipoleSum(((0.5, 1.0), (0.4, 2.0))),
    lambda: MultipoleSum(((1.0, -1.0),)),
    lambda: RatioHybrid(RatioHybrid(Dipole())),
])
def test_invalid_models(bad):
    with pytest.raises(FormFactorError):
        bad()


@pytest.mark.parametrize("name", list(MODELS))
@settings(max_examples=20, deadline=None)
@given(k2=k2s)
def test_array_matches_scalar(constants, name, k2):
    model = MODELS[name]
    arr = np.array([k2, k2])
    assert np.all(g_e(model, arr, constants) == g_e(model, k2, constants))
    assert np.all(g_m(model, arr, constants) == g_m(model, k2, constants))


@pytest.mark.parametrize("name", list(MODELS))
def test_bracket_small_k2_limit(constants, name):
    # bracket/k2 has a finite limit; the stable form must not lose digits
    model = MODELS[name]
    ref = zemach_bracket(model, 1e-9, constants) / 1e-9
    for k2 in (1e-10, 1e-12, 1e-14, 1e-16):
        assert zemach_bracket(model, k2, constants) / k2 == pytest.approx(ref, rel=1e-6)
    assert zemach_bracket(model, 0.0, constants) == 0.0


def test_dipole_bracket_slope(constants):
    assert zemach_bracket(Dipole(0.71), 1e-12, constants) / 1e-12 == pytest.approx(-4.0 / 0.71, rel=1e-9)


def _fourier(rho, q):
    # 4π ∫ r² ρ(r) sin(qr)/(qr) dr
    f = lambda r: 4.0 * math.pi * r * r * rho(r) * np.sinc(q * r / math.pi)  # noqa: E731
    return integrate_semi_infinite(f, 1e-12).value


@pytest.mark.parametrize("model,side", [(Dipole(0.71), Side.ELECTRIC), (SIMON, Side.ELECTRIC),
                                        (SIMON, Side.MAGNETIC)])
def test_density_normalized(constants, model, side):
    assert _fourier(density(model, side, constants), 0.0) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("model,side", [(Dipole(0.71), Side.ELECTRIC), (SIMON, Side.ELECTRIC),
                                        (SIMON, Side.MAGNETIC)])
@pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 4.0])
def test_density_fourier_consistency(constants, model, side, q):
    hc = constants.value("hbar_c") * 1e-3
    k2 = (q * hc) ** 2
    expected = g_e(model, k2, constants) if side is Side.ELECTRIC else \
        g_m(model, k2, constants) / constants.value("mu_p")
    assert _fourier(density(model, side, constants), q) == pytest.approx(expected, abs=1e-8)


def test_hybrid_has_no_density(constants):
    with pytest.raises(FormFactorError):
        density(MODELS["simon-hybrid-electric"], Side.ELECTRIC, constants)


@pytest.mark.parametrize("name", list(MODELS))
def test_model_dict_round_trip(name):
    model = MODELS[name]
    assert model_from_dict(json.loads(json.dumps(model_to_dict(model)))) == model


def test_bundled_models_cite_sources():
    assert all(m.source for m in MODELS.values())


def test_load_model_from_path(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"kind": "dipole", "name": "soft", "lambda2_gev2": 0.5}))
    assert load_model(str(path)) == Dipole(0.5, "soft")


def test_unknown_model_lists_known():
    with pytest.raises(FormFactorError, match="dipole, simon"):
        load_model("no-such-model")
