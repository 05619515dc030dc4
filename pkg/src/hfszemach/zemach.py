"""Zemach radius of the proton and the corresponding HFS correction.

Three independent routes to the radius:

* momentum space: ``R = -(4/π) ∫_0^∞ dk/k² [G_E G_M/mu_p - 1]``, the
  point-lepton (α → 0) reduction of the finite-size HFS integral;
* coordinate space: the first moment of the convolution of the charge and
  magnetization densities, ``∫d³r ∫d³r' |r + r'| ρ_E(r) ρ_M(r')``, as two
  nested radial quadratures with the angular average of ``|r + r'|`` done in
  closed form;
* the dipole closed form ``R = 35 / (8 Λ)``.

The relative correction to the splitting is ``-2 α m_r R`` with ``m_r`` the
lepton-proton reduced mass (converted to fm^-1 through ħc).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import AtomSpec, ConstantSet, default_constants
from .formfactors import (Dipole, FormFactorModel, RatioHybrid, Side, density,
                          zemach_bracket)
from .quadrature import integrate_finite, integrate_semi_infinite
from .units import Measurement, Unit, UnitError

DEFAULT_TOL = 1e-10


class Method(str, Enum):
    MOMENTUM = "momentum"
    COORDINATE = "coordinate"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class ZemachResult:
    radius: Measurement
    method: Method
    quadrature_error: float
    model_id: str

    def to_dict(self) -> dict:
        return {"model": self.model_id, "method": self.method.value,
                "radius_fm": self.radius.value, "quadrature_error_fm": self.quadrature_error}


def _hc_gev_fm(constants: ConstantSet) -> float:
    return constants.value("hbar_c") * 1e-3


def zemach_radius_momentum(model: FormFactorModel, constants: ConstantSet | None = None,
                           tol: float = DEFAULT_TOL, k_max: float | None = None) -> ZemachResult:
    """Zemach radius from the momentum-space integral.

    ``k_max`` (GeV) drops the form-factor product above that momentum while
    keeping the ``-1/k²`` piece exactly; it exists to measure how much the
    high-momentum tail matters.
    """
    constants = constants or default_constants()
    hc = _hc_gev_fm(constants)

    def integrand(k):
        k2 = k * k
        return zemach_bracket(model, k2, constants) / k2

    points = []
    if isinstance(model, RatioHybrid) and model.k2_max is not None:
        points.append(math.sqrt(model.k2_max))
    if k_max is None:
        res = integrate_semi_infinite(integrand, tol, breakpoints=points)
        integral = res.value
    else:
        res = integrate_finite(integrand, 0.0, k_max, tol, breakpoints=points)
        integral = res.value - 1.0 / k_max
    scale = 4.0 / math.pi * hc
    radius = -scale * integral
    err = scale * res.error_estimate
    return ZemachResult(Measurement(radius, err, Unit.FM), Method.MOMENTUM, err, model.name)


def _shell_average_distance(s, r: float):
    """Mean of |s + r| over directions of s, for |s| = s and |r| = r."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(s < r, r + s * s / (3.0 * r), s + r * r / (3.0 * s))


def first_moment_of_convolution(rho_e, rho_m, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``∫d³r r (ρ_E * ρ_M)(r)`` for radial densities in fm^-3; returns (value, error) in fm."""
    four_pi = 4.0 * math.pi
    worst_inner = [0.0]

    def inner(rp: float) -> float:
        res = integrate_semi_infinite(
            lambda s: four_pi * s * s * rho_e(s) * _shell_average_distance(s, rp),
            tol, breakpoints=[rp])
        if res.value:
            worst_inner[0] = max(worst_inner[0], res.error_estimate / abs(res.value))
        return res.value

    def outer(rp):
        rp = np.asarray(rp, dtype=float)
        weights = four_pi * rp * rp * rho_m(rp)
        return weights * np.array([inner(float(x)) for x in rp])

    res = integrate_semi_infinite(outer, tol)
    err = res.error_estimate + worst_inner[0] * abs(res.value)
    return res.value, err


def zemach_radius_coordinate(model: FormFactorModel, constants: ConstantSet | None = None,
                             tol: float = 1e-9) -> ZemachResult:
    """Zemach radius from the coordinate-space densities (Dipole and MultipoleSum only)."""
    constants = constants or default_constants()
    rho_e = density(model, Side.ELECTRIC, constants)
    rho_m = density(model, Side.MAGNETIC, constants)
    value, err = first_moment_of_convolution(rho_e, rho_m, tol)
    return ZemachResult(Measurement(value, err, Unit.FM), Method.COORDINATE, err, model.name)


def zemach_radius_dipole_analytic(lambda2: float, constants: ConstantSet | None = None) -> ZemachResult:
    """Closed form for the dipole: R = 35/(8Λ) with Λ = sqrt(lambda2) in fm^-1."""
    if not lambda2 > 0:
        raise ValueError(f"lambda2 must be > 0, got {lambda2!r}")
    constants = constants or default_constants()
    radius = 35.0 / 8.0 * _hc_gev_fm(constants) / math.sqrt(lambda2)
    return ZemachResult(Measurement(radius, 0.0, Unit.FM), Method.ANALYTIC, 0.0,
                        Dipole(lambda2).name)


def zemach_factor(atom: AtomSpec, constants: ConstantSet | None = None) -> float:
    """2 α m_r in fm^-1: minus the relative HFS shift per fm of Zemach radius."""
    constants = constants or default_constants()
    return 2.0 * constants.value("alpha") * atom.reduced_mass.value / constants.value("hbar_c")


def delta_zemach(radius: Measurement, atom: AtomSpec, constants: ConstantSet | None = None) -> Measurement:
    if radius.unit is not Unit.FM:
        raise UnitError(f"Zemach radius must be given in fm, got {radius.unit}")
    if radius.value < 0:
        raise ValueError(f"Zemach radius must be >= 0, got {radius.value!r}")
    factor = zemach_factor(atom, constants)
    return Measurement(-factor * radius.value, factor * radius.uncertainty, Unit.DIMENSIONLESS)
