"""Proton electric and magnetic form factors at space-like momentum transfer.

Three parametrizations are supported:

``Dipole``
    ``G_E = G_M / mu_p = (1 + k2 / lambda2)**-2``.
``MultipoleSum``
    ``G = sum_i a_i / (1 + k2 / m2_i)`` with ``m2_i`` in fm^-2, divided by
    ``sum_i a_i`` (which must be 1 within 1e-6) so that ``G(0) = 1``; separate term
    lists for ``G_E`` and ``G_M / mu_p`` (the magnetic list defaults to the
    electric one).
``RatioHybrid``
    One side taken from a base model, the other derived from a linear
    ratio ``mu_p G_E / G_M = 1 - slope * (k2 - intercept)``.

All momentum transfers ``k2`` are positive squared three-momenta in GeV^2.
Evaluators accept scalars or numpy arrays.

The hybrid ratio is by default divided by its ``k2 = 0`` value so that
``G_E(0) = 1`` and ``G_M(0) = mu_p`` survive; without that the Zemach
integrand is not integrable at the origin. Above ``k2_max`` the ratio is
held at its ``k2_max`` value: the linear form crosses zero near 7.7 GeV^2,
which would put a pole into the derived magnetic form factor.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .constants import ConstantSet, default_constants


class FormFactorError(ValueError):
    pass


class Side(str, Enum):
    ELECTRIC = "electric"
    MAGNETIC = "magnetic"


@dataclass(frozen=True)
class Dipole:
    lambda2: float = 0.71
    name: str = "dipole"
    source: str = ""

    def __post_init__(self):
        if not self.lambda2 > 0:
            raise FormFactorError(f"dipole lambda2 must be > 0, got {self.lambda2!r}")


def _check_terms(terms, label):
    terms = tuple((float(a), float(m2)) for a, m2 in terms)
    if not terms:
        raise FormFactorError(f"{label}: empty term list")
    if any(m2 <= 0 for _, m2 in terms):
        raise FormFactorError(f"{label}: all m2_i must be > 0")
    total = math.fsum(a for a, _ in terms)
    if abs(total - 1.0) > 1e-6:
        raise FormFactorError(f"{label}: coefficients sum to {total!r}, not 1")
    return terms


@dataclass(frozen=True)
class MultipoleSum:
    electric: tuple
    magnetic: tuple | None = None
    name: str = "multipole"
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "electric", _check_terms(self.electric, f"{self.name} electric"))
        if self.magnetic is not None:
            object.__setattr__(self, "magnetic", _check_terms(self.magnetic, f"{self.name} magnetic"))

    @property
    def magnetic_terms(self) -> tuple:
        return self.electric if self.magnetic is None else self.magnetic


@dataclass(frozen=True)
class RatioHybrid:
    base: Union[Dipole, MultipoleSum]
    fixed_side: Side = Side.ELECTRIC
    ratio_intercept_k2: float = 0.04
    ratio_slope: float = 0.13
    normalize: bool = True
    k2_max: float | None = 5.0
    name: str = "hybrid"
    source: str = ""

    def __post_init__(self):
        if isinstance(self.base, RatioHybrid):
            raise FormFactorError("a RatioHybrid cannot wrap another RatioHybrid")
        if not isinstance(self.base, (Dipole, MultipoleSum)):
            raise FormFactorError(f"unsupported base model {type(self.base).__name__}")
        object.__setattr__(self, "fixed_side", Side(self.fixed_side))
        if self.k2_max is not None and not self.k2_max > 0:
            raise FormFactorError("k2_max must be > 0")


FormFactorModel = Union[Dipole, MultipoleSum, RatioHybrid]


def _hc_gev_fm(constants: ConstantSet) -> float:
    return constants.value("hbar_c") * 1e-3


def _k2_array(k2):
    arr = np.asarray(k2, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise FormFactorError("k2 must be >= 0 (space-like momentum transfer)")
    return arr


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def _log_multipole(terms, k2, hc):
    # G = sum_i a_i / (1 + x_i) / sum_i a_i, so G(0) = 1 exactly; written as
    # log1p(-sum_i a_i x_i / (1 + x_i) / sum a) to keep full precision as k2 -> 0
    q2 = k2 / hc**2
    norm = math.fsum(a for a, _ in terms)
    s = np.zeros_like(q2)
    for a, m2 in terms:
        x = q2 / m2
        s = s + a * x / (1.0 + x)
    g_minus_one = -s / norm
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.log1p(g_minus_one), 1.0 + g_minus_one


def _log_ratio(model: RatioHybrid, k2):
    kk = k2 if model.k2_max is None else np.minimum(k2, model.k2_max)
    s, c = model.ratio_slope, model.ratio_intercept_k2
    arg = -s * kk / (1.0 + s * c) if model.normalize else -s * (kk - c)
    if np.any(arg <= -1.0):
        raise FormFactorError(
            f"{model.name}: form-factor ratio is <= 0 at k2 = "
            f"{float(np.max(kk)):g} GeV^2, beyond the validity of the linear ratio")
    return np.log1p(arg)


def _log_form_factors(model: FormFactorModel, k2, constants: ConstantSet):
    """Return (log G_E, log G_M/mu_p, G_E, G_M/mu_p) as arrays."""
    hc = _hc_gev_fm(constants)
    if isinstance(model, Dipole):
        lg = -2.0 * np.log1p(k2 / model.lambda2)
        g = np.exp(lg)
        return lg, lg, g, g
    if isinstance(model, MultipoleSum):
        le, ge = _log_multipole(model.electric, k2, hc)
        if model.magnetic is None:
            lm, gm = le, ge
        else:
            lm, gm = _log_multipole(model.magnetic, k2, hc)
        return le, lm, ge, gm
    if isinstance(model, RatioHybrid):
        le, lm, ge, gm = _log_form_factors(model.base, k2, constants)
        lr = _log_ratio(model, k2)
        r = np.exp(lr)
        if model.fixed_side is Side.ELECTRIC:
            return le, le - lr, ge, ge / r
        return lm + lr, lm, gm * r, gm
    raise FormFactorError(f"unsupported model type {type(model).__name__}")


def g_e(model: FormFactorModel, k2, constants: ConstantSet | None = None):
    """Electric form factor G_E(k2), normalized to G_E(0) = 1."""
    constants = constants or default_constants()
    arr = _k2_array(k2)
    return _out(_log_form_factors(model, arr, constants)[2], k2)


def g_m(model: FormFactorModel, k2, constants: ConstantSet | None = None):
    """Magnetic form factor G_M(k2) including the mu_p normalization."""
    constants = constants or default_constants()
    arr = _k2_array(k2)
    return _out(constants.value("mu_p") * _log_form_factors(model, arr, constants)[3], k2)


def ratio(model: FormFactorModel, k2, constants: ConstantSet | None = None):
    """mu_p G_E / G_M, computed from the two evaluators."""
    constants = constants or default_constants()
    arr = _k2_array(k2)
    _, _, ge, gm_reduced = _log_form_factors(model, arr, constants)
    if np.any(gm_reduced == 0):
        raise FormFactorError("G_M vanishes at the evaluation point")
    return _out(ge / gm_reduced, k2)


def zemach_bracket(model: FormFactorModel, k2, constants: ConstantSet | None = None):
    """G_E G_M / mu_p - 1, accurate to full relative precision as k2 -> 0."""
    constants = constants or default_constants()
    arr = _k2_array(k2)
    le, lm, ge, gm = _log_form_factors(model, arr, constants)
    with np.errstate(invalid="ignore"):
        stable = np.expm1(le + lm)
    direct = ge * gm - 1.0
    out = np.where(np.isfinite(stable), stable, direct)
    return _out(out, k2)


@dataclass(frozen=True)
class DensityProfile:
    """Normalized radial density rho(r) in fm^-3 (4π∫ρ r² dr = 1)."""

    kind: Side
    evaluate: Callable = field(repr=False)
    model_name: str = ""

    def __call__(self, r):
        return self.evaluate(r)


def _exponential_density(lam_fm: float):
    norm = lam_fm**3 / (8.0 * math.pi)
    return lambda r: norm * np.exp(-lam_fm * np.asarray(r, dtype=float))


def _yukawa_density(terms):
    norm = math.fsum(a for a, _ in terms)
    coeffs = [(a * m2 / (4.0 * math.pi * norm), math.sqrt(m2)) for a, m2 in terms]

    def rho(r):
        r = np.asarray(r, dtype=float)
        total = np.zeros_like(r)
        for c, m in coeffs:
            total = total + c * np.exp(-m * r)
        return total / r

    return rho


def density(model: FormFactorModel, kind: "Side | str" = Side.ELECTRIC,
            constants: ConstantSet | None = None) -> DensityProfile:
    """Coordinate-space density whose Fourier transform is G(k2)/G(0).

    Dipole gives the exponential (Λ³/8π) e^(-Λr); a multipole sum gives a sum
    of Yukawa terms a_i m_i² e^(-m_i r) / (4π r). Hybrids have no closed form
    and are rejected.
    """
    constants = constants or default_constants()
    kind = Side(kind)
    if isinstance(model, Dipole):
        lam = math.sqrt(model.lambda2) / _hc_gev_fm(constants)
        return DensityProfile(kind, _exponential_density(lam), model.name)
    if isinstance(model, MultipoleSum):
        terms = model.electric if kind is Side.ELECTRIC else model.magnetic_terms
        return DensityProfile(kind, _yukawa_density(terms), model.name)
    raise FormFactorError(f"no coordinate-space density for {type(model).__name__} models")


# --- model files -----------------------------------------------------------

def model_from_dict(d: dict, _registry: dict | None = None) -> FormFactorModel:
    kind = d.get("kind")
    name = d.get("name", kind or "model")
    source = d.get("source", "")
    if kind == "dipole":
        return Dipole(float(d["lambda2_gev2"]), name, source)
    if kind == "multipole_sum":
        if d.get("m2_unit", "fm^-2") != "fm^-2":
            raise FormFactorError(f"{name}: m2_unit must be 'fm^-2'")
        mag = d.get("magnetic")
        return MultipoleSum(tuple(map(tuple, d["electric"])),
                            None if mag is None else tuple(map(tuple, mag)), name, source)
    if kind == "ratio_hybrid":
        base = d["base"]
        if isinstance(base, str):
            registry = _registry if _registry is not None else bundled_models()
            if base not in registry:
                raise FormFactorError(f"{name}: unknown base model {base!r}")
            base = registry[base]
        else:
            base = model_from_dict(base, _registry)
        return RatioHybrid(base, Side(d.get("fixed_side", "electric")),
                           float(d.get("ratio_intercept_k2", 0.04)),
                           float(d.get("ratio_slope", 0.13)),
                           bool(d.get("normalize", True)),
                           d.get("k2_max", 5.0), name, source)
    raise FormFactorError(f"unknown model kind {kind!r}")


def model_to_dict(model: FormFactorModel) -> dict:
    if isinstance(model, Dipole):
        return {"kind": "dipole", "name": model.name, "lambda2_gev2": model.lambda2,
                "source": model.source}
    if isinstance(model, MultipoleSum):
        d = {"kind": "multipole_sum", "name": model.name, "m2_unit": "fm^-2",
             "electric": [list(t) for t in model.electric], "source": model.source}
        if model.magnetic is not None:
            d["magnetic"] = [list(t) for t in model.magnetic]
        return d
    return {"kind": "ratio_hybrid", "name": model.name, "base": model_to_dict(model.base),
            "fixed_side": model.fixed_side.value, "ratio_intercept_k2": model.ratio_intercept_k2,
            "ratio_slope": model.ratio_slope, "normalize": model.normalize,
            "k2_max": model.k2_max, "source": model.source}


_BUNDLED_ORDER = ("dipole", "simon", "simon-hybrid-electric", "simon-hybrid-magnetic")


def bundled_models() -> dict:
    """All bundled models keyed by name; hybrids may reference earlier entries."""
    registry: dict = {}
    folder = resources.files("hfszemach").joinpath("data").joinpath("models")
    for stem in _BUNDLED_ORDER:
        d = json.loads(folder.joinpath(f"{stem}.json").read_text(encoding="utf-8"))
        registry[stem] = model_from_dict(d, registry)
    return registry


def load_model(ref: str | Path) -> FormFactorModel:
    """Load a bundled model by name or a model JSON file by path."""
    registry = bundled_models()
    if isinstance(ref, str) and ref in registry:
        return registry[ref]
    path = Path(ref)
    if not path.is_file():
        raise FormFactorError(f"unknown model {str(ref)!r}; known models: {', '.join(registry)}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormFactorError(f"{path}: malformed JSON ({exc})") from None
    return model_from_dict(payload, registry)
