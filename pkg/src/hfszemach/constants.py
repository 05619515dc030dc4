"""Physical constants, atom descriptions and unit conversion.

The bundled constant set lives in ``data/codata-2018.json``; any other JSON
file with the same layout can be loaded instead::

    {"version": "...",
     "constants": [{"name": "alpha", "value": 7.297e-3, "uncertainty": 1e-12,
                    "unit": "1", "source": "..."}, ...]}

Every entry is validated on load: unknown unit tags, negative uncertainties,
missing keys and missing required constants all raise ``ConstantsError``
naming the offending constant.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .units import Measurement, Unit, UnitError

ENV_CONSTANTS = "HFSZEMACH_CONSTANTS"

REQUIRED = ("alpha", "m_e", "m_mu", "m_p", "mu_p", "hbar_c", "planck_eV_Hz", "a_e", "a_mu")

_BUNDLED = {
    "codata-pinned": "codata-2018.json",
    "codata-2018": "codata-2018.json",
}


class ConstantsError(ValueError):
    """Invalid, incomplete or unreadable constant data."""


@dataclass(frozen=True)
class PhysicalConstant:
    name: str
    value: float
    uncertainty: float
    unit: Unit
    source: str = ""

    def __post_init__(self):
        try:
            object.__setattr__(self, "unit", Unit.parse(self.unit))
        except UnitError as exc:
            raise ConstantsError(f"constant {self.name!r}: {exc}") from None
        if not (isinstance(self.value, (int, float)) and math.isfinite(self.value)):
            raise ConstantsError(f"constant {self.name!r}: value must be a finite number")
        if not (isinstance(self.uncertainty, (int, float)) and self.uncertainty >= 0):
            raise ConstantsError(
                f"constant {self.name!r}: uncertainty must be >= 0, got {self.uncertainty!r}")

    def measurement(self) -> Measurement:
        return Measurement(self.value, self.uncertainty, self.unit)


@dataclass(frozen=True)
class ConstantSet:
    version: str
    constants: Mapping[str, PhysicalConstant] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "constants", MappingProxyType(dict(self.constants)))
        missing = [n for n in REQUIRED if n not in self.constants]
        if missing:
            raise ConstantsError(f"constant set {self.version!r} lacks required constant(s): "
                                 + ", ".join(missing))

    def __getitem__(self, name: str) -> PhysicalConstant:
        try:
            return self.constants[name]
        except KeyError:
            raise KeyError(f"no constant named {name!r} in set {self.version!r}") from None

    def lookup(self, name: str) -> Measurement:
        return self[name].measurement()

    def value(self, name: str) -> float:
        return self[name].value

    def with_values(self, version: str | None = None, **values: float) -> "ConstantSet":
        """Copy with some central values replaced (used for synthetic sets and sensitivity runs)."""
        new = dict(self.constants)
        for name, v in values.items():
            old = self[name]
            new[name] = PhysicalConstant(name, float(v), old.uncertainty, old.unit, old.source)
        return ConstantSet(version or f"{self.version}+modified", new)


def _parse(payload: dict, origin: str) -> ConstantSet:
    if not isinstance(payload, dict) or "constants" not in payload:
        raise ConstantsError(f"{origin}: expected an object with a 'constants' list")
    entries = payload["constants"]
    if isinstance(entries, dict):
        entries = [dict(v, name=k) for k, v in entries.items()]
    table = {}
    for i, entry in enumerate(entries):
        name = entry.get("name", f"<entry {i}>") if isinstance(entry, dict) else f"<entry {i}>"
        if not isinstance(entry, dict):
            raise ConstantsError(f"{origin}: constant {name!r} is not an object")
        for key in ("name", "value", "uncertainty", "unit"):
            if key not in entry:
                raise ConstantsError(f"{origin}: constant {name!r} is missing key {key!r}")
        if name in table:
            raise ConstantsError(f"{origin}: constant {name!r} defined twice")
        table[name] = PhysicalConstant(name, entry["value"], entry["uncertainty"],
                                       entry["unit"], entry.get("source", ""))
    return ConstantSet(str(payload.get("version", origin)), table)


@lru_cache(maxsize=None)
def _load_bundled(filename: str) -> ConstantSet:
    text = resources.files("hfszemach").joinpath("data").joinpath(filename).read_text(encoding="utf-8")
    return _parse(json.loads(text), filename)


def load_constants(source: str | os.PathLike | None = None) -> ConstantSet:
    """Load a named bundled set or a JSON constants file.

    ``None`` means the file named by ``$HFSZEMACH_CONSTANTS`` if set, else the
    pinned CODATA 2018 set.
    """
    if source is None:
        source = os.environ.get(ENV_CONSTANTS) or "codata-pinned"
    if isinstance(source, str) and source in _BUNDLED:
        return _load_bundled(_BUNDLED[source])
    path = Path(source)
    if not path.is_file():
        raise ConstantsError(f"constants source {str(source)!r} is neither a bundled set "
                             f"({', '.join(sorted(_BUNDLED))}) nor a readable file")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConstantsError(f"{path}: malformed JSON ({exc})") from None
    return _parse(payload, str(path))


def default_constants() -> ConstantSet:
    return load_constants("codata-pinned")


class Lepton(str, Enum):
    ELECTRON = "electron"
    MUON = "muon"

    @classmethod
    def parse(cls, x: "str | Lepton") -> "Lepton":
        if isinstance(x, Lepton):
            return x
        aliases = {"e": cls.ELECTRON, "electron": cls.ELECTRON, "hydrogen": cls.ELECTRON,
                   "h": cls.ELECTRON, "mu": cls.MUON, "muon": cls.MUON,
                   "muonic-hydrogen": cls.MUON, "muonic_hydrogen": cls.MUON, "muh": cls.MUON}
        try:
            return aliases[str(x).lower()]
        except KeyError:
            raise ValueError(f"unknown lepton/atom {x!r}; use 'hydrogen' or 'muonic-hydrogen'") from None


@dataclass(frozen=True)
class AtomSpec:
    """Hydrogen-like atom: a lepton bound to a proton.

    ``reduced_mass`` is checked against ``lepton_mass * m_p / (lepton_mass + m_p)``
    on construction.
    """

    lepton: Lepton
    lepton_mass: Measurement
    proton_mass: Measurement
    reduced_mass: Measurement
    lepton_anomaly: Measurement

    def __post_init__(self):
        ml, mp = self.lepton_mass.value, self.proton_mass.value
        expected = ml * mp / (ml + mp)
        if abs(self.reduced_mass.value - expected) > 1e-12 * expected:
            raise ValueError(f"reduced mass {self.reduced_mass.value!r} inconsistent with "
                             f"masses (expected {expected!r})")
        if not self.reduced_mass.value < ml:
            raise ValueError("reduced mass must be smaller than the lepton mass")

    @property
    def name(self) -> str:
        return "hydrogen" if self.lepton is Lepton.ELECTRON else "muonic-hydrogen"

    @property
    def energy_unit(self) -> Unit:
        """Natural reporting unit for the splitting of this atom."""
        return Unit.HZ if self.lepton is Lepton.ELECTRON else Unit.MILLI_EV


def make_atom(constants: ConstantSet | None = None, lepton: "Lepton | str" = Lepton.ELECTRON) -> AtomSpec:
    constants = constants or default_constants()
    lepton = Lepton.parse(lepton)
    ml = constants.lookup("m_e" if lepton is Lepton.ELECTRON else "m_mu")
    mp = constants.lookup("m_p")
    anomaly = constants.lookup("a_e" if lepton is Lepton.ELECTRON else "a_mu")
    s = ml.value + mp.value
    mr = ml.value * mp.value / s
    sigma = math.hypot((mp.value / s) ** 2 * ml.uncertainty, (ml.value / s) ** 2 * mp.uncertainty)
    return AtomSpec(lepton, ml, mp, Measurement(mr, sigma, Unit.MEV), anomaly)


# unit -> (dimension, factor to the canonical unit of that dimension)
_LINEAR = {
    Unit.GEV: ("energy", 1e9), Unit.MEV: ("energy", 1e6), Unit.EV: ("energy", 1.0),
    Unit.MILLI_EV: ("energy", 1e-3),
    Unit.HZ: ("frequency", 1.0), Unit.MHZ: ("frequency", 1e6),
    Unit.FM: ("length", 1.0), Unit.NM: ("length", 1e6), Unit.UM: ("length", 1e9),
    Unit.GEV2: ("momentum2", 1.0),
    Unit.INV_FM2: ("inverse_area", 1.0),
}


def _to_ev(value: float, dim: str, c: ConstantSet) -> float:
    if dim == "energy":
        return value
    if dim == "frequency":
        return value * c.value("planck_eV_Hz")
    if dim == "length":
        return 2.0 * math.pi * c.value("hbar_c") * 1e6 / value
    raise AssertionError(dim)


def _from_ev(ev: float, dim: str, c: ConstantSet) -> float:
    if dim == "energy":
        return ev
    if dim == "frequency":
        return ev / c.value("planck_eV_Hz")
    if dim == "length":
        return 2.0 * math.pi * c.value("hbar_c") * 1e6 / ev
    raise AssertionError(dim)


def convert(q: Measurement, to: "Unit | str", constants: ConstantSet | None = None) -> Measurement:
    """Convert between energy, frequency, wavelength (λ = hc/E) and k² units.

    All supported maps are powers ±1 of the input, so the relative
    uncertainty is carried over unchanged.
    """
    to = Unit.parse(to)
    if q.unit == to:
        return q
    if q.unit not in _LINEAR or to not in _LINEAR:
        raise UnitError(f"no conversion from {q.unit} to {to}")
    constants = constants or default_constants()
    (d_from, f_from), (d_to, f_to) = _LINEAR[q.unit], _LINEAR[to]
    if d_from == d_to:
        return Measurement(q.value * f_from / f_to, q.uncertainty * f_from / f_to, to)
    hc_gev_fm = constants.value("hbar_c") * 1e-3
    if {d_from, d_to} == {"momentum2", "inverse_area"}:
        factor = 1.0 / hc_gev_fm ** 2 if d_from == "momentum2" else hc_gev_fm ** 2
        return Measurement(q.value * factor, q.uncertainty * factor, to)
    spectral = {"energy", "frequency", "length"}
    if d_from not in spectral or d_to not in spectral:
        raise UnitError(f"no conversion from {q.unit} to {to}")
    if q.value == 0.0 and "length" in (d_from, d_to):
        raise UnitError("wavelength of zero energy is undefined")
    canonical = q.value * f_from
    new = _from_ev(_to_ev(canonical, d_from, constants), d_to, constants) / f_to
    return Measurement(new, q.relative_uncertainty * abs(new) if q.uncertainty else 0.0, to)
