"""Unit tags and the ``Measurement`` value carrier.

Every physical number that crosses a module boundary is a ``Measurement``:
a central value, a one-sigma uncertainty and a unit tag from the closed
``Unit`` enumeration. Arithmetic between measurements with different units
is refused rather than coerced.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class UnitError(ValueError):
    """Raised for unknown unit tags or incompatible unit combinations."""


class Unit(str, Enum):
    DIMENSIONLESS = "1"
    GEV = "GeV"
    MEV = "MeV"
    EV = "eV"
    MILLI_EV = "meV"
    HZ = "Hz"
    MHZ = "MHz"
    FM = "fm"
    UM = "um"
    NM = "nm"
    MEV_FM = "MeV*fm"
    GEV2 = "GeV^2"
    INV_FM2 = "fm^-2"
    EV_PER_HZ = "eV/Hz"

    @classmethod
    def parse(cls, tag: "str | Unit") -> "Unit":
        if isinstance(tag, Unit):
            return tag
        try:
            return cls(tag)
        except ValueError:
            known = ", ".join(u.value for u in cls)
            raise UnitError(f"unknown unit tag {tag!r}; known tags: {known}") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Measurement:
    """A value with a one-sigma uncertainty and a unit tag."""

    value: float
    uncertainty: float = 0.0
    unit: Unit = Unit.DIMENSIONLESS

    def __post_init__(self):
        object.__setattr__(self, "unit", Unit.parse(self.unit))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "uncertainty", float(self.uncertainty))
        if not self.uncertainty >= 0.0:
            raise ValueError(f"uncertainty must be >= 0, got {self.uncertainty}")

    @property
    def relative_uncertainty(self) -> float:
        if self.value == 0.0:
            return math.inf if self.uncertainty else 0.0
        return self.uncertainty / abs(self.value)

    def _check_same_unit(self, other: "Measurement"):
        if not isinstance(other, Measurement):
            raise TypeError(f"expected Measurement, got {type(other).__name__}")
        if other.unit != self.unit:
            raise UnitError(f"cannot combine {self.unit} with {other.unit}")

    def __add__(self, other: "Measurement") -> "Measurement":
        self._check_same_unit(other)
        return Measurement(self.value + other.value,
                           math.hypot(self.uncertainty, other.uncertainty), self.unit)

    def __sub__(self, other: "Measurement") -> "Measurement":
        self._check_same_unit(other)
        return Measurement(self.value - other.value,
                           math.hypot(self.uncertainty, other.uncertainty), self.unit)

    def __neg__(self) -> "Measurement":
        return Measurement(-self.value, self.uncertainty, self.unit)

    def scale(self, factor: float, unit: "Unit | str | None" = None) -> "Measurement":
        """Multiply by an exact factor, optionally relabelling the unit."""
        return Measurement(self.value * factor, self.uncertainty * abs(factor),
                           self.unit if unit is None else unit)

    def __mul__(self, factor):
        if isinstance(factor, Measurement):
            raise UnitError("Measurement * Measurement is not supported; use scale()")
        return self.scale(float(factor))

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {"value": self.value, "uncertainty": self.uncertainty, "unit": self.unit.value}

    @classmethod
    def from_dict(cls, d: dict) -> "Measurement":
        return cls(d["value"], d.get("uncertainty", 0.0), d.get("unit", "1"))

    def __format__(self, spec: str) -> str:
        spec = spec or ".6g"
        return f"{self.value:{spec}} ± {self.uncertainty:.2g} {self.unit.value}"
