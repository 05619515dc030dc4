"""Ground-state hyperfine splitting budget of hydrogen and muonic hydrogen.

The splitting is written as the Fermi energy times ``1 + Σ δ`` over five
relative corrections: ``qed``, ``zemach``, ``recoil``, ``pol`` and ``hvp``.
``qed`` and ``zemach`` are computed here; the others are published values
or estimates and can be overridden.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .constants import AtomSpec, ConstantSet, Lepton, convert, default_constants
from .units import Measurement, Unit
from .zemach import delta_zemach


class TermName(str, Enum):
    QED = "qed"
    ZEMACH = "zemach"
    RECOIL = "recoil"
    POL = "pol"
    HVP = "hvp"


class Provenance(str, Enum):
    COMPUTED = "computed"
    PAPER_DATUM = "paper_datum"
    ESTIMATE = "estimate"
    USER_INPUT = "user_input"


TERM_ORDER = (TermName.QED, TermName.ZEMACH, TermName.RECOIL, TermName.POL, TermName.HVP)

# Published magnitude and uncertainty of each contribution, used for
# consistency sweeps and as the planner's default theory uncertainties.
# "rigid" is zemach + recoil; "fermi" is given as a relative uncertainty.
REFERENCE_MAGNITUDES = {
    Lepton.ELECTRON: {
        "fermi": (Measurement(1420.0, 0.0, Unit.MHZ), 1e-8),
        "qed": (1.16e-3, 1e-9),
        "rigid": (39e-6, 2e-6),
        "recoil": (6e-6, 1e-8),
        "pol": (1.4e-6, 0.6e-6),
        "hvp": (1e-8, 1e-9),
    },
    Lepton.MUON: {
        "fermi": (Measurement(182.443, 0.0, Unit.MILLI_EV), 1e-7),
        "qed": (1.16e-3, 1e-6),
        "rigid": (7.5e-3, 0.1e-3),
        "recoil": (1.7e-3, 1e-6),
        "pol": (0.46e-3, 0.08e-3),
        "hvp": (0.02e-3, 0.002e-3),
    },
}

_CITE_QED = "bound-state QED series through O(alpha^3) (Sapirstein & Yennie; Eides et al.)"
_CITE_ZEMACH = "Zemach term -2 alpha m_r R_p"


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class CorrectionTerm:
    name: TermName
    value: Measurement
    provenance: Provenance
    citation: str = ""

    def __post_init__(self):
        object.__setattr__(self, "name", TermName(self.name))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if self.value.unit is not Unit.DIMENSIONLESS:
            raise BudgetError(f"correction {self.name.value} must be dimensionless")
        if (self.provenance is Provenance.COMPUTED
                and self.name not in (TermName.QED, TermName.ZEMACH)):
            raise BudgetError(f"correction {self.name.value} cannot have provenance 'computed'")

    @classmethod
    def user(cls, name, value: float, uncertainty: float = 0.0, citation: str = "user input"):
        if uncertainty < 0:
            raise BudgetError(f"override {name}: uncertainty must be >= 0")
        return cls(TermName(name), Measurement(value, uncertainty), Provenance.USER_INPUT, citation)

    def to_dict(self) -> dict:
        return {"name": self.name.value, "value": self.value.value,
                "uncertainty": self.value.uncertainty, "provenance": self.provenance.value,
                "citation": self.citation}


# --- Fermi energy ------------------------------------------------------------

def fermi_log_sensitivities(atom: AtomSpec, constants: ConstantSet | None = None) -> dict:
    """d ln(E_F)/dx and sigma_x for every uncertain input x of the Fermi energy."""
    constants = constants or default_constants()
    alpha = constants.lookup("alpha")
    mu_p = constants.lookup("mu_p")
    ml, mp = atom.lepton_mass, atom.proton_mass
    total = ml.value + mp.value
    return {
        "alpha": (4.0 / alpha.value, alpha.uncertainty),
        "mu_p": (1.0 / mu_p.value, mu_p.uncertainty),
        "lepton_mass": (2.0 / ml.value - 3.0 / total, ml.uncertainty),
        "proton_mass": (2.0 / mp.value - 3.0 / total, mp.uncertainty),
    }


def fermi_energy(atom: AtomSpec, constants: ConstantSet | None = None,
                 unit: "Unit | str | None" = None) -> Measurement:
    """Point-proton splitting E_F = (8/3) α⁴ mu_p m_l² m_p² / (m_l + m_p)³.

    Masses are rest energies, mu_p is in nuclear magnetons. Returned in Hz
    for hydrogen and meV for muonic hydrogen unless ``unit`` is given.
    """
    constants = constants or default_constants()
    alpha = constants.value("alpha")
    mu_p = constants.value("mu_p")
    ml, mp = atom.lepton_mass.value, atom.proton_mass.value
    e_mev = 8.0 / 3.0 * alpha**4 * mu_p * ml**2 * mp**2 / (ml + mp) ** 3
    rel = math.sqrt(math.fsum((d * s) ** 2 for d, s in fermi_log_sensitivities(atom, constants).values()))
    ev = Measurement(e_mev * 1e6, e_mev * 1e6 * rel, Unit.EV)
    return convert(ev, unit or atom.energy_unit, constants)


# --- individual corrections ----------------------------------------------------

def qed_series_terms(alpha: float, anomaly: float) -> dict:
    """The five terms of the point-proton QED series, keyed by a short label."""
    log_a = math.log(alpha)
    return {
        "anomaly": anomaly,
        "breit": 1.5 * alpha**2,
        "alpha2_log2": alpha**2 * (math.log(2.0) - 2.5),
        "alpha3_log2": -8.0 * alpha**3 / (3.0 * math.pi) * log_a * (log_a - math.log(4.0) + 281.0 / 480.0),
        "alpha3": 18.984 * alpha**3 / math.pi,
    }


def delta_qed(atom: AtomSpec, constants: ConstantSet | None = None, *,
              anomaly_only: bool = False) -> CorrectionTerm:
    """QED correction for a point proton.

    The electronic series is reused for the muon with a_mu in place of a_e;
    no dedicated muonic expression is available, so that value is marked as
    an estimate with a 1e-6 uncertainty. ``anomaly_only`` returns just the
    lepton anomaly, which is what the rounded published magnitude reflects.
    """
    constants = constants or default_constants()
    terms = qed_series_terms(constants.value("alpha"), atom.lepton_anomaly.value)
    value = terms["anomaly"] if anomaly_only else math.fsum(terms.values())
    if atom.lepton is Lepton.ELECTRON:
        return CorrectionTerm(TermName.QED, Measurement(value, 1e-9), Provenance.COMPUTED, _CITE_QED)
    return CorrectionTerm(TermName.QED, Measurement(value, 1e-6), Provenance.ESTIMATE,
                          _CITE_QED + " with a_mu; muonic higher orders unknown")


def recoil_correction(atom: AtomSpec, constants: ConstantSet | None = None) -> CorrectionTerm:
    constants = constants or default_constants()
    if atom.lepton is Lepton.ELECTRON:
        return CorrectionTerm(TermName.RECOIL, Measurement(5.68e-6, 1e-8), Provenance.PAPER_DATUM,
                              "hydrogen recoil 5.68 ppm (Sapirstein & Yennie; Bodwin et al.)")
    ratio = atom.lepton_mass.value / atom.proton_mass.value
    value = -(3.0 * constants.value("alpha") / math.pi) * ratio * math.log(ratio)
    return CorrectionTerm(TermName.RECOIL, Measurement(value, 1e-6), Provenance.ESTIMATE,
                          "leading muonium recoil term -(3 alpha/pi)(m_mu/m_p) ln(m_mu/m_p)")


POL_PRESETS = {"standard": 1.6e-6, "low": 1.4e-6}


def default_corrections(atom: AtomSpec, pol_preset: str = "standard") -> list[CorrectionTerm]:
    """Published polarizability and hadronic vacuum polarization terms.

    For hydrogen ``pol_preset="low"`` selects the 1.4(6) ppm polarizability
    magnitude instead of the default 1.6(6) ppm.
    """
    if atom.lepton is Lepton.ELECTRON:
        if pol_preset not in POL_PRESETS:
            raise ValueError(f"unknown pol preset {pol_preset!r}; choose from {sorted(POL_PRESETS)}")
        pol = POL_PRESETS[pol_preset]
        return [
            CorrectionTerm(TermName.POL, Measurement(pol, 0.6e-6), Provenance.PAPER_DATUM,
                           "proton polarizability from polarized structure functions (Faustov & Martynenko)"),
            CorrectionTerm(TermName.HVP, Measurement(1e-8, 1e-9), Provenance.PAPER_DATUM,
                           "hadronic vacuum polarization (Faustov & Martynenko)"),
        ]
    return [
        CorrectionTerm(TermName.POL, Measurement(4.6e-4, 0.8e-4), Provenance.PAPER_DATUM,
                       "muonic hydrogen polarizability (Faustov, Cherednikova & Martynenko)"),
        CorrectionTerm(TermName.HVP, Measurement(2.0e-5, 2.0e-6), Provenance.PAPER_DATUM,
                       "muonic hydrogen hadronic vacuum polarization, ~20 ppm (Faustov et al.)"),
    ]


def standard_corrections(atom: AtomSpec, constants: ConstantSet | None = None) -> list[CorrectionTerm]:
    """The four non-Zemach corrections: qed, recoil, pol, hvp."""
    return [delta_qed(atom, constants), recoil_correction(atom, constants), *default_corrections(atom)]


# --- budget --------------------------------------------------------------------

@dataclass(frozen=True)
class HfsBudget:
    atom: AtomSpec
    fermi: Measurement
    terms: tuple
    combination: str = "quadrature"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        names = [t.name for t in self.terms]
        if sorted(names) != sorted(TERM_ORDER) or len(set(names)) != len(names):
            raise BudgetError(f"budget needs each of {[n.value for n in TERM_ORDER]} exactly once, "
                              f"got {[n.value for n in names]}")
        if self.combination not in ("quadrature", "linear"):
            raise BudgetError(f"unknown combination mode {self.combination!r}")

    def term(self, name) -> CorrectionTerm:
        name = TermName(name)
        return next(t for t in self.terms if t.name is name)

    @property
    def correction_sum(self) -> float:
        return math.fsum(t.value.value for t in self.terms)

    @property
    def total(self) -> Measurement:
        factor = 1.0 + self.correction_sum
        f = self.fermi
        parts = [f.uncertainty * factor] + [f.value * t.value.uncertainty for t in self.terms]
        if self.combination == "linear":
            sigma = math.fsum(abs(p) for p in parts)
        else:
            sigma = math.sqrt(math.fsum(p * p for p in parts))
        return Measurement(f.value * factor, sigma, f.unit)


def assemble_budget(atom: AtomSpec, radius: Measurement,
                    overrides: Iterable[CorrectionTerm] | None = None,
                    constants: ConstantSet | None = None, *,
                    combination: str = "quadrature") -> HfsBudget:
    """Full HFS budget for ``atom`` at Zemach radius ``radius`` (fm).

    ``overrides`` replace the computed or default term of the same name.
    """
    constants = constants or default_constants()
    if radius.value < 0:
        raise BudgetError(f"Zemach radius must be >= 0, got {radius.value!r}")
    overrides = list(overrides or ())
    seen = set()
    for t in overrides:
        if not isinstance(t, CorrectionTerm):
            raise TypeError(f"overrides must be CorrectionTerm, got {type(t).__name__}")
        if t.name in seen:
            raise BudgetError(f"duplicate override for {t.name.value}")
        if t.value.uncertainty < 0:
            raise BudgetError(f"override {t.name.value}: negative uncertainty")
        seen.add(t.name)

    zemach = CorrectionTerm(TermName.ZEMACH, delta_zemach(radius, atom, constants),
                            Provenance.COMPUTED, _CITE_ZEMACH)
    computed = {t.name: t for t in [zemach, *standard_corrections(atom, constants)]}
    computed.update({t.name: t for t in overrides})
    terms = tuple(computed[n] for n in TERM_ORDER)
    return HfsBudget(atom, fermi_energy(atom, constants), terms, combination)
