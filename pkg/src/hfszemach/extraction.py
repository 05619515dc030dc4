"""Zemach radius from a measured splitting, with uncertainty propagation.

Given the measured splitting ``E`` and the Fermi energy ``F``, the radius is
what is left after subtracting all other corrections::

    R = -(E/F - 1 - δ_qed - δ_recoil - δ_pol - δ_hvp) / (2 α m_r)

Linear propagation uses analytic derivatives with respect to the measured
splitting, the four corrections and the constants entering ``F`` and
``2 α m_r``; all inputs are treated as independent.

Monte Carlo draws are organised in fixed blocks of ``MC_BLOCK`` samples, each
with its own child of ``numpy.random.SeedSequence(seed)`` feeding a PCG64
generator. The block layout depends only on the sample count, so the result
is identical whatever the number of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import AtomSpec, ConstantSet, convert, default_constants
from .hfs import (REFERENCE_MAGNITUDES, CorrectionTerm, TermName, assemble_budget,
                  fermi_energy, fermi_log_sensitivities, standard_corrections)
from .units import Measurement, Unit
from .zemach import zemach_factor

MC_BLOCK = 16384
RNG_ALGORITHM = f"numpy PCG64, SeedSequence.spawn per block of {MC_BLOCK} draws, standard normal"

_INPUT_TERMS = (TermName.QED, TermName.RECOIL, TermName.POL, TermName.HVP)


class ExtractionError(ValueError):
    """Inputs give an unphysical (negative) Zemach radius."""

    def __init__(self, message: str, decomposition: dict | None = None):
        super().__init__(message)
        self.decomposition = decomposition or {}


@dataclass(frozen=True)
class ExtractionInput:
    atom: AtomSpec
    exp_hfs: Measurement
    corrections: tuple
    constants: ConstantSet = field(default_factory=default_constants)

    def __post_init__(self):
        object.__setattr__(self, "corrections", tuple(self.corrections))
        names = sorted(t.name.value for t in self.corrections)
        if names != sorted(n.value for n in _INPUT_TERMS):
            raise ValueError("extraction needs exactly the qed, recoil, pol and hvp corrections, "
                             f"got {names}")
        convert(self.exp_hfs, self.atom.energy_unit, self.constants)  # unit check

    @classmethod
    def with_defaults(cls, atom: AtomSpec, exp_hfs: Measurement,
                      constants: ConstantSet | None = None, overrides=()) -> "ExtractionInput":
        constants = constants or default_constants()
        terms = {t.name: t for t in standard_corrections(atom, constants)}
        for t in overrides:
            if t.name is TermName.ZEMACH:
                raise ValueError("the Zemach term is the unknown and cannot be overridden")
            terms[t.name] = t
        return cls(atom, exp_hfs, tuple(terms[n] for n in _INPUT_TERMS), constants)

    def term(self, name) -> CorrectionTerm:
        name = TermName(name)
        return next(t for t in self.corrections if t.name is name)


def _pieces(inp: ExtractionInput):
    fermi = fermi_energy(inp.atom, inp.constants)
    exp = convert(inp.exp_hfs, fermi.unit, inp.constants)
    factor = zemach_factor(inp.atom, inp.constants)
    deltas = {t.name.value: t.value.value for t in inp.corrections}
    residual = exp.value / fermi.value - 1.0 - math.fsum(deltas.values())
    return fermi, exp, factor, deltas, residual


def residual_decomposition(inp: ExtractionInput) -> dict:
    fermi, exp, factor, deltas, residual = _pieces(inp)
    return {
        "exp_over_fermi_minus_one": exp.value / fermi.value - 1.0,
        **{f"delta_{k}": v for k, v in deltas.items()},
        "zemach_residual": residual,
        "zemach_factor_per_fm": factor,
        "radius_fm": -residual / factor,
    }


def _log_factor_sensitivities(inp: ExtractionInput) -> dict:
    alpha = inp.constants.value("alpha")
    ml, mp = inp.atom.lepton_mass.value, inp.atom.proton_mass.value
    return {"alpha": 1.0 / alpha, "mu_p": 0.0,
            "lepton_mass": 1.0 / ml - 1.0 / (ml + mp),
            "proton_mass": 1.0 / mp - 1.0 / (ml + mp)}


def linear_breakdown(inp: ExtractionInput) -> dict:
    """One-sigma contribution (fm) of every independent input to the radius."""
    fermi, exp, factor, deltas, residual = _pieces(inp)
    radius = -residual / factor
    out = {"exp_hfs": exp.uncertainty / (fermi.value * factor)}
    ratio = exp.value / (fermi.value * factor)
    dlnf = fermi_log_sensitivities(inp.atom, inp.constants)
    dlnd = _log_factor_sensitivities(inp)
    for name, (d_f, sigma) in dlnf.items():
        out[name] = abs(ratio * d_f - radius * dlnd[name]) * sigma
    for t in inp.corrections:
        out[t.name.value] = t.value.uncertainty / factor
    return out


def extract_zemach_radius(inp: ExtractionInput) -> Measurement:
    fermi, exp, factor, deltas, residual = _pieces(inp)
    radius = -residual / factor
    if radius < -1e-9:
        raise ExtractionError(
            f"extracted Zemach radius is negative ({radius:.6g} fm); inputs are inconsistent",
            residual_decomposition(inp))
    sigma = math.sqrt(math.fsum(v * v for v in linear_breakdown(inp).values()))
    return Measurement(radius, sigma, Unit.FM)


@dataclass(frozen=True)
class MonteCarloResult:
    radius: Measurement
    sigma_standard_error: float
    negative_draws: int
    samples: np.ndarray | None = field(default=None, repr=False)
    algorithm: str = RNG_ALGORITHM


def _mc_block(inp: ExtractionInput, seed_seq: np.random.SeedSequence, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    fermi, exp, factor, deltas, _ = _pieces(inp)
    c = inp.constants
    alpha, mu_p = c.lookup("alpha"), c.lookup("mu_p")
    ml, mp = inp.atom.lepton_mass, inp.atom.proton_mass

    def draw(m: Measurement):
        return m.value + m.uncertainty * rng.standard_normal(n)

    e = draw(exp)
    a = draw(alpha)
    mu = draw(mu_p)
    l_mass = draw(ml)
    p_mass = draw(mp)
    delta_sum = sum(draw(inp.term(name).value) for name in _INPUT_TERMS)

    def mass_part(l, p):
        return l**2 * p**2 / (l + p) ** 3

    f = fermi.value * (a / alpha.value) ** 4 * (mu / mu_p.value) * (
        mass_part(l_mass, p_mass) / mass_part(ml.value, mp.value))
    reduced = l_mass * p_mass / (l_mass + p_mass)
    d = factor * (a / alpha.value) * (reduced / inp.atom.reduced_mass.value)
    return -(e / f - 1.0 - delta_sum) / d


def monte_carlo_samples(inp: ExtractionInput, samples: int = 100_000, seed: int = 0,
                        n_jobs: int = 1) -> np.ndarray:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n_blocks = -(-samples // MC_BLOCK)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = [min(MC_BLOCK, samples - i * MC_BLOCK) for i in range(n_blocks)]
    jobs = list(zip(children, sizes))
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            blocks = list(pool.map(lambda job: _mc_block(inp, *job), jobs))
    else:
        blocks = [_mc_block(inp, *job) for job in jobs]
    return np.concatenate(blocks)


def propagate_monte_carlo(inp: ExtractionInput, samples: int = 100_000, seed: int = 0, *,
                          n_jobs: int = 1, keep_samples: bool = False) -> MonteCarloResult:
    """Sample every uncertain input from an independent normal and re-extract."""
    if samples < 1000:
        raise ValueError("at least 1000 samples are required")
    draws = monte_carlo_samples(inp, samples, seed, n_jobs)
    mean = float(np.mean(draws))
    sigma = float(np.std(draws, ddof=1))
    return MonteCarloResult(Measurement(mean, sigma, Unit.FM),
                            sigma / math.sqrt(2.0 * (samples - 1)),
                            int(np.count_nonzero(draws < 0)),
                            draws if keep_samples else None)


@dataclass(frozen=True)
class PrecisionPlan:
    target_relative_rp_uncertainty: float
    required_exp_error_ppm: float
    required_pol_uncertainty: float
    feasible: bool
    pol_uncertainty: float
    target_sigma_rp_fm: float
    theory_sigma_rp_fm: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def default_theory_uncertainties(atom: AtomSpec) -> dict:
    """Published uncertainties of the non-pol theory inputs, in relative (δ) units."""
    ref = REFERENCE_MAGNITUDES[atom.lepton]
    return {"fermi": ref["fermi"][1], "qed": ref["qed"][1], "recoil": ref["recoil"][1],
            "hvp": ref["hvp"][1]}


def plan_precision(atom: AtomSpec, target_relative_rp: float, pol_uncertainty: float,
                   constants: ConstantSet | None = None,
                   radius_assumed: Measurement = Measurement(1.04, 0.0, Unit.FM),
                   other_uncertainties: dict | None = None) -> PrecisionPlan:
    """Largest experimental error that still meets a target radius accuracy.

    Works in relative-correction units: a radius uncertainty σ_R corresponds
    to 2 α m_r σ_R. The theory terms are subtracted in quadrature and the
    remainder is the allowed experimental error relative to the Fermi energy,
    reported in ppm of the splitting predicted at ``radius_assumed``.
    """
    constants = constants or default_constants()
    if not target_relative_rp > 0:
        raise ValueError("target must be > 0")
    if not radius_assumed.value > 0:
        raise ValueError("assumed radius must be > 0")
    others = default_theory_uncertainties(atom) if other_uncertainties is None else other_uncertainties
    factor = zemach_factor(atom, constants)
    theory_sq = pol_uncertainty**2 + math.fsum(v * v for v in others.values())
    theory_sigma = math.sqrt(theory_sq) / factor
    if math.isinf(target_relative_rp):
        return PrecisionPlan(target_relative_rp, math.inf, math.inf, True, pol_uncertainty,
                             math.inf, theory_sigma)
    target_sigma = target_relative_rp * radius_assumed.value
    allowed = target_sigma * factor
    radicand = allowed**2 - theory_sq
    pol_ceiling = math.sqrt(max(0.0, allowed**2 - math.fsum(v * v for v in others.values())))
    if radicand < 0:
        return PrecisionPlan(target_relative_rp, 0.0, pol_ceiling, False, pol_uncertainty,
                             target_sigma, theory_sigma)
    budget = assemble_budget(atom, radius_assumed, constants=constants,
                             overrides=[CorrectionTerm.user("pol", _default_pol(atom), pol_uncertainty)])
    exp_rel_fermi = math.sqrt(radicand)
    ppm = exp_rel_fermi * budget.fermi.value / budget.total.value * 1e6
    return PrecisionPlan(target_relative_rp, ppm, pol_ceiling, True, pol_uncertainty,
                         target_sigma, theory_sigma)


def _default_pol(atom: AtomSpec) -> float:
    return next(t.value.value for t in standard_corrections(atom) if t.name is TermName.POL)
