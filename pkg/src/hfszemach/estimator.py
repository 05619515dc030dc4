"""scikit-learn compatible wrapper around the extraction.

``ZemachRadiusExtractor`` maps measured splittings to Zemach radii
(``transform``) and radii back to predicted splittings
(``inverse_transform``), so a batch of measurements can go through the
usual sklearn machinery (pipelines, ``get_params``/``set_params``, cloning).

>>> est = ZemachRadiusExtractor(atom="hydrogen").fit()
>>> est.transform([[1420405751.7667]]).round(3)
array([[1.064]])
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .constants import load_constants, make_atom
from .extraction import ExtractionInput, linear_breakdown
from .hfs import CorrectionTerm, fermi_energy, standard_corrections
from .units import Measurement
from .zemach import zemach_factor


class ZemachRadiusExtractor(TransformerMixin, BaseEstimator):
    """Measured HFS (in Hz for hydrogen, meV for muonic hydrogen) -> Zemach radius in fm.

    Parameters
    ----------
    atom : {"hydrogen", "muonic-hydrogen"}
    constants : str or path
        Bundled constant set name or JSON file.
    pol, pol_uncertainty : float, optional
        Override the polarizability correction (value and one sigma).
    exp_uncertainty_ppm : float
        Relative uncertainty assigned to every measured splitting, used by
        ``uncertainty``.
    """

    def __init__(self, atom="hydrogen", constants="codata-pinned", pol=None,
                 pol_uncertainty=None, exp_uncertainty_ppm=0.0):
        self.atom = atom
        self.constants = constants
        self.pol = pol
        self.pol_uncertainty = pol_uncertainty
        self.exp_uncertainty_ppm = exp_uncertainty_ppm

    def fit(self, X=None, y=None):
        """Resolve constants, Fermi energy and corrections; ``X`` is not used."""
        self.constants_ = load_constants(self.constants)
        self.atom_ = make_atom(self.constants_, self.atom)
        terms = {t.name.value: t for t in standard_corrections(self.atom_, self.constants_)}
        if self.pol is not None or self.pol_uncertainty is not None:
            old = terms["pol"].value
            terms["pol"] = CorrectionTerm.user(
                "pol", old.value if self.pol is None else self.pol,
                old.uncertainty if self.pol_uncertainty is None else self.pol_uncertainty)
        self.corrections_ = [terms[n] for n in ("qed", "recoil", "pol", "hvp")]
        self.fermi_ = fermi_energy(self.atom_, self.constants_)
        self.zemach_factor_ = zemach_factor(self.atom_, self.constants_)
        self.correction_sum_ = math.fsum(t.value.value for t in self.corrections_)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "fermi_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of splittings, got {X.shape[1]}")
        return -(X / self.fermi_.value - 1.0 - self.correction_sum_) / self.zemach_factor_

    def inverse_transform(self, X):
        check_is_fitted(self, "fermi_")
        X = check_array(X, dtype=np.float64)
        return self.fermi_.value * (1.0 + self.correction_sum_ - self.zemach_factor_ * X)

    def uncertainty(self, X):
        """Linear one-sigma uncertainty (fm) of the radius extracted from each row."""
        check_is_fitted(self, "fermi_")
        X = check_array(X, dtype=np.float64)
        out = np.empty_like(X)
        for i, e in enumerate(X[:, 0]):
            meas = Measurement(e, abs(e) * self.exp_uncertainty_ppm * 1e-6, self.fermi_.unit)
            inp = ExtractionInput(self.atom_, meas, tuple(self.corrections_), self.constants_)
            out[i, 0] = math.sqrt(math.fsum(v * v for v in linear_breakdown(inp).values()))
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["zemach_radius_fm"], dtype=object)
