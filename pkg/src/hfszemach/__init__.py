"""Hyperfine-splitting budgets and proton Zemach radius extraction."""

__version__ = "0.1.0"

from .constants import (AtomSpec, ConstantSet, ConstantsError, Lepton, PhysicalConstant,  # noqa: E402
                        convert, default_constants, load_constants, make_atom)
from .units import Measurement, Unit, UnitError  # noqa: E402
from .formfactors import (Dipole, MultipoleSum, RatioHybrid, Side, bundled_models,  # noqa: E402
                          density, g_e, g_m, load_model, ratio)
from .quadrature import (QuadratureError, QuadratureResult, integrate_finite,  # noqa: E402
                         integrate_semi_infinite)
from .zemach import (ZemachResult, delta_zemach, zemach_radius_coordinate,  # noqa: E402
                     zemach_radius_dipole_analytic, zemach_radius_momentum)
from .hfs import (CorrectionTerm, HfsBudget, assemble_budget, default_corrections,  # noqa: E402
                  delta_qed, fermi_energy, recoil_correction)
from .extraction import (ExtractionInput, PrecisionPlan, extract_zemach_radius,  # noqa: E402
                         plan_precision, propagate_monte_carlo)
from .estimator import ZemachRadiusExtractor  # noqa: E402
