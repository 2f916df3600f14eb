"""Topological recursion for the hermitian two-matrix model on genus-zero spectral curves."""
from .scalars import CouplingSeriesRing, ExactField, FloatField
from .polynomial import Polynomial, RationalFunction
from .series import LaurentSeries
from .curve import SpectralCurve, build_curve_from_potentials, curve_from_laurent, swap_xy
from .recursion import Correlator, RecursionEngine, bergmann_kernel, w3_closed_form
from .free_energy import HOperator, free_energy, free_energy_f0
from .diagrams import DiagramEvaluator, enumerate_diagrams
from .mixed import MixedCorrelator, compute_w_k1, w_11_0, w_21_0
from .wick import WickModel, wick_moments
from .jobs import run_corpus, run_job
from . import catalog

__version__ = "0.1.0"

__all__ = [
    "ExactField", "FloatField", "CouplingSeriesRing", "Polynomial", "RationalFunction",
    "LaurentSeries", "SpectralCurve", "build_curve_from_potentials", "curve_from_laurent",
    "swap_xy", "RecursionEngine", "Correlator", "bergmann_kernel", "w3_closed_form",
    "HOperator", "free_energy", "free_energy_f0", "DiagramEvaluator", "enumerate_diagrams",
    "MixedCorrelator", "compute_w_k1", "w_11_0", "w_21_0", "WickModel", "wick_moments",
    "run_job", "run_corpus", "catalog",
]
