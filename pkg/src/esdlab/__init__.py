"""Spectral laboratory for weighted rank-one random matrix ensembles."""

__version__ = "0.1.0"

from .measure import WeightMeasure, XiSpec, measure_from_xi, moments  # noqa: E402
from .ensembles import CovFamilySpec, EnsembleConfig, build, validate_ensemble  # noqa: E402
from .spectra import eigenvalues_symmetric, empirical_stieltjes, esd_histogram  # noqa: E402
from .limits import (  # noqa: E402
    AdjacencyGeneralLaw, BlockLaplacian, EffectiveMedium, FixedPointLaw, LimitLaw,
    MarchenkoPastur, ShiftedSemicircle, SolverError, parse_law,
)
from .metrics import ks_distance, law_moments, esd_moments  # noqa: E402
