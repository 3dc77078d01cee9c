"""Adaptive homodyne detection of coherent-state ensembles.

Monte Carlo quantum-trajectory simulation of balanced homodyne detection with
an adaptively controlled local-oscillator phase, comparing heterodyne
detection, Wiseman's phase-feedback rule and local maximization of mutual
information (LMMI).
"""

__version__ = "0.1.0"

from .ensemble import (
    CoherentAmplitude,
    Ensemble,
    QuadratureStats,
    make_psk,
    make_qam16,
    make_star,
    mean_photon_number,
    quadrature_stats,
)
from .information import (
    capacity_heterodyne,
    capacity_holevo_bound,
    capacity_homodyne_squeezed,
    holevo_information,
    shannon_entropy,
)
from .montecarlo import BatchStatistics, compare_policies, run_batch
from .policy import PolicySpec, lmmi_phase
from .povm import sample_povm
from .trajectory import SimConfig, run_trajectory

__all__ = [
    "BatchStatistics",
    "CoherentAmplitude",
    "Ensemble",
    "PolicySpec",
    "QuadratureStats",
    "SimConfig",
    "capacity_heterodyne",
    "capacity_holevo_bound",
    "capacity_homodyne_squeezed",
    "compare_policies",
    "holevo_information",
    "lmmi_phase",
    "make_psk",
    "make_qam16",
    "make_star",
    "mean_photon_number",
    "quadrature_stats",
    "run_batch",
    "run_trajectory",
    "sample_povm",
    "shannon_entropy",
]
