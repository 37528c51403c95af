"""High-frequency surface currents on smooth convex obstacles in 2-D.

Exact Mie currents for the circle, Kirchhoff and local-condition
approximations, and amplitudes built on the Fock-type function Psi.
"""
from .ansatz import (
    ExpansionConfig,
    ExpansionTerm,
    Prop1Estimate,
    ScalingFit,
    bt1_leading_amplitude,
    bt2_leading_amplitude,
    estimate_prop1,
    estimate_prop2,
    fit_power_law,
    leading_coefficient,
    mt_leading_amplitude,
)
from .currents import (
    CURRENT_KINDS,
    bt1_current,
    bt2_current_2d,
    bt2_current_2d_rationalized,
    bt2_current_3d_form,
    kirchhoff_current,
)
from .errors import ConfigError, ConvergenceError, DomainError, FitError
from .fock import FockEval, psi, psi_values
from .geometry import CurveGeometry, RegionLabel, WaveConfig, classify, z_function
from .harness import (
    CurrentTrace,
    ExperimentConfig,
    SweepResult,
    dump_psi_table,
    load_config,
    parse_config,
    run_sweep,
    run_trace,
    validate,
)
from .reference import MieSolution, exact_current, mie_build
from .specfun import AiryPair, airy_ai, airy_aplus, bessel_jy_sequence, hankel1_sequence

__version__ = "0.1.0"
