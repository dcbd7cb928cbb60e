"""Operational entropy and temperature for finite quantum models.

Entropy differences are measured as integrals of 1/T of an auxiliary
system along standard weight processes, with temperature built from the
interconnection of stable-equilibrium curves rather than from heat.
"""
from .config import GlobalConfig
from .entropy import (
    EntropyBracket,
    EntropyMeasurement,
    entropy_difference,
    entropy_value,
    irreversible_bound,
    measure_additivity,
)
from .errors import (
    DomainError,
    EntropometerError,
    GraphError,
    InconsistentGraphError,
    MeasurementMismatch,
    QuadratureError,
    RangeError,
    SpectrumError,
    StepUnderflowError,
)
from .extension import (
    AccessibilityGraph,
    EntropyRangeResult,
    Verdict,
    assert_nondecrease,
    check_range_additivity,
    entropy_range,
    product_graph,
)
from .harness import CheckReport, SuiteConfig, run_suite
from .interconnect import (
    TRIPLE_POINT_T,
    SePoint,
    TemperatureScale,
    df11,
    f11,
    f11_domain,
    temperature,
    temperature_ratio,
    triple_point_scale,
)
from .processes import ModelState, simulate_standard_process, unitary_feasible, vn_entropy
from .quadrature import QuadratureConfig, adaptive_simpson
from .spectra import EnergySpectrum, SpectrumLibrary, compose, harmonic, random_spectrum, two_level
from .thermo import ThermoPoint, beta_from_energy, entropy_se, heat_capacity, ln_partition, mean_energy, thermo_point

__version__ = "0.1.0"
