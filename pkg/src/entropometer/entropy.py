"""Operational entropy: integrate 1/T of an auxiliary system along a standard process.

The entropy change of A between two states is read off the auxiliary system
B that a reversible weight process, standard with respect to B, leaves in a
new stable-equilibrium state:

    S(A2) - S(A1) = - integral from E_B1 to E_B2rev of dE / T_B(E)

Every measurement is cross-checked against the von Neumann entropy change of
the model states; a disagreement raises instead of picking a side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import thermo
from .errors import MeasurementMismatch, QuadratureError
from .interconnect import SePoint, TemperatureScale
from .processes import ModelState, product_state, simulate_standard_process
from .quadrature import QuadratureConfig, QuadratureResult, adaptive_simpson
from .spectra import EnergySpectrum

CROSS_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class EntropyMeasurement:
    delta_S: float
    E_B_path: tuple[float, float]
    quadrature_error_estimate: float
    auxiliary: SePoint
    analytic_delta_S: float


@dataclass(frozen=True)
class EntropyBracket:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise MeasurementMismatch(f"bracket is inverted: lower {self.lower} > upper {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower


def integrate_reciprocal_temperature(
    spectrum: EnergySpectrum, E1: float, E2: float, scale: TemperatureScale, quad: QuadratureConfig = QuadratureConfig()
) -> QuadratureResult:
    """Integral of 1/T over [E1, E2] along the stable-equilibrium curve of ``spectrum``.

    Integrates in t = ln(E - E_min): 1/T grows like -ln(E - E_min) near the
    ground level, which is smooth in t but not in E.
    """
    e0 = spectrum.ground_energy
    t1, t2 = math.log(E1 - e0), math.log(E2 - e0)
    k_scale = scale.boltzmann

    def integrand(t):
        u = np.exp(t)
        return thermo.beta_from_excitation(spectrum, u) * k_scale * u

    result = adaptive_simpson(integrand, t1, t2, quad)
    if E2 != E1 and math.copysign(1.0, result.value) != math.copysign(1.0, E2 - E1):
        raise QuadratureError(f"integral of 1/T has the wrong sign on [{E1}, {E2}]")
    return result


def _cross_check(operational: float, analytic: float, tol: float, what: str) -> None:
    if abs(operational - analytic) > tol * max(1.0, abs(analytic)):
        raise MeasurementMismatch(
            f"{what}: operational {operational:.17g} vs analytic {analytic:.17g}"
            f" differ by {abs(operational - analytic):.3g} > {tol:g}"
        )


def entropy_difference(
    a1: ModelState,
    a2: ModelState,
    b: SePoint,
    scale: TemperatureScale,
    quad: QuadratureConfig = QuadratureConfig(),
    check_tol: float = CROSS_CHECK_TOL,
) -> EntropyMeasurement:
    """Measure S(a2) - S(a1) through auxiliary ``b``, in units of energy per scale unit.

    With a calibrated scale (T_ref = 1/beta_ref) the result is in units of k.
    """
    outcome = simulate_standard_process(a1, a2, b, 0.0)
    E1, E2 = outcome.E_B_initial, outcome.E_B_final
    res = integrate_reciprocal_temperature(b.spectrum, E1, E2, scale, quad)
    delta = -res.value
    analytic = scale.boltzmann * outcome.delta_S_A
    _cross_check(delta, analytic, check_tol, "entropy difference")
    return EntropyMeasurement(delta, (E1, E2), res.error_estimate, b, analytic)


def entropy_value(
    a1: ModelState,
    a0: ModelState,
    S0: float,
    b: SePoint,
    scale: TemperatureScale,
    quad: QuadratureConfig = QuadratureConfig(),
    check_tol: float = CROSS_CHECK_TOL,
) -> float:
    """Entropy of a1 given the value S0 assigned to reference state a0."""
    return S0 + entropy_difference(a0, a1, b, scale, quad, check_tol).delta_S


def irreversible_bound(
    a1: ModelState,
    a2: ModelState,
    b_forward: SePoint,
    sigma_f: float,
    b_backward: SePoint,
    sigma_b: float,
    scale: TemperatureScale,
    quad: QuadratureConfig = QuadratureConfig(),
) -> EntropyBracket:
    """Bounds on S(a2) - S(a1) from one irreversible protocol each way.

    The forward protocol a1 -> a2 gives the lower bound, the backward
    protocol a2 -> a1 the upper one; both are tight when no entropy is produced.
    """
    fwd = simulate_standard_process(a1, a2, b_forward, sigma_f)
    rf = integrate_reciprocal_temperature(b_forward.spectrum, fwd.E_B_initial, fwd.E_B_final, scale, quad)
    bwd = simulate_standard_process(a2, a1, b_backward, sigma_b)
    rb = integrate_reciprocal_temperature(b_backward.spectrum, bwd.E_B_initial, bwd.E_B_final, scale, quad)
    lower, upper = -rf.value, rb.value
    # with no entropy production the two bounds coincide up to quadrature error
    if 0 < lower - upper <= max(rf.error_estimate + rb.error_estimate, 2 * quad.tol):
        lower = upper = 0.5 * (lower + upper)
    return EntropyBracket(lower, upper)


@dataclass(frozen=True)
class AdditivityMeasurement:
    delta_S_A: float
    delta_S_B: float
    delta_S_AB: float
    E_D: tuple[float, float, float]  # initial, after the A step, after the B step


def measure_additivity(
    a1: ModelState,
    a2: ModelState,
    b1: ModelState,
    b2: ModelState,
    d: SePoint,
    scale: TemperatureScale,
    quad: QuadratureConfig = QuadratureConfig(),
) -> AdditivityMeasurement:
    """Measure A, B and the composite AB against one shared auxiliary D.

    A goes first (D: E1 -> E3), then B starting from D's new state (E3 -> E2);
    the composite is measured directly from E1.
    """
    step_a = simulate_standard_process(a1, a2, d, 0.0)
    d3 = SePoint(d.spectrum, step_a.E_B_final) if step_a.E_B_final != d.E else d
    step_b = simulate_standard_process(b1, b2, d3, 0.0)
    dS_a = -integrate_reciprocal_temperature(d.spectrum, d.E, d3.E, scale, quad).value
    dS_b = -integrate_reciprocal_temperature(d.spectrum, d3.E, step_b.E_B_final, scale, quad).value
    ab = entropy_difference(product_state(a1, b1), product_state(a2, b2), d, scale, quad)
    return AdditivityMeasurement(dS_a, dS_b, ab.delta_S, (d.E, d3.E, step_b.E_B_final))


def sample_same_energy(
    spectrum: EnergySpectrum, E: float, n: int, rng: np.random.Generator, max_tries: int = 10_000
) -> np.ndarray:
    """Draw ``n`` microstate distributions with mean energy exactly ``E``.

    Each sample mixes a distribution below E with one above it, with the
    mixing weight solved from the linear energy equation. Candidates are
    uniform random weights raised to a random power and, two times in three,
    tilted by exp(-t * energy) with a random t of either sign so that even
    energies near the ground or the top of the spectrum are bracketed.
    """
    eps = spectrum.microstate_energies - spectrum.ground_energy
    u_target = E - spectrum.ground_energy
    width = eps[-1]
    m = eps.size
    out = np.empty((n, m))
    below: list[np.ndarray] = []
    above: list[np.ndarray] = []
    tries = 0
    for i in range(n):
        while not below or not above:
            tries += 1
            if tries > max_tries:
                raise MeasurementMismatch(f"could not bracket energy {E} with random distributions")
            logw = rng.uniform(1.0, 12.0) * np.log(rng.uniform(size=m))
            if rng.uniform() < 0.5:
                logw = np.sort(logw)[::-1]
            kind = rng.integers(3)
            if kind:
                t = np.exp(rng.uniform(-5.0, 16.0)) / width
                logw = logw - (t if kind == 1 else -t) * eps
            w = np.exp(logw - logw.max())
            p = w / w.sum()
            (below if p @ eps < u_target else above).append(p)
        p, q = below.pop(), above.pop()
        ep, eq = p @ eps, q @ eps
        lam = (eq - u_target) / (eq - ep)
        out[i] = lam * p + (1.0 - lam) * q
    return out
