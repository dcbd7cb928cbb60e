"""Interconnection of stable-equilibrium curves and the temperature built on it.

Two systems B and C, each anchored at a stable-equilibrium state, are linked
by the map E_B -> E_C under which both undergo the same canonical entropy
increment. Its derivative is the ratio of inverse temperatures, and
temperature relative to a reference system follows from it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import thermo
from .errors import DomainError, RangeError, StepUnderflowError
from .spectra import EnergySpectrum, harmonic

TRIPLE_POINT_T = 273.16
FD_RELATIVE_STEP = 1e-4
# keep the finite-difference stencil this far inside the domain, relative to the distance to its edge
_FD_EDGE_FRACTION = 1e-3
_FD_SMOOTH_EDGE_FRACTION = 0.5


@dataclass(frozen=True)
class SePoint:
    """A stable-equilibrium state: a spectrum and an admissible energy."""

    spectrum: EnergySpectrum
    E: float

    def __post_init__(self):
        thermo.beta_from_energy(self.spectrum, self.E)

    @classmethod
    def from_beta(cls, spectrum: EnergySpectrum, beta: float) -> "SePoint":
        return cls(spectrum, thermo.mean_energy(spectrum, beta))

    @cached_property
    def beta(self) -> float:
        return thermo.beta_from_energy(self.spectrum, self.E)

    @cached_property
    def entropy(self) -> float:
        return thermo.entropy_se(self.spectrum, self.beta)

    def attainable_delta_s(self) -> tuple[float, float]:
        """Open interval of entropy changes this system can undergo along its curve."""
        lo, hi = thermo.entropy_bounds(self.spectrum)
        return lo - self.entropy, hi - self.entropy

    def with_energy(self, E: float) -> "SePoint":
        return SePoint(self.spectrum, E)


@dataclass(frozen=True)
class TemperatureScale:
    """Reference state R_se1 with its arbitrarily assigned temperature."""

    reference: SePoint
    T_ref: float

    def __post_init__(self):
        if not (np.isfinite(self.T_ref) and self.T_ref > 0):
            raise DomainError(f"reference temperature must be > 0, got {self.T_ref}")

    @classmethod
    def calibrated(cls, reference: SePoint, k: float = 1.0) -> "TemperatureScale":
        """Scale whose reference temperature is 1/(k*beta_ref), i.e. consistent with k."""
        return cls(reference, 1.0 / (k * reference.beta))

    @property
    def boltzmann(self) -> float:
        """Energy per scale unit implied by this scale; 1 for a calibrated scale."""
        return 1.0 / (self.T_ref * self.reference.beta)


def triple_point_scale() -> TemperatureScale:
    """Preset reference: a synthetic oscillator at the state with kT = 273.16 (k = 1).

    Only the constant is physical; the spectrum is a stand-in for water at
    its triple point.
    """
    spectrum = harmonic(10.0, 256)
    spectrum = EnergySpectrum(
        "triple-point(synthetic)", spectrum.energies, spectrum.degeneracies
    )
    reference = SePoint.from_beta(spectrum, 1.0 / TRIPLE_POINT_T)
    return TemperatureScale(reference, TRIPLE_POINT_T)


def _domain_edges(b: SePoint, c: SePoint) -> tuple[float, float, bool]:
    sb_lo, sb_hi = thermo.entropy_bounds(b.spectrum)
    dc_lo, dc_hi = c.attainable_delta_s()
    s_lo = b.entropy + dc_lo
    s_hi = b.entropy + dc_hi
    e_min, e_top = thermo.admissible_interval(b.spectrum)
    lo = e_min if s_lo <= sb_lo else thermo.energy_from_entropy(b.spectrum, s_lo)
    top_is_b = s_hi >= sb_hi
    hi = e_top if top_is_b else thermo.energy_from_entropy(b.spectrum, s_hi)
    return lo, hi, top_is_b


def f11_domain(b: SePoint, c: SePoint) -> tuple[float, float]:
    """Open interval of E_B on which f11(b, c, .) is defined."""
    lo, hi, _ = _domain_edges(b, c)
    return lo, hi


def f11(b: SePoint, c: SePoint, E_B):
    """Energy of C whose entropy increment from c matches that of B from b.

    Accepts a scalar or an array of E_B values.
    """
    E = np.asarray(E_B, dtype=float)
    # the anchor maps to the anchor exactly; inverting S(beta) there is ill-conditioned at low T
    anchor = E == b.E
    dS = np.asarray(thermo.entropy_from_energy(b.spectrum, E)) - b.entropy
    target = c.entropy + dS
    s_lo, s_hi = thermo.entropy_bounds(c.spectrum)
    bad = ((target <= s_lo) | (target >= s_hi)) & ~anchor
    if np.any(bad):
        att = c.attainable_delta_s()
        bound = "lower" if target[bad].flat[0] <= s_lo else "upper"
        raise RangeError(
            f"entropy increment {dS[bad].flat[0]:.17g} past the {bound} bound of the attainable interval"
            f" ({att[0]:.17g}, {att[1]:.17g}) of {c.spectrum.name or 'C'}",
            attainable=att,
        )
    E_C = np.full(E.shape, c.E)
    free = ~anchor
    if np.any(free):
        E_C[free] = thermo.mean_energy(c.spectrum, thermo.beta_from_entropy(c.spectrum, target[free]))
    return float(E_C) if E.ndim == 0 else E_C


def _fd_step(b: SePoint, c: SePoint, E_B: float, h: float | None) -> float:
    lo, hi, top_is_b = _domain_edges(b, c)
    if h is None:
        h = FD_RELATIVE_STEP * (hi - lo)
        # f11 is singular at a ground level and at C's entropy ceiling, but
        # analytic through B's infinite-temperature energy
        upper = _FD_SMOOTH_EDGE_FRACTION if top_is_b else _FD_EDGE_FRACTION
        h = min(h, _FD_EDGE_FRACTION * (E_B - lo), upper * (hi - E_B))
    elif not (lo < E_B - h and E_B + h < hi):
        raise DomainError(f"finite-difference stencil E_B +- {h} leaves the domain ({lo}, {hi})")
    if not h > 1e-9 * abs(E_B) or not h > 0:
        raise StepUnderflowError(f"finite-difference step {h!r} underflows at E_B = {E_B!r}")
    return h


def df11(b: SePoint, c: SePoint, E_B: float, method: str = "analytic", h: float | None = None) -> float:
    """Derivative of f11 at E_B.

    ``analytic`` is the inverse-temperature ratio beta_B / beta_C; the
    ``finite_difference`` route is a central difference with one level of
    Richardson extrapolation and never consults beta.
    """
    if method == "analytic":
        E_C = f11(b, c, E_B)
        return thermo.beta_from_energy(b.spectrum, E_B) / thermo.beta_from_energy(c.spectrum, E_C)
    if method != "finite_difference":
        raise ValueError(f"unknown derivative method {method!r}")
    h = _fd_step(b, c, E_B, h)
    xs = np.array([E_B - h, E_B + h, E_B - h / 2, E_B + h / 2])
    fs = f11(b, c, xs)
    d_h = (fs[1] - fs[0]) / (2 * h)
    d_h2 = (fs[3] - fs[2]) / h
    return float((4 * d_h2 - d_h) / 3)


def temperature(point: SePoint, scale: TemperatureScale, method: str = "analytic") -> float:
    """Temperature of ``point`` on ``scale``: T_ref times the slope of f11 from the reference."""
    if method == "analytic":
        return scale.T_ref * scale.reference.beta / point.beta
    return scale.T_ref * df11(scale.reference, point, scale.reference.E, method)


def reciprocal_temperature(spectrum: EnergySpectrum, E, scale: TemperatureScale):
    """1/T(E) along the stable-equilibrium curve of ``spectrum`` (vectorized)."""
    return thermo.beta_from_energy(spectrum, E) / (scale.T_ref * scale.reference.beta)


def temperature_ratio(b: SePoint, c: SePoint, method: str = "analytic") -> float:
    """T_C / T_B measured directly as the slope of f11 at b, with no reference system."""
    return df11(b, c, b.E, method)
