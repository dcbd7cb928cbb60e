"""Weight processes on model states.

States are diagonal density operators, i.e. probability vectors over the
degeneracy-expanded microstates of a spectrum. A standard weight process of
AB with respect to B is simulated by entropy bookkeeping: B ends in the
stable-equilibrium state whose entropy absorbs A's change plus whatever
entropy the protocol produces.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import thermo
from .errors import EntropometerError, RangeError, SpectrumError
from .interconnect import SePoint
from .spectra import EnergySpectrum, compose

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ModelState:
    spectrum: EnergySpectrum
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size != self.spectrum.microstate_count:
            raise SpectrumError(
                f"state has {p.size} probabilities, spectrum has {self.spectrum.microstate_count} microstates"
            )
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise SpectrumError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
            raise SpectrumError(f"probabilities sum to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_weights(cls, spectrum: EnergySpectrum, weights) -> "ModelState":
        w = np.asarray(weights, dtype=float)
        return cls(spectrum, w / w.sum())

    @classmethod
    def canonical(cls, spectrum: EnergySpectrum, beta: float) -> "ModelState":
        return cls(spectrum, thermo.canonical_probabilities(spectrum, beta))

    @cached_property
    def energy(self) -> float:
        excess = self.spectrum.microstate_energies - self.spectrum.ground_energy
        return self.spectrum.ground_energy + float(self.probs @ excess)

    @cached_property
    def entropy(self) -> float:
        return vn_entropy(self)


def vn_entropy(state: ModelState) -> float:
    """-sum p ln p over microstates, with 0 ln 0 = 0."""
    p = state.probs[state.probs > 0]
    return float(-(p @ np.log(p)))


@dataclass(frozen=True)
class StandardProcessOutcome:
    E_B_initial: float
    E_B_final: float
    sigma: float
    reversible: bool
    delta_S_A: float
    work: float  # done by AB on the weight: -(dE_A + dE_B)


def simulate_standard_process(
    a1: ModelState, a2: ModelState, b: SePoint, sigma: float = 0.0
) -> StandardProcessOutcome:
    """Weight process for AB, standard with respect to B, taking A from a1 to a2.

    B's final entropy is its initial entropy minus A's entropy change plus the
    entropy ``sigma`` produced by the protocol; ``sigma = 0`` is the reversible
    process and gives the lowest attainable final energy of B.
    """
    if a1.spectrum != a2.spectrum:
        raise SpectrumError("initial and final states of A must share a spectrum")
    if not (np.isfinite(sigma) and sigma >= 0):
        raise EntropometerError(f"entropy production must be >= 0, got {sigma}")
    dS_A = vn_entropy(a2) - vn_entropy(a1)
    s_target = b.entropy - dS_A + sigma
    if s_target == b.entropy:
        E_final = b.E
    else:
        s_lo, s_hi = thermo.entropy_bounds(b.spectrum)
        if not s_lo < s_target < s_hi:
            att = b.attainable_delta_s()
            bound = "lower" if s_target <= s_lo else "upper"
            raise RangeError(
                f"B would need an entropy change of {s_target - b.entropy:.17g}, past the {bound} bound of the"
                f" attainable interval ({att[0]:.17g}, {att[1]:.17g}) of {b.spectrum.name or 'B'}",
                attainable=att,
            )
        E_final = thermo.energy_from_entropy(b.spectrum, s_target)
    work = -((a2.energy - a1.energy) + (E_final - b.E))
    return StandardProcessOutcome(b.E, float(E_final), float(sigma), sigma == 0, dS_A, work)


def _probs(x) -> np.ndarray:
    return x.probs if isinstance(x, ModelState) else np.asarray(x, dtype=float)


def unitary_feasible(pA1, pB1, pA2, pB2, tol: float = 1e-10) -> bool:
    """True when the product states pA1 x pB1 and pA2 x pB2 share their eigenvalue multiset."""
    first = np.outer(_probs(pA1), _probs(pB1)).ravel()
    second = np.outer(_probs(pA2), _probs(pB2)).ravel()
    if first.size != second.size:
        raise SpectrumError(f"product dimensions differ: {first.size} vs {second.size}")
    return bool(np.all(np.abs(np.sort(first) - np.sort(second)) <= tol))


def mirror_nonequilibrium(a: EnergySpectrum, b: EnergySpectrum, beta: float) -> ModelState:
    """State of ``a`` carrying the canonical probabilities of ``b`` at ``beta``.

    Probabilities go in decreasing order onto microstates of increasing energy,
    so the result has the lowest energy among states with its eigenvalues.
    """
    if a.microstate_count != b.microstate_count:
        raise SpectrumError(f"microstate counts differ: {a.microstate_count} vs {b.microstate_count}")
    p = np.sort(thermo.canonical_probabilities(b, beta))[::-1]
    return ModelState(a, p)


def product_state(sa: ModelState, sb: ModelState) -> ModelState:
    """Uncorrelated state of the composite, on the spectrum returned by ``compose``."""
    energies = np.add.outer(sa.spectrum.microstate_energies, sb.spectrum.microstate_energies).ravel()
    probs = np.outer(sa.probs, sb.probs).ravel()
    order = np.argsort(energies, kind="stable")
    return ModelState(compose(sa.spectrum, sb.spectrum), probs[order])


@dataclass(frozen=True)
class Leg:
    """One weight process in a polygonal; ``forward`` when it runs from the first state toward the last."""

    work: float
    forward: bool = True


@dataclass(frozen=True)
class WeightPolygonal:
    legs: tuple[Leg, ...] = ()

    @classmethod
    def of(cls, legs: Iterable[Leg | tuple[float, bool] | float]) -> "WeightPolygonal":
        out = []
        for leg in legs:
            if isinstance(leg, Leg):
                out.append(leg)
            elif isinstance(leg, tuple):
                out.append(Leg(float(leg[0]), bool(leg[1])))
            else:
                out.append(Leg(float(leg)))
        return cls(tuple(out))

    def reversed(self) -> "WeightPolygonal":
        return WeightPolygonal(tuple(Leg(l.work, not l.forward) for l in reversed(self.legs)))


def polygonal_work(legs: WeightPolygonal | Sequence[Leg]) -> float:
    """Work done by the system along the polygonal: forward legs add, backward legs subtract."""
    items = legs.legs if isinstance(legs, WeightPolygonal) else legs
    return float(sum(l.work if l.forward else -l.work for l in items))


def energy_difference(legs: WeightPolygonal | Sequence[Leg]) -> float:
    """E_last - E_first, the opposite of the work done along the polygonal."""
    return -polygonal_work(legs)
