"""Canonical (stable-equilibrium) thermodynamics of a finite spectrum.

Everything is in units where k = 1: beta is an inverse energy, entropy and
heat capacity are dimensionless. Internally energies are measured from the
ground level so that the excitation energy ``E - E_min`` keeps full relative
precision at low temperature, which is what the inversions below rely on.

All functions accept a scalar or an array for ``beta`` / ``E`` and return the
same shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spectra import EnergySpectrum

ENERGY_RTOL = 1e-12
_MAX_ITER = 200


def _as_beta(beta) -> np.ndarray:
    b = np.asarray(beta, dtype=float)
    if not np.all(np.isfinite(b)) or np.any(b <= 0):
        bad = b[~(np.isfinite(b) & (b > 0))]
        raise DomainError(f"beta must be finite and > 0, got {bad.ravel()[0]}", bound="lower")
    return b


def _shape(x, scalar_input: bool):
    return float(x) if scalar_input else x


def _stats(spectrum: EnergySpectrum, beta: np.ndarray):
    """Return (ln Z relative to ground, excitation mean, energy variance) for a 1-D beta array."""
    x = spectrum.excitations
    a = np.log(spectrum.degeneracy_array)[None, :] - beta[:, None] * x[None, :]
    amax = a.max(axis=1, keepdims=True)
    w = np.exp(a - amax)
    z = w.sum(axis=1)
    p = w / z[:, None]
    u = p @ x
    var = (p * (x[None, :] - u[:, None]) ** 2).sum(axis=1)
    lnz = amax[:, 0] + np.log(z)
    return lnz, u, var


def _eval(spectrum, beta):
    b = _as_beta(beta)
    flat = b.reshape(-1)
    lnz, u, var = _stats(spectrum, flat)
    return b, flat, lnz, u, var


def ln_partition(spectrum: EnergySpectrum, beta):
    b, flat, lnz, _, _ = _eval(spectrum, beta)
    out = (lnz - flat * spectrum.ground_energy).reshape(b.shape)
    return _shape(out, b.ndim == 0)


def mean_energy(spectrum: EnergySpectrum, beta):
    b, _, _, u, _ = _eval(spectrum, beta)
    return _shape((spectrum.ground_energy + u).reshape(b.shape), b.ndim == 0)


def excitation_energy(spectrum: EnergySpectrum, beta):
    """Mean energy above the ground level, accurate to full relative precision."""
    b, _, _, u, _ = _eval(spectrum, beta)
    return _shape(u.reshape(b.shape), b.ndim == 0)


def entropy_se(spectrum: EnergySpectrum, beta):
    """Von Neumann entropy of the canonical state, S = beta*E + ln Z."""
    b, flat, lnz, u, _ = _eval(spectrum, beta)
    return _shape((flat * u + lnz).reshape(b.shape), b.ndim == 0)


def heat_capacity(spectrum: EnergySpectrum, beta):
    b, flat, _, _, var = _eval(spectrum, beta)
    return _shape((flat**2 * var).reshape(b.shape), b.ndim == 0)


def canonical_probabilities(spectrum: EnergySpectrum, beta: float) -> np.ndarray:
    """Canonical probabilities over degeneracy-expanded microstates."""
    b = float(_as_beta(beta))
    a = -b * spectrum.excitations
    w = np.exp(a - a.max())
    w = np.repeat(w, spectrum.degeneracies)
    return w / w.sum()


def infinite_temperature_energy(spectrum: EnergySpectrum) -> float:
    """Degeneracy-weighted mean energy, the beta -> 0+ limit of the mean energy."""
    g = spectrum.degeneracy_array
    return spectrum.ground_energy + float(g @ spectrum.excitations / g.sum())


def admissible_interval(spectrum: EnergySpectrum) -> tuple[float, float]:
    """Open energy interval of stable-equilibrium states with 0 < beta < inf."""
    return spectrum.ground_energy, infinite_temperature_energy(spectrum)


def entropy_bounds(spectrum: EnergySpectrum) -> tuple[float, float]:
    """Open interval of canonical entropies: (ln g_ground, ln N)."""
    return math.log(spectrum.degeneracies[0]), math.log(spectrum.microstate_count)


def _bisect_point(lo, hi):
    # geometric mean once both ends are positive and far apart
    geo = (lo > 0) & np.isfinite(hi) & (hi > 4 * lo)
    mid = 0.5 * (lo + hi)
    mid = np.where(geo, np.sqrt(np.where(geo, lo * hi, 1.0)), mid)
    return mid


def _solve_decreasing(func, target: np.ndarray, ftol: np.ndarray):
    """Solve func(beta) = target for a strictly decreasing func on (0, inf).

    ``func(beta)`` returns ``(value, d value / d beta)`` for 1-D arrays. The
    bracket is grown by doubling from beta = 1, then refined by Newton steps
    that fall back to bisection whenever they leave the bracket.
    """
    n = target.size
    beta = np.ones(n)
    f, d = func(beta)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    # bracket by doubling / halving
    for _ in range(2100):
        above = f > target
        lo = np.where(above, beta, lo)
        hi = np.where(~above, beta, hi)
        grow = np.isinf(hi)
        shrink = (lo == 0) & ~grow & (f < target)
        if not (grow.any() or shrink.any()):
            break
        idx = np.flatnonzero(grow | shrink)
        beta[idx] = np.where(grow[idx], beta[idx] * 2.0, beta[idx] * 0.5)
        f[idx], d[idx] = func(beta[idx])
    else:  # pragma: no cover - targets are validated before solving
        raise DomainError("could not bracket beta")
    done = np.abs(f - target) <= ftol
    for _ in range(_MAX_ITER):
        active = np.flatnonzero(~done)
        if active.size == 0:
            break
        b, fa, da = beta[active], f[active], d[active]
        l, h = lo[active], hi[active]
        with np.errstate(divide="ignore", invalid="ignore"):
            step = (fa - target[active]) / da
        cand = b - step
        bad = ~np.isfinite(cand) | (cand <= l) | (cand >= h)
        cand = np.where(bad, _bisect_point(l, h), cand)
        fn, dn = func(cand)
        above = fn > target[active]
        lo[active] = np.where(above, cand, l)
        hi[active] = np.where(above, h, cand)
        beta[active], f[active], d[active] = cand, fn, dn
        width = hi[active] - lo[active]
        moved = np.abs(cand - b)
        done[active] = (
            (np.abs(fn - target[active]) <= ftol[active])
            | (width <= 4e-16 * cand)
            | (~bad & (moved <= 4e-16 * cand))
        )
    return beta


def _excess_or_raise(spectrum: EnergySpectrum, u: np.ndarray, shown: np.ndarray) -> np.ndarray:
    """Validate excitation energies ``u`` against (0, E_top - E_min); ``shown`` is what errors report."""
    e_min, e_top = admissible_interval(spectrum)
    if not np.all(np.isfinite(u)):
        raise DomainError("energy must be finite")
    low = u <= 0
    if low.any():
        raise DomainError(
            f"energy {float(shown[low].ravel()[0])!r} is at or below the ground energy {e_min!r}"
            f" of {spectrum.name or 'spectrum'} (lower bound, beta -> inf)",
            bound="lower",
        )
    high = u >= e_top - e_min
    if high.any():
        raise DomainError(
            f"energy {float(shown[high].ravel()[0])!r} is at or above the infinite-temperature energy {e_top!r}"
            f" of {spectrum.name or 'spectrum'} (upper bound, beta -> 0)",
            bound="upper",
        )
    return u


def _beta_from_excess(spectrum: EnergySpectrum, u_t: np.ndarray, tol: np.ndarray) -> np.ndarray:
    # ln(u) is close to linear in beta at both ends of the curve
    def func(b):
        _, u, var = _stats(spectrum, b)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(u), -var / u

    beta = _solve_decreasing(func, np.log(u_t), np.full(u_t.size, 1e-15))
    got = _stats(spectrum, beta)[1]
    miss = np.abs(got - u_t) > tol
    if miss.any():  # pragma: no cover - guarded by the convergence loop
        raise DomainError(f"beta inversion missed excitation energy {u_t[miss][0]} beyond tolerance")
    return beta


def beta_from_energy(spectrum: EnergySpectrum, E, tol_E: float | None = None):
    """Invert the mean energy: the beta > 0 whose canonical state has energy E.

    The residual criterion is ``|E(beta) - E| <= tol_E`` with default
    ``1e-12 * max(1, |E|)``; iteration continues to machine precision in beta.
    """
    E_arr = np.asarray(E, dtype=float)
    flat = E_arr.reshape(-1)
    if not np.all(np.isfinite(flat)):
        raise DomainError("energy must be finite")
    u_t = _excess_or_raise(spectrum, flat - spectrum.ground_energy, flat)
    tol = ENERGY_RTOL * np.maximum(1.0, np.abs(flat)) if tol_E is None else np.full(flat.size, float(tol_E))
    beta = _beta_from_excess(spectrum, u_t, tol)
    return _shape(beta.reshape(E_arr.shape), E_arr.ndim == 0)


def beta_from_excitation(spectrum: EnergySpectrum, u):
    """beta for a mean energy given as its excess ``u = E - E_min`` over the ground level.

    Keeps full relative precision when ``u`` is far below the resolution of E itself.
    """
    u_arr = np.asarray(u, dtype=float)
    flat = u_arr.reshape(-1)
    u_t = _excess_or_raise(spectrum, flat, flat + spectrum.ground_energy)
    beta = _beta_from_excess(spectrum, u_t, ENERGY_RTOL * np.maximum(1.0, np.abs(flat + spectrum.ground_energy)))
    return _shape(beta.reshape(u_arr.shape), u_arr.ndim == 0)


def beta_from_entropy(spectrum: EnergySpectrum, S):
    """Invert the canonical entropy S(beta), strictly decreasing on (0, inf)."""
    S_arr = np.asarray(S, dtype=float)
    s_lo, s_hi = entropy_bounds(spectrum)
    flat = S_arr.reshape(-1)
    if np.any(~np.isfinite(flat)) or np.any(flat <= s_lo) or np.any(flat >= s_hi):
        raise DomainError(f"entropy outside the attainable interval ({s_lo}, {s_hi})")

    def func(b):
        lnz, u, var = _stats(spectrum, b)
        return b * u + lnz, -b * var

    ftol = 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(flat))
    beta = _solve_decreasing(func, flat, ftol)
    return _shape(beta.reshape(S_arr.shape), S_arr.ndim == 0)


def energy_from_entropy(spectrum: EnergySpectrum, S):
    beta = beta_from_entropy(spectrum, S)
    return mean_energy(spectrum, beta)


def entropy_from_energy(spectrum: EnergySpectrum, E):
    return entropy_se(spectrum, beta_from_energy(spectrum, E))


def h1(spectrum: EnergySpectrum, E, E1):
    """Canonical entropy increment S(E) - S(E1) along the stable-equilibrium curve."""
    return entropy_from_energy(spectrum, E) - entropy_from_energy(spectrum, E1)


@dataclass(frozen=True)
class ThermoPoint:
    lnZ: float
    E: float
    S: float
    C: float


def thermo_point(spectrum: EnergySpectrum, beta: float) -> ThermoPoint:
    b, flat, lnz, u, var = _eval(spectrum, float(beta))
    bb = float(flat[0])
    return ThermoPoint(
        lnZ=float(lnz[0] - bb * spectrum.ground_energy),
        E=float(spectrum.ground_energy + u[0]),
        S=float(bb * u[0] + lnz[0]),
        C=float(bb * bb * var[0]),
    )


@dataclass(frozen=True)
class CanonicalState:
    """Stable-equilibrium state of a spectrum at inverse temperature beta."""

    spectrum: EnergySpectrum
    beta: float

    def __post_init__(self):
        _as_beta(self.beta)

    @property
    def point(self) -> ThermoPoint:
        return thermo_point(self.spectrum, self.beta)

    @property
    def energy(self) -> float:
        return mean_energy(self.spectrum, self.beta)

    @property
    def entropy(self) -> float:
        return entropy_se(self.spectrum, self.beta)

    @property
    def probabilities(self) -> np.ndarray:
        return canonical_probabilities(self.spectrum, self.beta)
