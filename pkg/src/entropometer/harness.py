"""Seeded certification suite.

Each check draws its own random instances from ``default_rng([seed, index])``
so results do not depend on which other checks run or in what order. A check
never raises on a failed property; it reports the worst residual instead.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import thermo
from .entropy import (
    entropy_difference,
    entropy_value,
    irreversible_bound,
    measure_additivity,
    sample_same_energy,
)
from .errors import EntropometerError, StepUnderflowError
from .extension import (
    Verdict,
    assert_nondecrease,
    check_range_additivity,
    entropy_range,
    product_graph,
    random_accessibility_graph,
)
from .interconnect import SePoint, TemperatureScale, df11, f11, f11_domain, temperature, temperature_ratio
from .processes import ModelState, mirror_nonequilibrium, simulate_standard_process, vn_entropy
from .quadrature import QuadratureConfig
from .spectra import EnergySpectrum, harmonic, random_spectrum, two_level

BETA_RANGE = (1e-2, 1e2)
# excitation energies below this lose relative precision (subnormal range)
_MIN_EXCESS = 1e-290
_MIN_ENTROPY_ROOM = 1e-12


@dataclass(frozen=True)
class CheckReport:
    name: str
    instances: int
    max_residual: float
    tolerance: float
    passed: bool
    seed: int
    detail: str = ""


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 1
    n_instances: int | None = None  # None: each check's own default count
    tolerances: dict[str, float] = field(default_factory=dict)
    checks: tuple[str, ...] | None = None
    f11_skew: float = 0.0  # sensitivity canary: shift every f11 value by this much


# --- instance generators -------------------------------------------------


def harness_spectrum(rng: np.random.Generator, min_levels: int = 4, max_levels: int = 32) -> EnergySpectrum:
    """4-32 levels uniform in [0, 10], degeneracies 1-3, ground level moved to 0."""
    n = int(rng.integers(min_levels, max_levels + 1))
    s = random_spectrum(int(rng.integers(2**63)), n, 0.0, 10.0, max_degeneracy=3)
    return EnergySpectrum("harness", tuple(e - s.ground_energy for e in s.energies), s.degeneracies)


def harness_point(rng: np.random.Generator, spectrum: EnergySpectrum, beta_range=BETA_RANGE) -> SePoint:
    lo, hi = np.log(beta_range[0]), np.log(beta_range[1])
    s_lo, s_hi = thermo.entropy_bounds(spectrum)
    for _ in range(1000):
        beta = float(np.exp(rng.uniform(lo, hi)))
        if thermo.excitation_energy(spectrum, beta) > _MIN_EXCESS:
            point = SePoint.from_beta(spectrum, beta)
            # the entropy must be distinguishable from both bounds for f11 to move away from it
            if s_lo + _MIN_ENTROPY_ROOM < point.entropy < s_hi - _MIN_ENTROPY_ROOM:
                return point
    raise EntropometerError("no representable stable-equilibrium point")  # pragma: no cover


def random_model_state(rng: np.random.Generator, spectrum: EnergySpectrum) -> ModelState:
    """Canonical, random, or mirrored (nonequilibrium) state, chosen at random."""
    kind = rng.integers(3)
    if kind == 0:
        return ModelState.canonical(spectrum, float(np.exp(rng.uniform(np.log(0.05), np.log(20.0)))))
    if kind == 1:
        w = rng.uniform(size=spectrum.microstate_count) ** rng.uniform(1.0, 4.0)
        return ModelState.from_weights(spectrum, w)
    other = random_spectrum(int(rng.integers(2**63)), spectrum.microstate_count, 0.0, 10.0)
    return mirror_nonequilibrium(spectrum, other, float(np.exp(rng.uniform(np.log(0.05), np.log(5.0)))))


def fit_auxiliary(rng: np.random.Generator, spectrum: EnergySpectrum, delta_S: float, margin: float = 1e-6) -> SePoint:
    """Random point of ``spectrum`` able to absorb an entropy change of -delta_S with room to spare."""
    s_lo, s_hi = thermo.entropy_bounds(spectrum)
    for _ in range(500):
        b = harness_point(rng, spectrum)
        target = b.entropy - delta_S
        if s_lo + margin < target < s_hi - margin:
            return b
    raise EntropometerError(f"auxiliary cannot absorb entropy change {delta_S}")


def _aux_spectrum(rng):
    return harness_spectrum(rng, 16, 32)


def _small_spectrum(rng, max_levels=6):
    s = random_spectrum(int(rng.integers(2**63)), int(rng.integers(2, max_levels + 1)), 0.0, 5.0, max_degeneracy=2)
    return EnergySpectrum("A", s.energies, s.degeneracies)


def _calibrated_scale(rng):
    return TemperatureScale.calibrated(harness_point(rng, harness_spectrum(rng)))


def _interior_grid(lo, hi, n):
    return np.linspace(lo, hi, n + 2)[1:-1]


def _intersect(*intervals):
    return max(i[0] for i in intervals), min(i[1] for i in intervals)


# --- checks --------------------------------------------------------------

F11 = Callable[..., np.ndarray]


def check_f11_monotonicity(rng, n, tol, f11_fn: F11 = f11):
    worst_steps = 0
    min_diff = math.inf
    for _ in range(n):
        b = harness_point(rng, harness_spectrum(rng))
        c = harness_point(rng, harness_spectrum(rng))
        grid = _interior_grid(*f11_domain(b, c), 100)
        diffs = np.diff(f11_fn(b, c, grid))
        worst_steps += int(np.sum(diffs <= 0))
        min_diff = min(min_diff, float(diffs.min()))
    return worst_steps, f"non-increasing steps={worst_steps}, min forward difference={min_diff:.3e}"


def check_composition(rng, n, tol, f11_fn: F11 = f11):
    worst = 0.0
    for _ in range(n):
        b, r, c = (harness_point(rng, harness_spectrum(rng)) for _ in range(3))
        grid = _interior_grid(*_intersect(f11_domain(b, c), f11_domain(b, r)), 20)
        direct = f11_fn(b, c, grid)
        via = f11_fn(r, c, f11_fn(b, r, grid))
        worst = max(worst, float(np.max(np.abs(direct - via))))
    return worst, "max |f(B->C) - f(R->C) o f(B->R)|"


def check_shift_invariance(rng, n, tol, f11_fn: F11 = f11):
    worst = 0.0
    for _ in range(n):
        b1 = harness_point(rng, harness_spectrum(rng))
        c1 = harness_point(rng, harness_spectrum(rng))
        lo, hi = f11_domain(b1, c1)
        b2 = SePoint(b1.spectrum, float(rng.uniform(lo, hi)))
        c2 = SePoint(c1.spectrum, float(f11_fn(b1, c1, b2.E)))
        grid = _interior_grid(*_intersect((lo, hi), f11_domain(b2, c2)), 20)
        worst = max(worst, float(np.max(np.abs(f11_fn(b1, c1, grid) - f11_fn(b2, c2, grid)))))
    return worst, "max |f anchored at se1 - f anchored at se2|"


def check_derivative(rng, n, tol):
    worst = 0.0
    redraws = 0
    done = 0
    while done < n:
        b = harness_point(rng, harness_spectrum(rng))
        c = harness_point(rng, harness_spectrum(rng))
        lo, hi = f11_domain(b, c)
        E = float(rng.uniform(lo, hi))
        try:
            fd = df11(b, c, E, "finite_difference")
        except StepUnderflowError:
            redraws += 1
            continue
        an = df11(b, c, E, "analytic")
        worst = max(worst, abs(fd - an) / abs(an))
        done += 1
    return worst, f"max relative |analytic - Richardson FD|; redraws for step underflow={redraws}"


def check_reference_independence(rng, n, tol):
    worst = 0.0
    for _ in range(n):
        b = harness_point(rng, harness_spectrum(rng))
        c = harness_point(rng, harness_spectrum(rng))
        scales = [
            TemperatureScale(harness_point(rng, harness_spectrum(rng)), float(np.exp(rng.uniform(-3, 7))))
            for _ in range(2)
        ]
        r1, r2 = (temperature(c, s) / temperature(b, s) for s in scales)
        direct = temperature_ratio(b, c)
        worst = max(worst, abs(r1 - r2) / abs(r2), abs(direct - r1) / abs(r1))
    return worst, "max relative spread of T_C/T_B across scales and the direct f11 slope"


def _state_pair(rng, spectrum=None):
    spectrum = spectrum or _small_spectrum(rng)
    return random_model_state(rng, spectrum), random_model_state(rng, spectrum)


def check_auxiliary_independence(rng, n, tol, quad):
    worst = 0.0
    for _ in range(n):
        a1, a2 = _state_pair(rng)
        dS = vn_entropy(a2) - vn_entropy(a1)
        scale = _calibrated_scale(rng)
        m1 = entropy_difference(a1, a2, fit_auxiliary(rng, _aux_spectrum(rng), dS), scale, quad, math.inf)
        m2 = entropy_difference(a1, a2, fit_auxiliary(rng, _aux_spectrum(rng), dS), scale, quad, math.inf)
        worst = max(worst, abs(m1.delta_S - m2.delta_S))
    return worst, "max |dS via B - dS via B'| (units k)"


def check_von_neumann(rng, n, tol, quad):
    worst = 0.0
    for i in range(n):
        a0, a1 = _state_pair(rng)
        dS = vn_entropy(a1) - vn_entropy(a0)
        b = fit_auxiliary(rng, _aux_spectrum(rng), dS)
        scale = _calibrated_scale(rng)
        if i % 2:
            m = entropy_difference(a0, a1, b, scale, quad, math.inf)
            worst = max(worst, abs(m.delta_S - dS))
        else:
            s1 = entropy_value(a1, a0, vn_entropy(a0), b, scale, quad, math.inf)
            worst = max(worst, abs(s1 - vn_entropy(a1)))
    return worst, "max |operational - von Neumann| (units k), differences and absolute values"


def _raise_entropy(rng, state: ModelState, sigma: float) -> ModelState:
    """Mix ``state`` toward uniform until its entropy rises by exactly sigma, then permute."""
    p = state.probs
    uniform = np.full(p.size, 1.0 / p.size)
    s0 = vn_entropy(state)

    def gap(lam):
        return vn_entropy(ModelState(state.spectrum, (1 - lam) * p + lam * uniform)) - s0 - sigma

    lam = brentq(gap, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    q = (1 - lam) * p + lam * uniform
    return ModelState(state.spectrum, q[rng.permutation(q.size)])


def check_nondecrease(rng, n, tol, quad):
    worst = 0.0
    for i in range(n):
        spectrum = _small_spectrum(rng)
        a1 = random_model_state(rng, spectrum)
        if i % 2 == 0:
            a2 = ModelState(spectrum, a1.probs[rng.permutation(a1.probs.size)])
            sigma = 0.0
        else:
            room = math.log(spectrum.microstate_count) - vn_entropy(a1)
            if room <= 0.1:
                a1 = ModelState.canonical(spectrum, 20.0)
                room = math.log(spectrum.microstate_count) - vn_entropy(a1)
            sigma = float(rng.uniform(0.0, min(0.1, 0.99 * room))) or 0.05
            a2 = _raise_entropy(rng, a1, sigma)
        b = fit_auxiliary(rng, _aux_spectrum(rng), sigma)
        m = entropy_difference(a1, a2, b, _calibrated_scale(rng), quad, math.inf)
        # the same process seen as a weight process for A alone leaves B untouched
        alone = simulate_standard_process(a1, a2, b, max(0.0, vn_entropy(a2) - vn_entropy(a1)))
        worst = max(worst, abs(alone.E_B_final - alone.E_B_initial))
        worst = max(worst, abs(m.delta_S) if sigma == 0 else max(0.0, sigma - m.delta_S))
    return worst, "reversible: |dS|; irreversible: max(0, sigma - dS); plus B energy drift"


def _additivity_instance(rng):
    """States of A and B plus one auxiliary state of D that can absorb both steps."""
    while True:
        sa, sb = _small_spectrum(rng, 4), _small_spectrum(rng, 4)
        a1, a2 = _state_pair(rng, sa)
        b1, b2 = _state_pair(rng, sb)
        dA = vn_entropy(a2) - vn_entropy(a1)
        dB = vn_entropy(b2) - vn_entropy(b1)
        d_spec = _aux_spectrum(rng)
        s_lo, s_hi = thermo.entropy_bounds(d_spec)
        for _ in range(50):
            d = harness_point(rng, d_spec)
            if all(s_lo + 1e-6 < d.entropy - x < s_hi - 1e-6 for x in (dA, dA + dB)):
                return a1, a2, b1, b2, d


def check_additivity(rng, n, tol, quad):
    worst = 0.0
    for _ in range(n):
        a1, a2, b1, b2, d = _additivity_instance(rng)
        m = measure_additivity(a1, a2, b1, b2, d, _calibrated_scale(rng), quad)
        worst = max(worst, abs(m.delta_S_AB - (m.delta_S_A + m.delta_S_B)))
    return worst, "max |dS_AB - (dS_A + dS_B)| through one shared auxiliary (units k)"


def check_maximum_entropy(rng, n, tol, samples: int = 1000):
    violations = 0
    min_margin = math.inf
    for _ in range(n):
        spectrum = harness_spectrum(rng)
        point = harness_point(rng, spectrum)
        canonical = thermo.canonical_probabilities(spectrum, point.beta)
        S_max = point.entropy
        draws = sample_same_energy(spectrum, point.E, samples, rng)
        for p in draws:
            nz = p[p > 0]
            S = float(-(nz @ np.log(nz)))
            if np.max(np.abs(p - canonical)) <= 1e-10:
                continue
            margin = S_max - S
            min_margin = min(min_margin, margin)
            if margin <= 0:
                violations += 1
    return violations, f"samples not strictly below the canonical entropy={violations}, min margin={min_margin:.3e}"


def check_bracketing(rng, n, tol, quad):
    worst = 0.0
    strict_failures = 0
    tl = two_level(1.0)
    for i in range(n):
        if i == 0:
            a1, a2 = ModelState.canonical(tl, 1.0), ModelState.canonical(tl, 0.5)
            bf = bb = SePoint.from_beta(harmonic(1.0, 64), 1.0)
            sf = sb = 0.01
            scale = TemperatureScale.calibrated(SePoint.from_beta(tl, 1.0))
        else:
            a1, a2 = _state_pair(rng)
            sf, sb = (float(rng.uniform(1e-4, 0.1)) for _ in range(2))
            dS = vn_entropy(a2) - vn_entropy(a1)
            bf = fit_auxiliary(rng, _aux_spectrum(rng), dS - sf)
            bb = fit_auxiliary(rng, _aux_spectrum(rng), -dS - sb)
            scale = _calibrated_scale(rng)
        dS = vn_entropy(a2) - vn_entropy(a1)
        br = irreversible_bound(a1, a2, bf, sf, bb, sb, scale, quad)
        if not br.lower < dS < br.upper:
            strict_failures += 1
        worst = max(worst, abs((dS - br.lower) - sf), abs((br.upper - dS) - sb))
    if strict_failures:
        worst = math.inf
    return worst, f"max |bracket width - sigma|; strict-inequality failures={strict_failures}"


def _closure(n_nodes, edges):
    reach = np.zeros((n_nodes, n_nodes), dtype=bool)
    for u, v in edges:
        reach[u, v] = True
    for k in range(n_nodes):
        reach |= reach[:, k : k + 1] & reach[k : k + 1, :]
    return reach


def _brute_range(g, reach, node):
    S = [g.entropy(i) for i in range(reach.shape[0])]
    if S[node] is not None:
        return S[node], S[node]
    low = max(S[u] for u in range(len(S)) if S[u] is not None and reach[u, node])
    high = min(S[v] for v in range(len(S)) if S[v] is not None and reach[node, v])
    return low, high


def check_extension(rng, n, tol, n_products: int | None = None):
    mismatches = contradictions = violations = 0
    for _ in range(n):
        g = random_accessibility_graph(rng, int(rng.integers(2, 13)), float(rng.uniform(0.1, 0.5)))
        reach = _closure(len(g.nodes), g.edges)
        for node in g.nodes:
            r = entropy_range(g, node)
            if (r.low, r.high) != _brute_range(g, reach, node):
                mismatches += 1
        for x in g.nodes:
            for y in g.nodes:
                if x == y:
                    continue
                try:
                    verdict = assert_nondecrease(g, x, y)
                except EntropometerError:
                    contradictions += 1
                    continue
                if verdict is Verdict.FORBIDDEN and reach[y, x]:
                    contradictions += 1
    for _ in range(n if n_products is None else n_products):
        ga = random_accessibility_graph(rng, int(rng.integers(2, 9)), float(rng.uniform(0.1, 0.5)))
        gb = random_accessibility_graph(rng, int(rng.integers(2, 9)), float(rng.uniform(0.1, 0.5)))
        gp = product_graph(ga, gb)
        for a in ga.nodes:
            for b in gb.nodes:
                if not check_range_additivity(ga, gb, a, b, gp).holds:
                    violations += 1
    total = mismatches + contradictions + violations
    return total, f"range mismatches={mismatches}, verdict contradictions={contradictions}, containment violations={violations}"


# --- suite ---------------------------------------------------------------


@dataclass(frozen=True)
class _Check:
    name: str
    fn: Callable
    default_n: int
    tolerance: float
    kind: str  # "f11", "quad", or "plain"


CHECKS: tuple[_Check, ...] = (
    _Check("f11_monotonicity", check_f11_monotonicity, 50, 0.0, "f11"),
    _Check("composition_identity", check_composition, 50, 1e-10, "f11"),
    _Check("shift_invariance", check_shift_invariance, 50, 1e-10, "f11"),
    _Check("derivative_consistency", check_derivative, 100, 1e-6, "plain"),
    _Check("reference_independence", check_reference_independence, 50, 1e-8, "plain"),
    _Check("auxiliary_independence", check_auxiliary_independence, 50, 1e-8, "quad"),
    _Check("von_neumann_compatibility", check_von_neumann, 100, 1e-8, "quad"),
    _Check("entropy_nondecrease", check_nondecrease, 100, 1e-10, "quad"),
    _Check("entropy_additivity", check_additivity, 50, 1e-8, "quad"),
    _Check("maximum_entropy", check_maximum_entropy, 20, 0.0, "plain"),
    _Check("irreversible_bracketing", check_bracketing, 50, 1e-8, "quad"),
    _Check("extension_ranges", check_extension, 500, 0.0, "plain"),
)
CHECK_NAMES = tuple(c.name for c in CHECKS)


def run_check(name: str, config: SuiteConfig = SuiteConfig()) -> CheckReport:
    index = CHECK_NAMES.index(name)
    check = CHECKS[index]
    rng = np.random.default_rng([config.seed, index])
    n = config.n_instances if config.n_instances is not None else check.default_n
    tol = config.tolerances.get(name, check.tolerance)
    try:
        residual, detail = _dispatch(check, rng, n, tol, config)
    except EntropometerError as exc:
        # a property violation severe enough to leave the model's domain
        residual, detail = math.inf, f"raised {type(exc).__name__}: {exc}"
    residual = float(residual)
    return CheckReport(name, n, residual, tol, residual <= tol, config.seed, detail)


def _dispatch(check: _Check, rng, n: int, tol: float, config: SuiteConfig):
    if check.kind == "f11":
        f11_fn = f11
        if config.f11_skew:
            skew = config.f11_skew

            def f11_fn(b, c, E, _skew=skew):
                return f11(b, c, E) + _skew

        return check.fn(rng, n, tol, f11_fn)
    if check.kind == "quad":
        quad = QuadratureConfig(tol=config.tolerances.get("quadrature", QuadratureConfig().tol))
        return check.fn(rng, n, tol, quad)
    return check.fn(rng, n, tol)


def run_suite(config: SuiteConfig = SuiteConfig()) -> list[CheckReport]:
    names = CHECK_NAMES if config.checks is None else config.checks
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise EntropometerError(f"unknown check(s): {', '.join(unknown)}")
    if config.n_instances is not None and config.n_instances < 1:
        raise EntropometerError("n_instances must be >= 1")
    return [run_check(name, config) for name in names]


def report_json(reports: list[CheckReport]) -> str:
    def clean(r):
        d = asdict(r)
        if not math.isfinite(d["max_residual"]):
            d["max_residual"] = str(d["max_residual"])
        return d

    body = {"all_passed": all(r.passed for r in reports), "checks": [clean(r) for r in reports]}
    return json.dumps(body, indent=2, sort_keys=True) + "\n"
