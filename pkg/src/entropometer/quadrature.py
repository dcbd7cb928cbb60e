"""Adaptive Simpson quadrature, refined breadth-first so the integrand is
evaluated on whole batches of new nodes at once."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureError


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-10
    max_subdivisions: int = 100_000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"quadrature tolerance must be positive, got {self.tol}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    subdivisions: int
    evaluations: int


def _simpson(h, fa, fm, fb):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray], a: float, b: float, config: QuadratureConfig = QuadratureConfig()
) -> QuadratureResult:
    """Integrate a vectorized ``f`` over [a, b] to absolute tolerance ``config.tol``.

    An interval is accepted when the two-panel and one-panel Simpson values
    differ by at most ``15 * tol * width / (b - a)``; the accepted value carries
    the Richardson correction.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, 0)
    if b < a:
        r = adaptive_simpson(f, b, a, config)
        return QuadratureResult(-r.value, r.error_estimate, r.subdivisions, r.evaluations)
    length = b - a
    lo = np.array([a])
    hi = np.array([b])
    mid = 0.5 * (lo + hi)
    fx = np.asarray(f(np.array([a, mid[0], b])), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand returned a non-finite value")
    fa, fm, fb = fx[0:1], fx[1:2], fx[2:3]
    whole = _simpson(hi - lo, fa, fm, fb)
    n_eval = 3
    total = 0.0
    err = 0.0
    subdivisions = 0
    while lo.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        fnew = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        n_eval += fnew.size
        if not np.all(np.isfinite(fnew)):
            raise QuadratureError("integrand returned a non-finite value")
        flm, frm = fnew[: lo.size], fnew[lo.size :]
        left = _simpson(mid - lo, fa, flm, fm)
        right = _simpson(hi - mid, fm, frm, fb)
        delta = left + right - whole
        ok = np.abs(delta) <= 15.0 * config.tol * (hi - lo) / length
        total += float(np.sum((left + right + delta / 15.0)[ok]))
        err += float(np.sum(np.abs(delta[ok]))) / 15.0
        keep = ~ok
        if not keep.any():
            break
        subdivisions += int(keep.sum())
        if subdivisions > config.max_subdivisions:
            raise QuadratureError(
                f"no convergence to tol={config.tol} within {config.max_subdivisions} subdivisions"
            )
        l0, m0, h0 = lo[keep], mid[keep], hi[keep]
        if np.any((lm[keep] <= l0) | (rm[keep] >= h0)):
            raise QuadratureError("interval width underflow before reaching tolerance")
        lo = np.concatenate([l0, m0])
        hi = np.concatenate([m0, h0])
        mid = np.concatenate([lm[keep], rm[keep]])
        fa = np.concatenate([fa[keep], fm[keep]])
        fb = np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
    return QuadratureResult(total, err, subdivisions, n_eval)
