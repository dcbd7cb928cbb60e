"""Run-wide settings shared by the command line and the scripts."""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .entropy import CROSS_CHECK_TOL
from .errors import EntropometerError
from .quadrature import QuadratureConfig

TOL_ENV = "ENTROPOMETER_TOL"
_TOL_KEYS = ("quad", "check")


@dataclass(frozen=True)
class GlobalConfig:
    kB: float = 1.0
    quad_tol: float = QuadratureConfig().tol
    check_tol: float = CROSS_CHECK_TOL
    output_format: str = "csv"
    seed: int = 1

    def __post_init__(self):
        if not self.kB > 0:
            raise EntropometerError(f"kB must be > 0, got {self.kB}")
        for key in ("quad_tol", "check_tol"):
            if not getattr(self, key) > 0:
                raise EntropometerError(f"{key} must be > 0, got {getattr(self, key)}")
        if self.output_format not in ("csv", "json"):
            raise EntropometerError(f"output format must be csv or json, got {self.output_format!r}")

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(tol=self.quad_tol)

    def with_env(self, environ=None) -> "GlobalConfig":
        """Apply ``ENTROPOMETER_TOL``: a bare number sets the quadrature
        tolerance; ``quad=1e-12,check=1e-9`` sets them by name."""
        raw = (os.environ if environ is None else environ).get(TOL_ENV, "").strip()
        if not raw:
            return self
        return replace(self, **parse_tolerances(raw))


def _number(raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise EntropometerError(f"{TOL_ENV}: {raw.strip()!r} is not a number") from None


def parse_tolerances(raw: str) -> dict[str, float]:
    if "=" not in raw:
        return {"quad_tol": _number(raw)}
    out = {}
    for item in raw.split(","):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in _TOL_KEYS:
            raise EntropometerError(f"{TOL_ENV}: unknown key {key!r} (expected one of {', '.join(_TOL_KEYS)})")
        out[f"{key}_tol"] = _number(value)
    return out
