"""Discrete energy spectra: validation, composition, builtins and JSON I/O."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import SpectrumError

MICROSTATE_CAP = 10**6
MERGE_RTOL = 1e-12


def _merge_levels(pairs: Iterable[tuple[float, int]]) -> tuple[tuple[float, ...], tuple[int, ...]]:
    pairs = sorted((float(e), int(g)) for e, g in pairs)
    energies: list[float] = []
    degeneracies: list[int] = []
    for e, g in pairs:
        if energies and abs(e - energies[-1]) <= MERGE_RTOL * max(1.0, abs(energies[-1])):
            degeneracies[-1] += g
        else:
            energies.append(e)
            degeneracies.append(g)
    return tuple(energies), tuple(degeneracies)


@dataclass(frozen=True)
class EnergySpectrum:
    """Energy eigenvalues of a closed system with their degeneracies.

    Construct through :meth:`from_levels` to get sorting and merging of
    near-equal energies; the raw constructor only validates.
    """

    name: str
    energies: tuple[float, ...]
    degeneracies: tuple[int, ...]

    def __post_init__(self):
        if len(self.energies) != len(self.degeneracies):
            raise SpectrumError("energies and degeneracies differ in length")
        if len(self.energies) < 2:
            raise SpectrumError(f"spectrum {self.name!r} needs at least 2 distinct levels, got {len(self.energies)}")
        for e in self.energies:
            if not math.isfinite(e):
                raise SpectrumError(f"spectrum {self.name!r} has non-finite energy {e}")
        for g in self.degeneracies:
            if int(g) != g or g < 1:
                raise SpectrumError(f"spectrum {self.name!r} has degeneracy {g} < 1")
        if any(b <= a for a, b in zip(self.energies, self.energies[1:])):
            raise SpectrumError(f"spectrum {self.name!r} energies are not strictly increasing")

    def __repr__(self) -> str:
        return f"EnergySpectrum({self.name!r}, levels={self.n_levels}, microstates={self.microstate_count})"

    @classmethod
    def from_levels(cls, levels: Iterable[tuple[float, int]], name: str = "") -> "EnergySpectrum":
        levels = list(levels)
        for e, g in levels:
            if not math.isfinite(float(e)):
                raise SpectrumError(f"non-finite energy {e}")
            if int(g) != g or g < 1:
                raise SpectrumError(f"degeneracy {g} < 1")
        energies, degeneracies = _merge_levels(levels)
        return cls(name, energies, degeneracies)

    @property
    def levels(self) -> list[tuple[float, int]]:
        return list(zip(self.energies, self.degeneracies))

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    @property
    def microstate_count(self) -> int:
        return sum(self.degeneracies)

    @property
    def ground_energy(self) -> float:
        return self.energies[0]

    @cached_property
    def energy_array(self) -> np.ndarray:
        a = np.array(self.energies, dtype=float)
        a.flags.writeable = False
        return a

    @cached_property
    def degeneracy_array(self) -> np.ndarray:
        a = np.array(self.degeneracies, dtype=float)
        a.flags.writeable = False
        return a

    @cached_property
    def excitations(self) -> np.ndarray:
        """Level energies measured from the ground level (exact zero first)."""
        a = self.energy_array - self.energy_array[0]
        a.flags.writeable = False
        return a

    @cached_property
    def microstate_energies(self) -> np.ndarray:
        """Energies repeated by degeneracy, in increasing order."""
        a = np.repeat(self.energy_array, self.degeneracies)
        a.flags.writeable = False
        return a

    def shifted(self, c: float) -> "EnergySpectrum":
        return EnergySpectrum.from_levels(((e + c, g) for e, g in self.levels), name=self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "levels": [{"energy": e, "degeneracy": g} for e, g in self.levels],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnergySpectrum":
        try:
            name = str(data.get("name", ""))
            raw = data["levels"]
            levels = [(float(item["energy"]), item["degeneracy"]) for item in raw]
        except (KeyError, TypeError, ValueError) as exc:
            raise SpectrumError(f"malformed spectrum data: {exc}") from exc
        for _, g in levels:
            if isinstance(g, bool) or not isinstance(g, (int, float)) or int(g) != g:
                raise SpectrumError(f"degeneracy must be an integer, got {g!r}")
        return cls.from_levels(((e, int(g)) for e, g in levels), name=name)


def load_spectrum(path: str | Path) -> EnergySpectrum:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise SpectrumError(f"spectrum file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SpectrumError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SpectrumError(f"{path}: top-level JSON value must be an object")
    return EnergySpectrum.from_dict(data)


def save_spectrum(spectrum: EnergySpectrum, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spectrum.to_dict(), indent=2) + "\n")


def compose(a: EnergySpectrum, b: EnergySpectrum, cap: int = MICROSTATE_CAP) -> EnergySpectrum:
    """Spectrum of the composite of two non-interacting systems."""
    count = a.microstate_count * b.microstate_count
    if count > cap:
        raise SpectrumError(f"composite has {count} microstates, above the cap of {cap}")
    pairs = [(ea + eb, ga * gb) for ea, ga in a.levels for eb, gb in b.levels]
    name = f"{a.name}*{b.name}" if a.name or b.name else ""
    return EnergySpectrum.from_levels(pairs, name=name)


def two_level(gap: float = 1.0) -> EnergySpectrum:
    if not gap > 0:
        raise SpectrumError(f"two_level gap must be positive, got {gap}")
    return EnergySpectrum.from_levels([(0.0, 1), (float(gap), 1)], name=f"two_level({gap:g})")


def harmonic(omega: float, n: int) -> EnergySpectrum:
    """Truncated oscillator: levels k*omega for k = 0..n-1."""
    if not omega > 0:
        raise SpectrumError(f"harmonic spacing must be positive, got {omega}")
    if int(n) != n or n < 2:
        raise SpectrumError(f"harmonic needs n >= 2 levels, got {n}")
    return EnergySpectrum.from_levels(((k * float(omega), 1) for k in range(int(n))), name=f"harmonic({omega:g},{n})")


def random_spectrum(
    seed: int, n: int, low: float = 0.0, high: float = 10.0, max_degeneracy: int = 1
) -> EnergySpectrum:
    """n energies drawn uniformly from [low, high]; degeneracies uniform in 1..max_degeneracy."""
    if int(n) != n or n < 2:
        raise SpectrumError(f"random spectrum needs n >= 2 levels, got {n}")
    if not high > low:
        raise SpectrumError(f"empty energy range [{low}, {high}]")
    if max_degeneracy < 1:
        raise SpectrumError(f"max_degeneracy must be >= 1, got {max_degeneracy}")
    rng = np.random.default_rng(seed)
    energies = rng.uniform(low, high, size=int(n))
    degeneracies = rng.integers(1, max_degeneracy + 1, size=int(n))
    spectrum = EnergySpectrum.from_levels(zip(energies.tolist(), degeneracies.tolist()), name=f"random({seed},{n})")
    if spectrum.n_levels < 2:
        raise SpectrumError("random draw collapsed to fewer than 2 levels")
    return spectrum


_BUILTIN_RE = re.compile(r"^\s*(two_level|harmonic|random)\s*\(([^)]*)\)\s*$")


def builtin(token: str) -> EnergySpectrum:
    """Parse ``two_level(gap)``, ``harmonic(omega,n)`` or ``random(seed,n,low,high)``."""
    m = _BUILTIN_RE.match(token)
    if not m:
        raise SpectrumError(f"not a builtin spectrum expression: {token!r}")
    kind = m.group(1)
    args = [a.strip() for a in m.group(2).split(",") if a.strip()]
    try:
        if kind == "two_level":
            return two_level(*(float(a) for a in args))
        if kind == "harmonic":
            omega, n = args
            return harmonic(float(omega), int(n))
        seed, n, *rest = args
        return random_spectrum(int(seed), int(n), *(float(a) for a in rest))
    except (TypeError, ValueError) as exc:
        raise SpectrumError(f"bad arguments for {kind}: {exc}") from exc


class SpectrumLibrary:
    """Name-unique collection of spectra, resolvable from names, files or builtins."""

    def __init__(self, spectra: Iterable[EnergySpectrum] = ()):
        self._items: dict[str, EnergySpectrum] = {}
        for s in spectra:
            self.add(s)

    def add(self, spectrum: EnergySpectrum) -> None:
        if not spectrum.name:
            raise SpectrumError("library entries need a name")
        if spectrum.name in self._items:
            raise SpectrumError(f"duplicate spectrum name {spectrum.name!r}")
        self._items[spectrum.name] = spectrum

    def load_dir(self, directory: str | Path) -> None:
        for path in sorted(Path(directory).glob("*.json")):
            self.add(load_spectrum(path))

    def resolve(self, token: str) -> EnergySpectrum:
        if token in self._items:
            return self._items[token]
        if _BUILTIN_RE.match(token):
            return builtin(token)
        return load_spectrum(token)

    def __getitem__(self, name: str) -> EnergySpectrum:
        return self._items[name]

    def __contains__(self, name: object) -> bool:
        return name in self._items

    def __iter__(self) -> Iterator[str]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)
