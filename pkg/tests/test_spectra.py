import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropometer.errors import SpectrumError
from entropometer.spectra import (
    EnergySpectrum,
    SpectrumLibrary,
    builtin,
    compose,
    harmonic,
    load_spectrum,
    random_spectrum,
    save_spectrum,
    two_level,
)


def write(tmp_path, levels, name="TL"):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps({"name": name, "levels": [{"energy": e, "degeneracy": g} for e, g in levels]}))
    return path


def test_load_two_level(tmp_path):
    s = load_spectrum(write(tmp_path, [(0, 1), (1, 1)]))
    assert s.name == "TL"
    assert s.levels == [(0.0, 1), (1.0, 1)]


def test_load_sorts_levels(tmp_path):
    assert load_spectrum(write(tmp_path, [(1, 1), (0, 1)])).levels == [(0.0, 1), (1.0, 1)]


def test_load_merges_equal_energies(tmp_path):
    assert load_spectrum(write(tmp_path, [(0, 1), (0, 2), (1, 1)])).levels == [(0.0, 3), (1.0, 1)]


def test_merge_tolerance():
    s = EnergySpectrum.from_levels([(1.0, 1), (1.0 + 1e-14, 2), (2.0, 1)])
    assert s.levels == [(1.0, 3), (2.0, 1)]
    assert EnergySpectrum.from_levels([(1.0, 1), (1.0 + 1e-9, 1)]).n_levels == 2


@pytest.mark.parametrize(
    "levels",
    [
        [(0, 1)],
        [(0, 1), (0, 1)],
        [(0, 1), (float("nan"), 1)],
        [(0, 1), (float("inf"), 1)],
        [(0, 0), (1, 1)],
        [(0, 1), (1, 1.5)],
    ],
)
def test_invalid_levels_rejected(tmp_path, levels):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"levels": [{"energy": e, "degeneracy": g} for e, g in levels]}))
    with pytest.raises(SpectrumError):
        load_spectrum(path)


def test_unparseable_and_missing_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpectrumError, match="cannot parse"):
        load_spectrum(bad)
    with pytest.raises(SpectrumError, match="not found"):
        load_spectrum(tmp_path / "missing.json")
    bad.write_text(json.dumps({"name": "x"}))
    with pytest.raises(SpectrumError, match="malformed"):
        load_spectrum(bad)


def test_save_round_trip(tmp_path):
    s = random_spectrum(3, 9, 0, 5, max_degeneracy=3)
    save_spectrum(s, tmp_path / "s.json")
    assert load_spectrum(tmp_path / "s.json") == s


def test_compose_two_level_squared():
    assert compose(two_level(1), two_level(1)).levels == [(0.0, 1), (1.0, 2), (2.0, 1)]


def test_compose_with_shifted_gap():
    other = EnergySpectrum.from_levels([(0, 1), (2, 1)])
    assert compose(two_level(1), other).levels == [(0.0, 1), (1.0, 1), (2.0, 1), (3.0, 1)]


def test_single_level_spectrum_cannot_exist():
    with pytest.raises(SpectrumError, match="at least 2"):
        EnergySpectrum.from_levels([(3.0, 1)])


def test_compose_cap():
    with pytest.raises(SpectrumError, match="cap"):
        compose(harmonic(1, 100), harmonic(1, 100), cap=9_999)


def test_builtins():
    assert two_level(1).levels == [(0.0, 1), (1.0, 1)]
    assert harmonic(1, 3).levels == [(0.0, 1), (1.0, 1), (2.0, 1)]
    assert random_spectrum(7, 5, 0, 10) == random_spectrum(7, 5, 0, 10)
    assert random_spectrum(7, 5, 0, 10) != random_spectrum(8, 5, 0, 10)
    assert builtin("harmonic(1, 3)") == harmonic(1, 3)
    assert builtin("random(7,5,0,10)") == random_spectrum(7, 5, 0, 10)
    assert builtin("two_level(2)").energies == (0.0, 2.0)


@pytest.mark.parametrize("token", ["harmonic(1)", "harmonic(-1,3)", "two_level(0)", "random(1,1)", "cubic(2)"])
def test_builtin_errors(token):
    with pytest.raises(SpectrumError):
        builtin(token)


def test_library_resolution(tmp_path):
    write(tmp_path, [(0, 1), (2, 1)], name="wide")
    lib = SpectrumLibrary()
    lib.load_dir(tmp_path)
    assert "wide" in lib and len(lib) == 1
    assert lib.resolve("wide").energies == (0.0, 2.0)
    assert lib.resolve("harmonic(1,3)").n_levels == 3
    assert lib.resolve(str(tmp_path / "wide.json")) == lib["wide"]
    with pytest.raises(SpectrumError, match="duplicate"):
        lib.add(lib["wide"])


def test_cached_arrays_read_only():
    s = random_spectrum(1, 6, max_degeneracy=3)
    assert s.microstate_energies.size == s.microstate_count
    with pytest.raises(ValueError):
        s.energy_array[0] = 5.0


def test_shift():
    s = harmonic(1, 4).shifted(2.5)
    assert s.energies == (2.5, 3.5, 4.5, 5.5)
    assert s.ground_energy == 2.5


levels_st = st.lists(
    st.tuples(st.integers(0, 40).map(lambda k: k * 0.25), st.integers(1, 3)), min_size=2, max_size=6
).filter(lambda ls: len({e for e, _ in ls}) >= 2)


@given(levels_st, levels_st)
def test_compose_commutative(la, lb):
    a, b = EnergySpectrum.from_levels(la), EnergySpectrum.from_levels(lb)
    assert compose(a, b).levels == compose(b, a).levels
    assert compose(a, b).microstate_count == a.microstate_count * b.microstate_count


@given(levels_st, levels_st, levels_st)
def test_compose_associative(la, lb, lc):
    a, b, c = (EnergySpectrum.from_levels(x) for x in (la, lb, lc))
    left, right = compose(compose(a, b), c), compose(a, compose(b, c))
    assert left.degeneracies == right.degeneracies
    np.testing.assert_allclose(left.energies, right.energies, rtol=0, atol=1e-12)
