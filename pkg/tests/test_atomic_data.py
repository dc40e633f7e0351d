import math

import numpy as np
import pytest

from sit_squeeze.core.constants import VAPOR_PRESSURE_RANGE
from sit_squeeze.errors import DataFileError
from sit_squeeze.physics.atomic_data import (
    DATA_FILE,
    MAIN_MANIFOLD,
    NATURAL_ABUNDANCE,
    GasSample,
    isotope_densities,
    load_transition_table,
    mercury_isotope_table,
    number_density,
    select_isotopes,
    vapor_pressure_hg,
)


def _by_mass(table):
    return {iso.mass_number: iso for iso in table}


def test_raw_abundances_match_natural_table():
    assert NATURAL_ABUNDANCE[202] == 0.2980
    assert math.fsum(NATURAL_ABUNDANCE.values()) == pytest.approx(1.0001)


def test_abundances_are_renormalized():
    table = mercury_isotope_table()
    assert len(table) == 7
    assert math.fsum(iso.abundance for iso in table) == pytest.approx(1.0, abs=1e-12)
    assert _by_mass(table)[202].abundance == pytest.approx(0.2980 / 1.0001)


def test_fermions_have_half_integer_spin():
    isotopes = _by_mass(mercury_isotope_table())
    assert isotopes[199].nuclear_spin == 0.5
    assert isotopes[201].nuclear_spin == 1.5
    assert all(isotopes[a].is_boson for a in (196, 198, 200, 202, 204))


def test_bosons_carry_main_and_side_line():
    for iso in mercury_isotope_table():
        manifolds = {t.manifold for t in iso.transitions}
        assert MAIN_MANIFOLD in manifolds
        if iso.is_boson:
            assert len(iso.transitions) == 2


def test_strengths_sum_to_one_per_manifold():
    for iso in mercury_isotope_table():
        sums = {}
        for t in iso.transitions:
            sums[t.manifold] = sums.get(t.manifold, 0.0) + t.relative_strength
        assert all(s == pytest.approx(1.0, abs=1e-3) for s in sums.values())


@pytest.mark.parametrize("temperature, pressure", [(273.0, 0.272), (293.0, 0.889)])
def test_vapor_pressure_fit_points(temperature, pressure):
    assert vapor_pressure_hg(temperature) == pytest.approx(pressure, rel=1e-9)


def test_vapor_pressure_at_303_k():
    assert vapor_pressure_hg(303.0) == pytest.approx(1.57, abs=0.15)


def test_vapor_pressure_outside_fit_range():
    with pytest.raises(ValueError):
        vapor_pressure_hg(400.0)


@pytest.mark.parametrize("pressure, temperature, expected", [
    (0.0, 293.0, 0.0),
    (0.272, 273.0, 7.22e19),
    (0.889, 293.0, 2.20e20),
])
def test_number_density(pressure, temperature, expected):
    assert number_density(pressure, temperature) == pytest.approx(expected, rel=2e-3, abs=1.0)


@pytest.mark.parametrize("temperature", [250.0, 273.0, 303.0])
@pytest.mark.parametrize("pressure", [0.01, 0.272, 1.5])
def test_number_density_is_linear_in_pressure(temperature, pressure):
    base = number_density(pressure, temperature)
    assert number_density(2.0 * pressure, temperature) == pytest.approx(2.0 * base, rel=1e-12)
    assert number_density(0.5 * pressure, temperature) == pytest.approx(0.5 * base, rel=1e-12)


def test_vapor_pressure_rises_across_fit_range():
    lo, hi = VAPOR_PRESSURE_RANGE
    pressures = np.array([vapor_pressure_hg(t) for t in np.linspace(lo, hi, 71)])
    assert np.all(pressures > 0)
    assert np.all(np.diff(pressures) > 0)


def test_number_density_rejects_non_positive_temperature():
    with pytest.raises(ValueError):
        number_density(1.0, 0.0)


def test_isotope_densities_single_and_full():
    single = select_isotopes(mercury_isotope_table(), "202-only")
    sample = GasSample.from_conditions(273.0, single, pressure=0.272)
    assert isotope_densities(sample) == pytest.approx([7.22e19], rel=2e-3)

    table = tuple(mercury_isotope_table())
    unit = GasSample(temperature=273.0, pressure=0.0, total_density=1.0, isotopes=table)
    assert isotope_densities(unit) == pytest.approx([iso.abundance for iso in table])

    full = GasSample.from_conditions(273.0, table, pressure=0.272)
    rho = dict(zip((iso.mass_number for iso in table), isotope_densities(full)))
    assert rho[202] == pytest.approx(2.15e19, rel=2e-3)


def test_atom_number_override():
    isotopes = select_isotopes(mercury_isotope_table(), "202-only")
    sample = GasSample.from_conditions(273.0, isotopes, atom_number_total=1e9, volume=1e-12)
    assert sample.total_density == pytest.approx(1e21)
    assert sample.ideal_gas_density == pytest.approx(number_density(0.272, 273.0))
    with pytest.raises(ValueError):
        GasSample.from_conditions(273.0, isotopes, atom_number_total=1e9)


def test_select_isotopes_modes():
    table = mercury_isotope_table()
    only = select_isotopes(table, "202-only")
    assert [iso.mass_number for iso in only] == [202]
    assert only[0].abundance == 1.0
    assert len(select_isotopes(table, "all")) == 7
    main = select_isotopes(table, "all", lines="main")
    assert all(t.manifold == MAIN_MANIFOLD for iso in main for t in iso.transitions)
    with pytest.raises(ValueError):
        select_isotopes(table, "odd-only")


def test_side_line_wavelength_is_green():
    iso = select_isotopes(mercury_isotope_table(), "202-only")[0]
    side = [t for t in iso.transitions if t.manifold != MAIN_MANIFOLD][0]
    assert side.wavelength() == pytest.approx(546.1e-9, rel=2e-3)


def test_source_coupling_formula():
    iso = select_isotopes(mercury_isotope_table(), "202-only", lines="main")[0]
    t = iso.transitions[0]
    expected = 3.0 * (365.5e-9) ** 2 * t.gamma0 / (4.0 * math.pi)
    assert t.source_coupling() == pytest.approx(expected)


def _write_table(tmp_path, extra):
    path = tmp_path / "lines.txt"
    path.write_text(DATA_FILE.read_text() + extra)
    return path


def test_malformed_record_names_line(tmp_path):
    path = _write_table(tmp_path, "\n202, 6_3D3-6_3P2, zero, 20.69, 1.0\n")
    n_lines = len(path.read_text().splitlines())
    with pytest.raises(DataFileError) as info:
        load_transition_table(path)
    assert info.value.line == n_lines
    assert "zero" in str(info.value)


def test_wrong_column_count(tmp_path):
    path = tmp_path / "lines.txt"
    path.write_text("202, 6_3D3-6_3P2, 0.0\n")
    with pytest.raises(DataFileError, match="5 columns"):
        load_transition_table(path)


def test_missing_data_file(tmp_path):
    with pytest.raises(DataFileError):
        mercury_isotope_table(tmp_path / "nope.txt")
