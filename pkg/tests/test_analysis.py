import numpy as np
import pytest

from spinent.analysis import (
    EdgeExtremumError,
    SweepRow,
    extrapolate,
    finite_difference,
    locate_extremum,
    size_label,
    sweep,
)
from spinent.basis import build_basis
from spinent.eigensolver import ground_state_scan
from spinent.hamiltonian import model_for
from spinent.lattice import chain_lattice


def test_sweep_rows_carry_the_full_measurement_set():
    table = sweep("xxz_half", "chain", [4], (0.0, 1.0, 3))
    assert len(table.rows) == 3
    params = [row.param for row in table.rows]
    np.testing.assert_allclose(params, [0.0, 0.5, 1.0])
    for row in table.rows:
        assert row.family == "xxz_half"
        assert row.geometry == "chain"
        assert row.size == "4"
        assert row.error is None
        assert row.energy is not None
        assert row.czz is not None and row.cxx is not None
        assert row.ev is not None and row.ev >= 0.0
        assert row.concurrence is not None
        assert isinstance(row.degeneracy, int)
        assert row.degenerate_flag == (row.degeneracy > 1)
    report = ground_state_scan(model_for("xxz_half", 0.5), chain_lattice(4))
    np.testing.assert_allclose(table.rows[1].energy, report.ground_energy, atol=1e-12)


def test_ferromagnetic_rows_flag_their_degeneracy():
    table = sweep("xxz_half", "chain", [8], (-2.0, -1.5, 2))
    for row in table.rows:
        assert row.degeneracy == 2
        assert row.degenerate_flag is True


def test_spin_one_rows_have_no_concurrence():
    table = sweep("xxz_one", "chain", [4], (0.5, 1.5, 2))
    for row in table.rows:
        assert row.error is None
        assert row.concurrence is None
        assert row.ev is not None


def test_parallel_sweep_matches_serial():
    serial = sweep("xxz_half", "chain", [4, 6], (0.0, 1.0, 3), jobs=1)
    parallel = sweep("xxz_half", "chain", [4, 6], (0.0, 1.0, 3), jobs=2)
    assert serial.rows == parallel.rows


def test_failed_points_annotate_rows_instead_of_aborting():
    # 25 spin-1/2 sites exceed the packed-register budget
    table = sweep("xxz_half", "chain", [25], (0.0, 1.0, 2))
    assert len(table.rows) == 2
    for row in table.rows:
        assert row.error is not None
        assert row.energy is None
    assert table.series("25", "energy") == []


def test_unknown_geometry_annotates_rows():
    table = sweep("xxz_half", "hexagonal", [4], (0.0, 1.0, 2))
    assert all("hexagonal" in row.error for row in table.rows)


def test_sweep_input_validation():
    with pytest.raises(ValueError):
        sweep("heisenberg_cubed", "chain", [4], (0.0, 1.0, 2))
    with pytest.raises(ValueError):
        sweep("xxz_half", "chain", [4], (0.0, 1.0, 1))
    with pytest.raises(ValueError):
        sweep("xxz_half", "chain", [4], (1.0, 0.0, 3))


def test_series_selects_one_size_and_column():
    table = sweep("xxz_half", "chain", [4, 6], (0.0, 1.0, 3))
    energies = table.series("6", "energy")
    assert len(energies) == 3
    assert [p for p, _ in energies] == [0.0, 0.5, 1.0]
    assert all(isinstance(v, float) for _, v in energies)


def test_ising_limit_entropy_saturates_at_one_bit():
    table = sweep("xxz_half", "chain", [8], (100.0, 101.0, 2))
    for row in table.rows:
        assert abs(row.ev - 1.0) < 0.02


def test_pair_entropy_is_continuous_across_the_isotropic_point():
    table = sweep("xxz_half", "chain", [8], (0.9, 1.1, 5))
    series = table.series("8", "ev")
    jumps = [abs(b[1] - a[1]) for a, b in zip(series, series[1:])]
    assert max(jumps) < 1e-3


def test_sweep_energies_obey_the_anisotropy_slope_bound():
    n = 8
    table = sweep("xxz_half", "chain", [n], (0.0, 1.0, 11))
    energies = [v for _, v in table.series("8", "energy")]
    for gap in np.diff(energies):
        assert abs(gap) <= n * 0.1 / 4.0 + 1e-9


def test_entropy_peak_sits_at_the_isotropic_point():
    table = sweep("xxz_half", "chain", [12], (0.8, 1.2, 9))
    x_star, y_star = locate_extremum(table.series("12", "ev"), "max")
    assert abs(x_star - 1.0) <= 0.05
    assert y_star >= max(v for _, v in table.series("12", "ev"))


def test_spin_one_entropy_slope_has_an_interior_minimum():
    table = sweep("xxz_one", "chain", [8], (1.0, 2.0, 11))
    slope = finite_difference(table.series("8", "ev"))
    x_star, _ = locate_extremum(slope, "min")
    assert 1.0 < x_star < 2.0


def test_finite_difference_is_exact_on_a_parabola():
    xs = np.linspace(-1.0, 2.0, 7)
    series = [(float(x), float(x * x)) for x in xs]
    derivative = finite_difference(series)
    for (x, d) in derivative:
        np.testing.assert_allclose(d, 2.0 * x, atol=1e-12)


def test_finite_difference_of_a_constant_vanishes():
    series = [(float(x), 4.2) for x in np.linspace(0, 1, 5)]
    assert all(abs(d) < 1e-12 for _, d in finite_difference(series))


def test_finite_difference_input_validation():
    good = [(0.0, 0.0), (0.1, 1.0), (0.2, 2.0)]
    with pytest.raises(ValueError):
        finite_difference(good, order=2)
    with pytest.raises(ValueError):
        finite_difference(good[:2])
    with pytest.raises(ValueError):
        finite_difference([(0.0, 0.0), (0.1, 1.0), (0.35, 2.0)])


def test_locate_extremum_recovers_a_parabola_vertex():
    xs = np.linspace(-1.0, 1.0, 9)
    series = [(float(x), float((x - 0.3) ** 2)) for x in xs]
    x_star, y_star = locate_extremum(series, "min")
    np.testing.assert_allclose(x_star, 0.3, atol=1e-12)
    np.testing.assert_allclose(y_star, 0.0, atol=1e-12)
    flipped = [(x, -y) for x, y in series]
    x_star, y_star = locate_extremum(flipped, "max")
    np.testing.assert_allclose(x_star, 0.3, atol=1e-12)


def test_locate_extremum_rejects_boundary_hits():
    series = [(float(x), float(x)) for x in np.linspace(0, 1, 5)]
    with pytest.raises(EdgeExtremumError):
        locate_extremum(series, "max")
    with pytest.raises(EdgeExtremumError):
        locate_extremum(series, "min")


def test_locate_extremum_input_validation():
    series = [(0.0, 1.0), (0.5, 0.0), (1.0, 1.0)]
    with pytest.raises(ValueError):
        locate_extremum(series, "saddle")
    with pytest.raises(ValueError):
        locate_extremum(series[:2], "min")


def test_extrapolation_recovers_exact_scaling_laws():
    sizes = [8, 12, 16, 20]
    linear = [(s, -0.4 + 2.0 / s) for s in sizes]
    fit = extrapolate(linear, "inverse_L")
    np.testing.assert_allclose(fit.extrapolated_value, -0.4, atol=1e-12)
    np.testing.assert_allclose(fit.coefficients, (-0.4, 2.0), atol=1e-12)
    assert fit.residual_norm < 1e-12

    quadratic = [(s, 1.5 - 3.0 / s**2) for s in sizes]
    fit = extrapolate(quadratic, "inverse_L_squared")
    np.testing.assert_allclose(fit.extrapolated_value, 1.5, atol=1e-12)
    assert fit.form == "inverse_L_squared"


def test_extrapolation_of_a_constant_is_flat():
    fit = extrapolate([(8, 0.25), (12, 0.25), (16, 0.25)], "inverse_L")
    np.testing.assert_allclose(fit.extrapolated_value, 0.25, atol=1e-14)
    np.testing.assert_allclose(fit.coefficients[1], 0.0, atol=1e-12)


def test_extrapolation_input_validation():
    points = [(8, 1.0), (12, 2.0), (16, 3.0)]
    with pytest.raises(ValueError):
        extrapolate(points, "logarithmic")
    with pytest.raises(ValueError):
        extrapolate(points[:2], "inverse_L")
    with pytest.raises(ValueError):
        extrapolate([(0, 1.0), (12, 2.0), (16, 3.0)], "inverse_L")


def test_size_labels():
    assert size_label("square", 4) == "4x4"
    assert size_label("chain", 12) == "12"
