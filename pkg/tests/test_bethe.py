import math

import numpy as np
import pytest

from oracles import full_hamiltonian, ground_full
from spinent.basis import build_basis
from spinent.bethe import UnsupportedRegimeError, hf_correlators, solve_ground, xx_oracle
from spinent.entanglement import bond_correlators
from spinent.hamiltonian import assemble, model_for
from spinent.lattice import chain_lattice


def _dense_ground(n, delta):
    basis = build_basis(n, "half", 0.0)
    ham = assemble(model_for("xxz_half", delta), chain_lattice(n), basis)
    vals, vecs = np.linalg.eigh(ham.matrix.toarray())
    return basis, float(vals[0]), vecs[:, 0]


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("delta", [-0.9, -0.5, 0.0, 0.5, 0.9, 1.0])
def test_energy_calibration_against_brute_force(n, delta):
    """The energy convention is pinned by dense diagonalization."""
    reference, _ = ground_full(
        full_hamiltonian("xxz_half", n, chain_lattice(n).bonds, delta=delta)
    )
    state = solve_ground(n, delta)
    assert abs(state.energy - reference) <= 1e-8
    assert state.converged
    assert state.max_equation_residual <= 1e-10


@pytest.mark.parametrize("delta", [-0.5, 0.5, 1.0])
def test_twelve_site_energies(delta):
    _, reference, _ = _dense_ground(12, delta)
    assert abs(solve_ground(12, delta).energy - reference) <= 1e-8


def test_free_fermion_point_is_exact():
    np.testing.assert_allclose(solve_ground(4, 0.0).energy, -math.sqrt(2.0), atol=1e-12)


def test_isotropic_four_ring():
    np.testing.assert_allclose(solve_ground(4, 1.0).energy, -2.0, atol=1e-10)


def test_state_bookkeeping():
    state = solve_ground(10, 0.3)
    assert state.num_sites == 10
    assert state.num_down == 5
    np.testing.assert_allclose(state.gamma, math.acos(0.3) / 2.0, atol=1e-15)
    assert len(state.rapidities) == 5
    assert len(state.quantum_numbers) == 5
    np.testing.assert_allclose(sorted(state.quantum_numbers), [-2, -1, 0, 1, 2])


def test_ground_state_rapidities_come_in_opposite_pairs():
    lam = np.sort(solve_ground(12, 0.5).rapidities)
    np.testing.assert_allclose(lam, -lam[::-1], atol=1e-12)


def test_solver_is_deterministic():
    first = solve_ground(16, -0.7)
    second = solve_ground(16, -0.7)
    assert first.energy == second.energy
    assert np.array_equal(first.rapidities, second.rapidities)


def test_energy_curve_is_smooth_in_anisotropy():
    """Consecutive grid energies obey the slope bound N/4 per unit delta."""
    n = 8
    grid = np.linspace(-0.9, 1.0, 39)
    energies = [solve_ground(n, d).energy for d in grid]
    steps = np.diff(grid)
    for gap, h in zip(np.diff(energies), steps):
        assert abs(gap) <= n * h / 4.0 + 1e-9


def test_energy_density_approaches_infinite_chain_value():
    state = solve_ground(64, 1.0)
    assert abs(state.energy / 64 - (0.25 - math.log(2.0))) < 0.002


@pytest.mark.parametrize("bad_n", [2, 5, 7])
def test_rejects_bad_ring_sizes(bad_n):
    with pytest.raises(ValueError):
        solve_ground(bad_n, 0.5)


@pytest.mark.parametrize("delta", [1.0000001, 1.5, -1.0, -2.0])
def test_rejects_unparametrized_anisotropy(delta):
    with pytest.raises(UnsupportedRegimeError):
        solve_ground(8, delta)


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_free_fermion_oracle_against_brute_force(n):
    matrix = full_hamiltonian("xxz_half", n, chain_lattice(n).bonds, delta=0.0)
    reference, ground = ground_full(matrix)
    energy, cxx, czz = xx_oracle(n)
    assert abs(energy - reference) <= 1e-10
    from oracles import site_operator, spin_ops

    sz, sp, sm = spin_ops(0.5)
    sx = 0.5 * (sp + sm)
    cxx_ed = ground @ site_operator(sx, 0, n) @ site_operator(sx, 1, n) @ ground
    czz_ed = ground @ site_operator(sz, 0, n) @ site_operator(sz, 1, n) @ ground
    np.testing.assert_allclose(cxx, cxx_ed, atol=1e-10)
    np.testing.assert_allclose(czz, czz_ed, atol=1e-10)


def test_six_ring_free_fermion_values_are_rational():
    energy, cxx, czz = xx_oracle(6)
    np.testing.assert_allclose(energy, -2.0, atol=1e-14)
    np.testing.assert_allclose(cxx, -1.0 / 6.0, atol=1e-14)
    np.testing.assert_allclose(czz, -1.0 / 9.0, atol=1e-14)


def test_free_fermion_oracle_reaches_known_limits():
    _, cxx, czz = xx_oracle(1000)
    assert abs(cxx + 1.0 / (2.0 * math.pi)) < 1e-6
    assert abs(czz + 1.0 / math.pi**2) < 1e-6


def test_free_fermion_oracle_rejects_bad_sizes():
    with pytest.raises(ValueError):
        xx_oracle(7)
    with pytest.raises(ValueError):
        xx_oracle(2)


def test_differentiated_linear_energy_is_exact():
    czz, cxx = hf_correlators(lambda d: 3.7 * d, num_sites=8, delta=0.2)
    np.testing.assert_allclose(czz, 3.7 / 8.0, atol=1e-10)
    np.testing.assert_allclose(cxx, 0.0, atol=1e-10)


def test_differentiation_falls_back_to_one_sided_at_the_domain_edge():
    """delta = 1 is the solver's edge: the upper stencil point raises."""
    czz, cxx = hf_correlators(lambda d: solve_ground(12, d).energy, 12, 1.0)
    basis, _, ground = _dense_ground(12, 1.0)
    corr = bond_correlators(ground, basis, (0, 1))
    assert abs(czz - corr.czz) <= 1e-5
    assert abs(cxx - corr.cxx) <= 1e-5


def test_differentiated_free_fermion_point_matches_oracle():
    czz, cxx = hf_correlators(lambda d: solve_ground(8, d).energy, 8, 0.0)
    _, cxx_ref, czz_ref = xx_oracle(8)
    assert abs(czz - czz_ref) <= 1e-8
    assert abs(cxx - cxx_ref) <= 1e-8


def test_differentiation_propagates_a_dead_provider():
    def only_at_center(d):
        if d != 0.5:
            raise ValueError("out of range")
        return -1.0

    with pytest.raises(ValueError):
        hf_correlators(only_at_center, num_sites=8, delta=0.5)
