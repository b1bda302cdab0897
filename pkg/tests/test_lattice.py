import pytest

from spinent.lattice import chain_lattice, square_lattice


def test_four_site_ring_bonds():
    lat = chain_lattice(4)
    assert lat.bonds == ((0, 1), (0, 3), (1, 2), (2, 3))
    assert lat.num_sites == 4
    assert lat.geometry == "chain"


def test_two_site_ring_keeps_single_bond():
    assert chain_lattice(2).bonds == ((0, 1),)


def test_ring_degrees():
    lat = chain_lattice(12)
    assert lat.num_bonds == 12
    assert all(lat.degree(site) == 2 for site in range(12))


@pytest.mark.parametrize("n", [3, 5, 8, 13])
def test_degree_sum_counts_each_bond_twice(n):
    lat = chain_lattice(n)
    assert sum(lat.degree(site) for site in range(n)) == 2 * lat.num_bonds


@pytest.mark.parametrize("n", [4, 7, 10])
def test_ring_rotation_maps_bonds_onto_themselves(n):
    lat = chain_lattice(n)
    rotated = {tuple(sorted(((i + 1) % n, (j + 1) % n))) for i, j in lat.bonds}
    assert rotated == set(lat.bonds)


def test_square_4x4():
    lat = square_lattice(4, 4)
    assert lat.num_sites == 16
    assert lat.num_bonds == 32
    assert lat.extent == (4, 4)


def test_square_3x3_degrees():
    lat = square_lattice(3, 3)
    assert lat.num_sites == 9
    assert lat.num_bonds == 18
    assert all(lat.degree(site) == 4 for site in range(9))


def test_square_rejects_small_extent():
    with pytest.raises(ValueError):
        square_lattice(4, 2)


def test_chain_rejects_single_site():
    with pytest.raises(ValueError):
        chain_lattice(1)


def test_bonds_are_canonical():
    for lat in (chain_lattice(9), square_lattice(3, 4)):
        assert all(i < j for i, j in lat.bonds)
        assert len(set(lat.bonds)) == lat.num_bonds
        assert list(lat.bonds) == sorted(lat.bonds)
