"""Periodic lattice geometries as explicit nearest-neighbour bond lists.

Every Hamiltonian in this package is a sum over bonds, so a lattice is
nothing more than a site count and a deduplicated list of site pairs.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Lattice:
    """A finite periodic lattice described by its bond list.

    Bonds are stored once per pair as ``(i, j)`` with ``i < j``, so each
    exchange term enters an assembled Hamiltonian exactly once.
    """

    geometry: str
    num_sites: int
    bonds: tuple[tuple[int, int], ...]
    extent: tuple[int, ...]

    @property
    def num_bonds(self) -> int:
        return len(self.bonds)

    def degree(self, site: int) -> int:
        """Number of bonds touching ``site``."""
        return sum(1 for a, b in self.bonds if site == a or site == b)


def chain_lattice(num_sites: int) -> Lattice:
    """Periodic chain (ring) of ``num_sites`` sites.

    A ring of N >= 3 sites has N bonds. The two-site ring keeps a single
    bond: the pair (0, 1) is counted once, which makes the two-spin
    Heisenberg singlet energy the textbook -3/4.
    """
    if num_sites < 2:
        raise ValueError(f"chain needs at least 2 sites, got {num_sites}")
    pairs = {tuple(sorted((i, (i + 1) % num_sites))) for i in range(num_sites)}
    bonds = tuple(sorted(pairs))
    return Lattice("chain", num_sites, bonds, (num_sites,))


def square_lattice(width: int, height: int) -> Lattice:
    """Periodic square lattice of ``width`` x ``height`` sites.

    Site (row, col) is index ``row * width + col``. Each site bonds to its
    right and lower neighbour with wraparound, giving 2*width*height bonds.
    Extents below 3 would duplicate bonds under periodicity and are
    rejected.
    """
    if width < 3 or height < 3:
        raise ValueError(
            f"square lattice needs extents >= 3, got {width}x{height}"
        )
    bonds = []
    for row in range(height):
        for col in range(width):
            site = row * width + col
            right = row * width + (col + 1) % width
            down = ((row + 1) % height) * width + col
            bonds.append(tuple(sorted((site, right))))
            bonds.append(tuple(sorted((site, down))))
    return Lattice("square", width * height, tuple(sorted(set(bonds))), (width, height))
