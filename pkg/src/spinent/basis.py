"""Fixed total-Sz sector bases for registers of spin-1/2 or spin-1 sites.

Configurations are packed into int64 words, one bit per site for spin-1/2
and two bits per site for spin-1 with local values {0, 1, 2} standing for
Sz = {-1, 0, +1}. Within a sector the packed states are kept sorted, so
index lookup is a binary search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPIN_VALUE = {"half": 0.5, "one": 1.0}
_BITS_PER_SITE = {"half": 1, "one": 2}
_LOCAL_DIM = {"half": 2, "one": 3}
_MAX_SITES = {"half": 24, "one": 14}


@dataclass(frozen=True, eq=False)
class SpinBasis:
    """Ordered basis of one total-Sz sector.

    ``states`` holds the packed configurations, strictly increasing. The
    packed digit of site ``i`` occupies bits ``[b*i, b*(i+1))`` where ``b``
    is ``bits_per_site``; larger digit means larger local Sz.
    """

    spin: str
    num_sites: int
    sz_sector: float
    states: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.states.size)

    @property
    def local_dim(self) -> int:
        return _LOCAL_DIM[self.spin]

    @property
    def bits_per_site(self) -> int:
        return _BITS_PER_SITE[self.spin]

    def site_digits(self, site: int, states: np.ndarray | None = None) -> np.ndarray:
        """Packed digit of ``site`` for every state (0 = lowest local Sz)."""
        if states is None:
            states = self.states
        shift = self.bits_per_site * site
        mask = self.local_dim - 1 if self.spin == "half" else 3
        return (states >> shift) & mask

    def with_pair_digits(
        self, states: np.ndarray, i: int, j: int, digit_i: int, digit_j: int
    ) -> np.ndarray:
        """Copies of ``states`` with the digits of sites ``i`` and ``j`` replaced."""
        b = self.bits_per_site
        mask = (1 << b) - 1
        cleared = states & ~((mask << (b * i)) | (mask << (b * j)))
        return cleared | (digit_i << (b * i)) | (digit_j << (b * j))

    def local_sz(self, digits: np.ndarray) -> np.ndarray:
        """Map packed digits to local Sz values."""
        return digits - SPIN_VALUE[self.spin]


def _check_spin(spin: str) -> None:
    if spin not in SPIN_VALUE:
        raise ValueError(f"unknown spin tag {spin!r}, expected 'half' or 'one'")


def build_basis(num_sites: int, spin: str, sz_sector: float) -> SpinBasis:
    """Enumerate the complete sector with total Sz equal to ``sz_sector``.

    Raises ValueError if the sector is unreachable (|Sz| too large or with
    the wrong integrality for the site count).
    """
    _check_spin(spin)
    if num_sites < 1:
        raise ValueError(f"need at least one site, got {num_sites}")
    if num_sites > _MAX_SITES[spin]:
        raise ValueError(
            f"{num_sites} spin-{spin} sites exceed the supported size "
            f"({_MAX_SITES[spin]}); the full enumeration would not fit in memory"
        )
    s = SPIN_VALUE[spin]
    #: number of raising units above the all-lowest configuration
    units = sz_sector + num_sites * s
    if abs(units - round(units)) > 1e-9 or not 0 <= round(units) <= 2 * s * num_sites:
        raise ValueError(
            f"sector Sz={sz_sector} is unreachable for {num_sites} spin-{spin} sites"
        )
    units = int(round(units))

    if spin == "half":
        codes = np.arange(1 << num_sites, dtype=np.int64)
        states = codes[np.bitwise_count(codes) == units]
    else:
        values = np.arange(3**num_sites, dtype=np.int64)
        remainder = values.copy()
        packed = np.zeros_like(values)
        digit_sum = np.zeros_like(values)
        for site in range(num_sites):
            digit = remainder % 3
            remainder //= 3
            packed |= digit << (2 * site)
            digit_sum += digit
        # digit-wise packing is monotone in the base-3 value, so the
        # selection below is already sorted
        states = packed[digit_sum == units]

    return SpinBasis(spin, num_sites, float(sz_sector), states)


def state_index(basis: SpinBasis, packed_state: int) -> int | None:
    """Position of a packed configuration in the sector, or None if absent."""
    pos = int(np.searchsorted(basis.states, packed_state))
    if pos < basis.dimension and int(basis.states[pos]) == int(packed_state):
        return pos
    return None


def sector_values(spin: str, num_sites: int) -> list[float]:
    """All reachable total-Sz values, ascending."""
    _check_spin(spin)
    top = SPIN_VALUE[spin] * num_sites
    count = int(round(2 * top)) + 1
    return [float(-top + k) for k in range(count)]


def nonnegative_sectors(spin: str, num_sites: int) -> list[float]:
    """Reachable Sz >= 0 values, ascending (spin-flip covers the rest)."""
    return [v for v in sector_values(spin, num_sites) if v > -1e-12]
