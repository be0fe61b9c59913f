"""Mapping between rhombic-lattice sites and ion internal x Fock states.

Site ``A`` lives on the ground levels 1, 2; ``B`` on excited levels 3, 4 and
``C`` on 5, 6. Spin up takes the lower level of each pair. The unit cell
index equals the phonon number, so the full basis is ``level (x) fock`` with
flat index ``(level - 1) * (n_max + 1) + fock``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import OutOfLattice

LETTERS = ("A", "B", "C")
SPINS = ("up", "down")
N_LEVELS = 6
GROUND_LEVELS = (1, 2)
EXCITED_LEVELS = (3, 4, 5, 6)

_FIRST_LEVEL = {"A": 1, "B": 3, "C": 5}
_LETTER_OF_LEVEL = {1: "A", 2: "A", 3: "B", 4: "B", 5: "C", 6: "C"}
_SPIN_ALIASES = {"up": "up", "u": "up", "↑": "up", "down": "down", "dn": "down", "d": "down", "↓": "down"}
_LABEL_RE = re.compile(r"^\s*([ABCabc])\s*[_ ]?\s*(up|down|dn|u|d|↑|↓)\s*[_ ]?\s*(\d+)\s*$")


@dataclass(frozen=True, order=True)
class SiteIndex:
    cell: int
    letter: str
    spin: str

    def __post_init__(self):
        if self.letter not in LETTERS:
            raise ValueError(f"letter must be one of {LETTERS}, got {self.letter!r}")
        if self.spin not in SPINS:
            raise ValueError(f"spin must be 'up' or 'down', got {self.spin!r}")
        if self.cell < 0:
            raise OutOfLattice(f"negative cell index {self.cell}")

    @property
    def label(self) -> str:
        return f"{self.letter}_{'up' if self.spin == 'up' else 'dn'}_{self.cell}"

    def __str__(self):
        return self.label


def parse_site(label: str) -> SiteIndex:
    """Parse labels such as ``A_up_2``, ``B_dn_0``, ``C↓6`` or ``Aup2``."""
    m = _LABEL_RE.match(label)
    if m is None:
        raise ValueError(f"cannot parse site label {label!r}")
    letter, spin, cell = m.groups()
    return SiteIndex(int(cell), letter.upper(), _SPIN_ALIASES[spin.lower()])


def encode(site: SiteIndex, n_max: int | None = None) -> tuple[int, int]:
    """Return ``(internal level, Fock number)`` for ``site``."""
    if n_max is not None and site.cell > n_max:
        raise OutOfLattice(f"site {site} beyond phonon cutoff n_max={n_max}")
    level = _FIRST_LEVEL[site.letter] + (0 if site.spin == "up" else 1)
    return level, site.cell


def decode(level: int, fock: int) -> SiteIndex:
    if level not in _LETTER_OF_LEVEL:
        raise ValueError(f"internal level must be in 1..6, got {level}")
    spin = "up" if (level - _FIRST_LEVEL[_LETTER_OF_LEVEL[level]]) == 0 else "down"
    return SiteIndex(fock, _LETTER_OF_LEVEL[level], spin)


def dimension(n_max: int) -> int:
    return N_LEVELS * (n_max + 1)


def basis_index(level: int, fock: int, n_max: int) -> int:
    if not 0 <= fock <= n_max:
        raise OutOfLattice(f"Fock number {fock} outside 0..{n_max}")
    return (level - 1) * (n_max + 1) + fock


def site_basis_index(site: SiteIndex, n_max: int) -> int:
    return basis_index(*encode(site, n_max), n_max)


def ordered_sites(n_max: int) -> list[SiteIndex]:
    """Every encoded site, cell by cell in A, B, C order with up before down."""
    return [SiteIndex(n, letter, spin) for n in range(n_max + 1) for letter in LETTERS for spin in SPINS]


def detection_sites(n_detect: int) -> list[SiteIndex]:
    """Reported sites: cells ``0 .. n_detect-1`` in full plus ``A_{n_detect}``.

    With ``n_detect = 7`` this is the 44-site sequence
    ``A_up_0, A_dn_0, B_up_0, ..., C_dn_6, A_up_7, A_dn_7``.
    """
    sites = ordered_sites(n_detect - 1) if n_detect > 0 else []
    return sites + [SiteIndex(n_detect, "A", "up"), SiteIndex(n_detect, "A", "down")]
