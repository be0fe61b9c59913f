"""Lattice and laser-ion Hamiltonians on the internal (x) Fock space.

Units: hbar = 1, times in ms, energies and Rabi rates in rad/ms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..gauge_algebra import GaugeConfig, check_links
from .encoding import EXCITED_LEVELS, GROUND_LEVELS, N_LEVELS, basis_index, dimension

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class IonSpec:
    """Trap and truncation parameters.

    ``omega_trap`` is the angular trap frequency in rad/s; ``n_max`` is the
    simulated Fock cutoff and ``n_detect`` the highest reported cell.
    """

    eta: float = 0.1
    omega_trap: float = TWO_PI * 2e6
    n_max: int = 15
    n_detect: int = 7

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ValueError("Lamb-Dicke factor must lie in (0, 1)")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    @property
    def dim(self) -> int:
        return dimension(self.n_max)

    @property
    def omega_trap_per_ms(self) -> float:
        return self.omega_trap * 1e-3


def _entry_index(g: int, e: int) -> tuple[int, int]:
    if g not in GROUND_LEVELS or e not in EXCITED_LEVELS:
        raise ValueError(f"no transition between g={g} and e={e}")
    return g - 1, e - 3


@dataclass(frozen=True)
class LaserParams:
    """Rabi rates (rad/ms, non-negative) and phases (rad, in [0, 2pi)) for the
    carrier and red-sideband tones of every S-D transition.

    Arrays are indexed ``[g - 1, e - 3]``.
    """

    car_rabi: np.ndarray = field(default_factory=lambda: np.zeros((2, 4)))
    car_phase: np.ndarray = field(default_factory=lambda: np.zeros((2, 4)))
    rsb_rabi: np.ndarray = field(default_factory=lambda: np.zeros((2, 4)))
    rsb_phase: np.ndarray = field(default_factory=lambda: np.zeros((2, 4)))

    def __post_init__(self):
        for name in ("car_rabi", "car_phase", "rsb_rabi", "rsb_phase"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (2, 4):
                raise ValueError(f"{name} must have shape (2, 4)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.car_rabi < 0) or np.any(self.rsb_rabi < 0):
            raise ValueError("Rabi rates must be non-negative")

    @classmethod
    def from_complex(cls, car: np.ndarray, rsb: np.ndarray) -> "LaserParams":
        """Build from complex amplitudes ``rabi * exp(i phase)``."""
        car = np.asarray(car, dtype=complex)
        rsb = np.asarray(rsb, dtype=complex)
        return cls(
            car_rabi=np.abs(car),
            car_phase=np.mod(np.angle(car), TWO_PI),
            rsb_rabi=np.abs(rsb),
            rsb_phase=np.mod(np.angle(rsb), TWO_PI),
        )

    def tone(self, kind: str, g: int, e: int) -> tuple[float, float]:
        i, j = _entry_index(g, e)
        if kind == "car":
            return float(self.car_rabi[i, j]), float(self.car_phase[i, j])
        if kind == "rsb":
            return float(self.rsb_rabi[i, j]), float(self.rsb_phase[i, j])
        raise ValueError(f"unknown transition kind {kind!r}")

    @property
    def car_complex(self) -> np.ndarray:
        return self.car_rabi * np.exp(1j * self.car_phase)

    @property
    def rsb_complex(self) -> np.ndarray:
        return self.rsb_rabi * np.exp(1j * self.rsb_phase)


def lowering_operator(n_max: int) -> np.ndarray:
    """Truncated phonon annihilation operator, ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def level_projector(e: int, g: int) -> np.ndarray:
    """``|e><g|`` on the six internal levels."""
    op = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    op[e - 1, g - 1] = 1
    return op


def lattice_hamiltonian(cfg: GaugeConfig, n_max: int, modulated: bool) -> np.ndarray:
    """Rhombic-lattice hopping Hamiltonian over cells ``0 .. n_max``.

    Intra-cell bonds A_n-B_n and A_n-C_n carry ``J u1`` and ``J u3``; inter-cell
    bonds B_n-A_{n+1} and C_n-A_{n+1} carry ``J u2`` and ``J u4``, scaled by
    ``sqrt(n + 1)`` when ``modulated``. Bonds reaching past ``n_max`` are dropped.
    """
    check_links(cfg)
    jj = cfg.hopping_angular
    h = np.zeros((dimension(n_max),) * 2, dtype=complex)

    def add_block(to_first, from_first, n_to, n_from, block):
        for i in range(2):
            for k in range(2):
                row = basis_index(to_first + i, n_to, n_max)
                col = basis_index(from_first + k, n_from, n_max)
                h[row, col] += block[i, k]
                h[col, row] += np.conj(block[i, k])

    for n in range(n_max + 1):
        add_block(3, 1, n, n, jj * cfg.u1)
        add_block(5, 1, n, n, jj * cfg.u3)
        if n + 1 <= n_max:
            amp = jj * (np.sqrt(n + 1) if modulated else 1.0)
            add_block(1, 3, n + 1, n, amp * cfg.u2)
            add_block(1, 5, n + 1, n, amp * cfg.u4)
    return h


def build_ideal_hamiltonian(cfg: GaugeConfig, extent: int) -> np.ndarray:
    """Flat-lattice Hamiltonian with uniform hopping on cells ``0 .. extent``."""
    if extent < 2:
        raise ValueError("extent must be at least 2")
    return lattice_hamiltonian(cfg, extent, modulated=False)


def ion_hamiltonian_lattice_form(cfg: GaugeConfig, ion: IonSpec) -> np.ndarray:
    """Lattice Hamiltonian realised by the laser drive, with the Fock-ladder
    ``sqrt(n + 1)`` factor on every inter-cell bond."""
    return lattice_hamiltonian(cfg, ion.n_max, modulated=True)


def link_to_laser(cfg: GaugeConfig, ion: IonSpec) -> LaserParams:
    """Laser amplitudes and phases that realise the links ``cfg``.

    Carrier tone (g, e) sets the coefficient of ``|e><g|``, which is the
    ``[e, g]`` entry of u1 (B) or u3 (C). The red sideband term
    ``i eta Omega e^{i phi} |e><g| (x) a`` is the Hermitian partner of the
    inter-cell hop ``A_{n+1} <- B_n``, so it must equal ``J conj(u2[g, e])``.
    """
    check_links(cfg)
    jj = cfg.hopping_angular
    car = np.zeros((2, 4), dtype=complex)
    rsb = np.zeros((2, 4), dtype=complex)
    for g in GROUND_LEVELS:
        for e in EXCITED_LEVELS:
            i, j = _entry_index(g, e)
            intra, inter = (cfg.u1, cfg.u2) if e in (3, 4) else (cfg.u3, cfg.u4)
            k = (e - 3) % 2
            car[i, j] = jj * intra[k, g - 1]
            rsb[i, j] = (jj / ion.eta) * (-1j) * np.conj(inter[g - 1, k])
    return LaserParams.from_complex(car, rsb)


def laser_to_links(params: LaserParams, hopping_J_over_h: float, eta: float) -> tuple:
    """Inverse of :func:`link_to_laser`: recover ``(u1, u2, u3, u4)``."""
    jj = TWO_PI * hopping_J_over_h
    car = params.car_complex / jj
    rsb = np.conj(1j * eta * params.rsb_complex / jj)
    u1 = car[:, 0:2].T
    u3 = car[:, 2:4].T
    u2 = rsb[:, 0:2]
    u4 = rsb[:, 2:4]
    return u1, u2, u3, u4


def build_ion_hamiltonian(params: LaserParams, ion: IonSpec) -> np.ndarray:
    """Rest-frame Hamiltonian of the carrier and red-sideband drives.

    ``sum Omega_car (|e><g| e^{i phi} (x) 1 + h.c.)
     + sum eta Omega_rsb (i |e><g| e^{i phi} (x) a + h.c.)``
    """
    a = lowering_operator(ion.n_max)
    eye_ph = np.eye(ion.n_max + 1)
    car = params.car_complex
    rsb = params.rsb_complex
    h = np.zeros((ion.dim, ion.dim), dtype=complex)
    for g in GROUND_LEVELS:
        for e in EXCITED_LEVELS:
            i, j = _entry_index(g, e)
            sigma = level_projector(e, g)
            if car[i, j] != 0:
                h += car[i, j] * np.kron(sigma, eye_ph)
            if rsb[i, j] != 0:
                h += 1j * ion.eta * rsb[i, j] * np.kron(sigma, a)
    return h + h.conj().T


def off_resonant_excitation_estimate(cfg: GaugeConfig, ion: IonSpec) -> float:
    """Worst-case carrier population driven by a red-sideband tone detuned by
    the trap frequency: ``max Omega^2 / (Omega^2 + omega^2)``."""
    if ion.omega_trap <= 0:
        raise ValueError("trap frequency must be positive")
    rabi = link_to_laser(cfg, ion).rsb_rabi
    w = ion.omega_trap_per_ms
    return float(np.max(rabi**2 / (rabi**2 + w**2)))
