"""Closed- and open-system time evolution.

Closed runs are exact: the Hamiltonian is diagonalised once and every
snapshot is a phase rotation in the eigenbasis. Open runs integrate the
Lindblad equation with fixed-step RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, StepTooLarge
from .lattice import IonSpec, lowering_operator, parse_site, site_basis_index
from .lattice.encoding import N_LEVELS, SiteIndex, dimension

DEFAULT_STEP = 2.5e-4  # ms
STEP_SAFETY = 0.2


@dataclass(frozen=True)
class NoiseConfig:
    """Heating rate in quanta/s, dephasing times in ms. Zero disables a channel."""

    nbar_dot: float = 0.0
    t2_motion: float = 0.0
    t2_spin: float = 0.0

    def __post_init__(self):
        for name in ("nbar_dot", "t2_motion", "t2_spin"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def is_silent(self) -> bool:
        return self.nbar_dot == 0 and not _rate(self.t2_motion) and not _rate(self.t2_spin)


def _rate(t2: float) -> float:
    return 0.0 if t2 == 0 or math.isinf(t2) else 1.0 / t2


@dataclass(frozen=True)
class Trajectory:
    """Snapshots at ``times`` (ms). ``states`` is ``(T, d)`` for kets and
    ``(T, d, d)`` for density matrices."""

    times: np.ndarray
    states: np.ndarray
    n_max: int

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise DimensionMismatch("one snapshot per time required")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def is_density(self) -> bool:
        return self.states.ndim == 3

    def populations(self) -> np.ndarray:
        """Basis-state populations, shape ``(T, d)``."""
        if self.is_density:
            return np.real(np.einsum("tii->ti", self.states))
        return np.abs(self.states) ** 2

    def __len__(self):
        return len(self.times)


def state_from_sites(amplitudes: Mapping, n_max: int, normalize: bool = False) -> np.ndarray:
    """Ket with the given site amplitudes; keys are :class:`SiteIndex` or labels."""
    psi = np.zeros(dimension(n_max), dtype=complex)
    for site, amp in amplitudes.items():
        if not isinstance(site, SiteIndex):
            site = parse_site(site)
        psi[site_basis_index(site, n_max)] += amp
    if normalize:
        psi /= np.linalg.norm(psi)
    return psi


def _times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size == 0:
        raise ValueError("empty time grid")
    return t


def evolve_unitary(h: np.ndarray, psi0: np.ndarray, times, n_max: int | None = None) -> Trajectory:
    h = np.asarray(h)
    psi0 = np.asarray(psi0, dtype=complex)
    if h.shape != (psi0.size, psi0.size):
        raise DimensionMismatch(f"Hamiltonian {h.shape} vs state of size {psi0.size}")
    if abs(np.vdot(psi0, psi0).real - 1) > 1e-9:
        raise ValueError("initial state is not normalised")
    t = _times(times)
    energies, vecs = np.linalg.eigh(h)
    coeffs = vecs.conj().T @ psi0
    phases = np.exp(-1j * np.outer(t, energies))
    states = (phases * coeffs) @ vecs.T
    if n_max is None:
        n_max = psi0.size // N_LEVELS - 1
    return Trajectory(t, states, n_max)


def dissipators(noise: NoiseConfig, ion: IonSpec) -> list[np.ndarray]:
    """Jump operators for heating, cooling, motional and spin dephasing.

    The heating rate is converted from quanta/s to 1/ms. Spin dephasing uses
    ``sum_e sum_g (|e><e| - |g><g|)``, which is ``diag(-4, -4, 2, 2, 2, 2)``.
    """
    a = lowering_operator(ion.n_max)
    eye_int = np.eye(N_LEVELS)
    eye_ph = np.eye(ion.n_max + 1)
    ops = []
    if noise.nbar_dot > 0:
        k = math.sqrt(noise.nbar_dot * 1e-3)
        ops.append(k * np.kron(eye_int, a.conj().T))
        ops.append(k * np.kron(eye_int, a))
    if _rate(noise.t2_motion):
        ops.append(math.sqrt(_rate(noise.t2_motion)) * np.kron(eye_int, a.conj().T @ a))
    if _rate(noise.t2_spin):
        ops.append(math.sqrt(_rate(noise.t2_spin)) * np.kron(spin_dephasing_generator(), eye_ph))
    return ops


def spin_dephasing_generator() -> np.ndarray:
    diag = np.zeros(N_LEVELS)
    for e in (3, 4, 5, 6):
        for g in (1, 2):
            diag[e - 1] += 1
            diag[g - 1] -= 1
    return np.diag(diag).astype(complex)


def lindblad_rhs(rho: np.ndarray, h: np.ndarray, ls: Sequence[np.ndarray]) -> np.ndarray:
    """``-i[H, rho] + sum_j (L rho L^dag - {L^dag L, rho} / 2)``."""
    rho = np.asarray(rho)
    h = np.asarray(h)
    if rho.shape != h.shape or rho.ndim != 2:
        raise DimensionMismatch(f"rho {rho.shape} vs H {h.shape}")
    out = -1j * (h @ rho - rho @ h)
    for L in ls:
        L = np.asarray(L)
        if L.shape != h.shape:
            raise DimensionMismatch(f"jump operator {L.shape} vs H {h.shape}")
        ldl = L.conj().T @ L
        out += L @ rho @ L.conj().T - 0.5 * (ldl @ rho + rho @ ldl)
    return out


class _Generator:
    """Sparse Lindbladian specialised to Hermitian density matrices.

    Diagonal jump operators act elementwise, ``L rho L^dag = (d d^*) * rho``,
    and are folded into one mask.
    """

    def __init__(self, h, ls):
        anti = sum((L.conj().T @ L for L in ls), np.zeros_like(h))
        self.h_eff = sp.csr_matrix(h - 0.5j * anti)
        self.mask = None
        self.ls = []
        for L in ls:
            if np.count_nonzero(L - np.diag(np.diag(L))) == 0:
                d = np.diag(L)
                m = np.outer(d, d.conj())
                self.mask = m if self.mask is None else self.mask + m
            else:
                self.ls.append(sp.csr_matrix(L))

    def __call__(self, rho):
        a = self.h_eff @ rho
        a *= -1j
        out = a + a.conj().T
        if self.mask is not None:
            out += self.mask * rho
        for L in self.ls:
            y = L @ rho
            out += L @ y.conj().T
        return out


def max_stable_step(h: np.ndarray) -> float:
    return STEP_SAFETY / np.max(np.abs(h))


def evolve_lindblad(
    h: np.ndarray,
    rho0: np.ndarray,
    noise: NoiseConfig,
    ion: IonSpec,
    times,
    step: float = DEFAULT_STEP,
) -> Trajectory:
    """Integrate the master equation with classical RK4.

    Each interval between requested times is split into equal substeps no
    longer than ``step`` (ms).
    """
    h = np.asarray(h, dtype=complex)
    rho = np.array(rho0, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    if rho.shape != h.shape or h.shape[0] != ion.dim:
        raise DimensionMismatch(f"rho {rho.shape}, H {h.shape}, ion dimension {ion.dim}")
    if step <= 0:
        raise ValueError("step must be positive")
    if np.any(h) and step > max_stable_step(h):
        raise StepTooLarge(f"step {step} ms exceeds {max_stable_step(h):.3g} ms")
    t = _times(times)
    rhs = _Generator(h, dissipators(noise, ion))

    out = np.empty((t.size,) + rho.shape, dtype=complex)
    out[0] = rho
    for k in range(1, t.size):
        span = t[k] - t[k - 1]
        nsub = max(1, math.ceil(span / step - 1e-9))
        dt = span / nsub
        for _ in range(nsub):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * dt * k1)
            k3 = rhs(rho + 0.5 * dt * k2)
            k4 = rhs(rho + dt * k3)
            rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k] = rho
    return Trajectory(t, out, ion.n_max)


def default_times(stop: float = 1.0, samples: int = 201, start: float = 0.0) -> np.ndarray:
    return np.linspace(start, stop, samples)
