"""Qudit-phonon readout emulation.

A readout of level ``k`` first shelves every other level into the dark
D5/2 manifold with carrier pi-pulses, leaving ``k``'s population in one
bright S1/2 level. A blue sideband then flops that level against an empty
D5/2 level; the phonon distribution is recovered from the flopping signal.

Levels 1..6 are the encoded qudit. The two extra D5/2 Zeeman levels used
only for parking and for the sideband partner are labelled here as
``PARK_LOW`` (m = -5/2) and ``PARK_HIGH`` (m = +5/2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .errors import IllConditioned

S_LEVELS = (1, 2)
PARK_LOW = 7
PARK_HIGH = 8
D_LEVELS = (3, 4, 5, 6, PARK_LOW, PARK_HIGH)
ALL_LEVELS = S_LEVELS + D_LEVELS


@dataclass(frozen=True)
class ShelvingPlan:
    target: int
    pulses: tuple
    readout_bright_level: int
    sideband_partner: int

    def apply(self, level: int) -> int:
        """Follow a population initially in ``level`` through the pi-pulses."""
        for s, d in self.pulses:
            if level == s:
                level = d
            elif level == d:
                level = s
        return level


def shelving_plan(target: int) -> ShelvingPlan:
    """Carrier pi-pulse sequence isolating ``target`` in S1/2.

    Target 1: park level 2 in m=+5/2, read level 1 against m=-5/2.
    Any other target: park level 1 in m=-5/2, then swap level 2 with the
    target (a no-op pulse when the target is 2) and read level 2 against m=+5/2.
    """
    if target not in range(1, 7):
        raise ValueError(f"target must be an internal level 1..6, got {target}")
    if target == 1:
        return ShelvingPlan(1, ((2, PARK_HIGH),), 1, PARK_LOW)
    pulses = [(1, PARK_LOW)]
    if target != 2:
        pulses.append((2, target))
    return ShelvingPlan(target, tuple(pulses), 2, PARK_HIGH)


@dataclass(frozen=True)
class SidebandModel:
    """Blue-sideband flopping model.

    ``base_rabi`` is the carrier Rabi rate in rad/ms, so the n -> n+1
    sideband rate is ``eta * base_rabi * sqrt(n + 1)``. ``gammas`` holds one
    decay constant (1/ms) per Fock term and defaults to zero.
    """

    base_rabi: float = 2 * np.pi * 25.0
    eta: float = 0.1
    n_terms: int = 8
    gammas: tuple = field(default=())

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas) or (0.0,) * self.n_terms
        if len(g) != self.n_terms:
            raise ValueError("need one decay constant per Fock term")
        if any(x < 0 for x in g):
            raise ValueError("decay constants must be non-negative")
        object.__setattr__(self, "gammas", g)

    @property
    def sideband_rabi(self) -> np.ndarray:
        return self.eta * self.base_rabi * np.sqrt(np.arange(1, self.n_terms + 1))

    def basis(self, taus) -> np.ndarray:
        taus = np.asarray(taus, dtype=float)
        g = np.asarray(self.gammas)
        return np.exp(-np.outer(taus, g)) * np.cos(2 * np.outer(taus, self.sideband_rabi))


@dataclass(frozen=True)
class FlopSignal:
    taus: np.ndarray
    p_down: np.ndarray


@dataclass(frozen=True)
class FitResult:
    populations: np.ndarray
    residual: float


def synthesize_flop(populations, model: SidebandModel, taus) -> FlopSignal:
    """``P_down(tau) = (1 + sum_n |C_n|^2 exp(-gamma_n tau) cos(2 Omega_n tau)) / 2``."""
    pops = np.zeros(model.n_terms)
    given = np.asarray(populations, dtype=float)
    if given.size > model.n_terms:
        raise ValueError("more populations than model terms")
    if np.any(given < 0) or given.sum() > 1 + 1e-9:
        raise ValueError("populations must be non-negative and sum to at most 1")
    pops[: given.size] = given
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 0):
        raise ValueError("probe durations must be non-negative")
    return FlopSignal(taus, 0.5 * (1 + model.basis(taus) @ pops))


def fit_populations(signal: FlopSignal, model: SidebandModel) -> FitResult:
    """Non-negative least squares for the Fock populations at fixed
    sideband frequencies and decay constants."""
    taus = np.asarray(signal.taus, dtype=float)
    if taus.size < 4 * model.n_terms:
        raise IllConditioned(f"need at least {4 * model.n_terms} samples, got {taus.size}")
    span = taus.max() - taus.min()
    gaps = np.diff(np.concatenate([[0.0], model.sideband_rabi]))
    if model.n_terms > 1 and span < np.max(2 * np.pi / gaps[1:]):
        raise IllConditioned(f"probe span {span:.3g} ms cannot separate adjacent sideband frequencies")
    design = model.basis(taus)
    target = 2 * np.asarray(signal.p_down) - 1
    pops, _ = nnls(design, target)
    resid = 0.5 * (design @ pops - target)
    return FitResult(pops, float(np.sqrt(np.mean(resid**2))))


def level_phonon_distribution(populations: np.ndarray, level: int, n_max: int, n_terms: int) -> np.ndarray:
    """Fock distribution of one internal level from basis populations."""
    block = np.asarray(populations)[(level - 1) * (n_max + 1) : level * (n_max + 1)]
    out = np.zeros(n_terms)
    k = min(n_terms, block.size)
    out[:k] = block[:k]
    return out


def read_out(populations: np.ndarray, n_max: int, model: SidebandModel, taus) -> np.ndarray:
    """Emulated readout of every (level, Fock) population of a snapshot.

    Returns an array of shape ``(6, model.n_terms)``. For each level the
    shelving plan is checked to isolate it, the bright level's flop signal is
    synthesised from that level's phonon distribution and then fitted.
    """
    out = np.zeros((6, model.n_terms))
    for level in range(1, 7):
        plan = shelving_plan(level)
        if plan.apply(level) != plan.readout_bright_level:
            raise RuntimeError(f"shelving plan for level {level} is broken")
        dist = level_phonon_distribution(populations, level, n_max, model.n_terms)
        signal = synthesize_flop(dist, model, taus)
        out[level - 1] = fit_populations(signal, model).populations
    return out
