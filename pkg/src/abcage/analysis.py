"""Site-probability extraction and caging diagnostics for trajectories."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import Trajectory
from .errors import DimensionMismatch, WindowTooSmall
from .gauge_algebra import CagingPrediction
from .lattice.encoding import SiteIndex, detection_sites, dimension, site_basis_index

DEFAULT_EPSILON = 1e-4
NOISY_EPSILON = 5e-2


@dataclass(frozen=True)
class SiteProbabilities:
    time: float
    probs: dict
    above_window: float

    @property
    def total(self) -> float:
        return sum(self.probs.values())


@dataclass(frozen=True)
class CagingReport:
    observed_s_right: Optional[int]
    observed_s_left: Optional[int]
    cage_sites: frozenset = field(default_factory=frozenset)
    max_leakage: float = 0.0

    @property
    def observed_s(self) -> Optional[int]:
        if self.observed_s_right is None or self.observed_s_left is None:
            return None
        return max(self.observed_s_right, self.observed_s_left)

    @property
    def caged(self) -> bool:
        return self.observed_s is not None


def _window_indices(n_max: int, n_detect: int) -> np.ndarray:
    if n_detect > n_max:
        raise DimensionMismatch(f"detection window n={n_detect} exceeds cutoff n_max={n_max}")
    return np.array([site_basis_index(s, n_max) for s in detection_sites(n_detect)])


def _diagonal(snapshot: np.ndarray) -> np.ndarray:
    snapshot = np.asarray(snapshot)
    if snapshot.ndim == 1:
        return np.abs(snapshot) ** 2
    return np.real(np.diagonal(snapshot, axis1=-2, axis2=-1))


def site_probabilities(snapshot, n_max: int, n_detect: int = 7, time: float = 0.0) -> SiteProbabilities:
    """Probabilities of every detected site for one ket or density matrix."""
    snapshot = np.asarray(snapshot)
    if snapshot.shape[0] != dimension(n_max) or snapshot.ndim not in (1, 2):
        raise DimensionMismatch(f"snapshot shape {snapshot.shape} does not match n_max={n_max}")
    diag = _diagonal(snapshot)
    idx = _window_indices(n_max, n_detect)
    sites = detection_sites(n_detect)
    probs = {s: float(diag[i]) for s, i in zip(sites, idx)}
    return SiteProbabilities(time, probs, float(diag.sum() - diag[idx].sum()))


def probability_table(traj: Trajectory, n_detect: int = 7) -> np.ndarray:
    """Array of shape ``(T, n_sites + 1)``: detected sites in display order,
    then the aggregate probability above the window."""
    pops = traj.populations()
    idx = _window_indices(traj.n_max, n_detect)
    window = pops[:, idx]
    above = pops.sum(axis=1) - window.sum(axis=1)
    return np.column_stack([window, above])


def a_site_peaks(traj: Trajectory, n_detect: int = 7) -> np.ndarray:
    """Peak over time of the total A-site probability of each cell ``0..n_detect``."""
    pops = traj.populations()
    peaks = []
    for n in range(n_detect + 1):
        idx = [site_basis_index(SiteIndex(n, "A", s), traj.n_max) for s in ("up", "down")]
        peaks.append(pops[:, idx].sum(axis=1).max())
    return np.array(peaks)


def cage_region(initial_cell: int, s_left: int, s_right: int, n_max: int) -> frozenset:
    """Sites strictly between ``A_{n - s_left}`` and ``A_{n + s_right}``."""
    lo, hi = initial_cell - s_left, initial_cell + s_right
    sites = set()
    for n in range(max(lo, 0), min(hi, n_max + 1)):
        if n > lo:
            sites.update(SiteIndex(n, "A", s) for s in ("up", "down"))
        sites.update(SiteIndex(n, letter, s) for letter in ("B", "C") for s in ("up", "down"))
    return frozenset(sites)


def leakage_series(traj: Trajectory, sites) -> np.ndarray:
    """Total probability outside ``sites`` at every snapshot."""
    pops = traj.populations()
    idx = [site_basis_index(s, traj.n_max) for s in sites]
    return pops.sum(axis=1) - pops[:, idx].sum(axis=1)


def observed_caging(
    traj: Trajectory,
    initial_cell: int,
    epsilon: float = DEFAULT_EPSILON,
    n_detect: int = 7,
    prediction: CagingPrediction | None = None,
) -> CagingReport:
    """Read caging sizes off a trajectory.

    The rightward size is the smallest ``s`` whose A sites in cell
    ``initial_cell + s`` never exceed ``epsilon``; if even the outermost
    detected A site does, the run is uncaged in that direction (None).
    """
    if not 0 < epsilon < 0.1:
        raise ValueError("epsilon must lie in (0, 0.1)")
    peaks = a_site_peaks(traj, n_detect)

    s_right = next((s for s in range(1, n_detect - initial_cell + 1) if peaks[initial_cell + s] <= epsilon), None)
    s_left = next((s for s in range(1, initial_cell + 1) if peaks[initial_cell - s] <= epsilon), None)
    if s_right is None and initial_cell >= n_detect - 2:
        raise WindowTooSmall(f"initial cell {initial_cell} too close to detection edge {n_detect}")

    table = probability_table(traj, n_detect)[:, :-1]
    observed = frozenset(s for s, p in zip(detection_sites(n_detect), table.max(axis=0)) if p > epsilon)

    if prediction is not None and prediction.caged:
        reference = cage_region(initial_cell, prediction.s_left, prediction.s_right, traj.n_max)
    else:
        reference = observed
    leak = float(np.clip(leakage_series(traj, reference).max(), 0.0, 1.0))
    return CagingReport(s_right, s_left, observed, leak)
