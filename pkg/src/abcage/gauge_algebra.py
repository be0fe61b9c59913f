"""Algebra of U(2) link variables on the rhombic lattice.

Link variables ``u1 .. u4`` follow the hopping convention

    A_n --u1--> B_n --u2--> A_{n+1}
    A_n --u3--> C_n --u4--> A_{n+1}

so a spinor leaving ``A_n`` rightwards along the upper path picks up ``u2 @ u1``
and along the lower path ``u4 @ u3``. Spinors are ordered ``(up, down)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonUnitaryLink

DEFAULT_TOL = 1e-9
MAX_CAGE_SEARCH = 4

IDENTITY = np.eye(2, dtype=complex)


def as_mat2(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2x2 complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


@dataclass(frozen=True)
class GaugeConfig:
    """Four link variables plus the hopping strength.

    ``hopping_J_over_h`` is J/h in kHz; angular units are derived on demand.
    Unitarity is not enforced here so that invalid configs can still be
    diagnosed; operations that need it raise :class:`NonUnitaryLink`.
    """

    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    u4: np.ndarray
    hopping_J_over_h: float = 2.5
    mode: str = "ion"

    def __post_init__(self):
        for name in ("u1", "u2", "u3", "u4"):
            arr = as_mat2(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not self.hopping_J_over_h > 0:
            raise ValueError("hopping_J_over_h must be positive")
        if self.mode not in ("ideal", "ion"):
            raise ValueError(f"mode must be 'ideal' or 'ion', got {self.mode!r}")

    @property
    def links(self) -> tuple:
        return (self.u1, self.u2, self.u3, self.u4)

    @property
    def hopping_angular(self) -> float:
        """J/hbar in rad/ms."""
        return 2 * np.pi * self.hopping_J_over_h

    def with_mode(self, mode: str) -> "GaugeConfig":
        return GaugeConfig(*self.links, hopping_J_over_h=self.hopping_J_over_h, mode=mode)


@dataclass(frozen=True)
class CagingPrediction:
    s_right: Optional[int]
    s_left: Optional[int]

    @property
    def s(self) -> Optional[int]:
        if self.s_right is None or self.s_left is None:
            return None
        return max(self.s_right, self.s_left)

    @property
    def caged(self) -> bool:
        return self.s is not None


def validate_unitary(m, tol: float = 1e-10) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_mat2(m)
    return bool(np.max(np.abs(m.conj().T @ m - IDENTITY)) <= tol)


def check_links(cfg: GaugeConfig, tol: float = 1e-10) -> None:
    for i, u in enumerate(cfg.links, start=1):
        if not validate_unitary(u, tol):
            raise NonUnitaryLink(f"non-unitary link u{i}")


def interference_matrix(cfg: GaugeConfig) -> np.ndarray:
    """Average of the two path-ordered products between neighbouring A sites."""
    check_links(cfg)
    return (cfg.u2 @ cfg.u1 + cfg.u4 @ cfg.u3) / 2


def loop_operator(cfg: GaugeConfig) -> np.ndarray:
    """Plaquette holonomy ``u3^dag u4^dag u2 u1`` starting from A."""
    check_links(cfg)
    return cfg.u3.conj().T @ cfg.u4.conj().T @ cfg.u2 @ cfg.u1


def nilpotency_index(m, tol: float = DEFAULT_TOL) -> Optional[int]:
    """Smallest k with ``m**k == 0``, or None when ``m`` is not nilpotent.

    A 2x2 matrix is nilpotent iff its trace and determinant vanish, and then
    its index is at most 2. Trace and determinant are compared against
    ``tol`` after normalising ``m`` by its largest entry.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_mat2(m)
    scale = np.max(np.abs(m))
    if scale <= tol:
        return 1
    mh = m / scale
    if abs(np.trace(mh)) <= tol and abs(np.linalg.det(mh)) <= tol:
        return 2
    return None


def is_abelian(w, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``w`` is a scalar multiple of the identity."""
    w = as_mat2(w)
    return bool(abs(w[0, 1]) <= tol and abs(w[1, 0]) <= tol and abs(w[0, 0] - w[1, 1]) <= tol)


def _annihilation_order(m: np.ndarray, chi: np.ndarray, tol: float) -> Optional[int]:
    v = chi
    for k in range(1, MAX_CAGE_SEARCH + 1):
        v = m @ v
        if np.linalg.norm(v) <= tol:
            return k
    return None


def predict_caging(cfg: GaugeConfig, chi, tol: float = DEFAULT_TOL) -> CagingPrediction:
    """Caging sizes implied by the kernel chains of I and I^dag acting on ``chi``.

    ``s_right`` is the smallest m with ``I^m chi = 0``; ``s_left`` uses
    ``I^dag``. Either is None when no power up to 4 annihilates ``chi``.
    """
    chi = np.asarray(chi, dtype=complex).reshape(2)
    if abs(np.vdot(chi, chi).real - 1) > 1e-10:
        raise ValueError("initial spinor must be normalised")
    imat = interference_matrix(cfg)
    return CagingPrediction(
        s_right=_annihilation_order(imat, chi, tol),
        s_left=_annihilation_order(imat.conj().T, chi, tol),
    )
