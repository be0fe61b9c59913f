import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcage.errors import NonUnitaryLink
from abcage.gauge_algebra import (
    GaugeConfig,
    interference_matrix,
    is_abelian,
    loop_operator,
    nilpotency_index,
    predict_caging,
    validate_unitary,
)

from conftest import angle, random_unitaries, unitaries

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]])
IX = np.array([[0, 1j], [1j, 0]])
ROT = np.array([[0, 1], [-1, 0]])
Z = np.diag([1, -1])

FIG2A = GaugeConfig(I2, X, ROT, I2)
FIG2B = GaugeConfig(I2, IX, ROT, I2)
FIG3 = GaugeConfig(I2, IX, Z, I2)
FIG4 = GaugeConfig(I2, I2, Z, I2)


def brute_force_index(m, tol=1e-9, max_power=4):
    """Nilpotency index by explicit powers, each normalised by ||m||^k."""
    m = np.asarray(m, dtype=complex)
    scale = np.max(np.abs(m))
    if scale <= tol:
        return 1
    p = np.eye(2, dtype=complex)
    for k in range(1, max_power + 1):
        p = p @ (m / scale)
        if np.max(np.abs(p)) <= tol:
            return k
    return None


@pytest.mark.parametrize(
    "m, expected",
    [(I2, True), (X, True), (np.diag([1, 0.5]), False)],
)
def test_validate_unitary(m, expected):
    assert validate_unitary(m, 1e-10) is expected


def test_validate_unitary_rejects_bad_tol():
    with pytest.raises(ValueError):
        validate_unitary(I2, 0)


@pytest.mark.parametrize(
    "cfg, expected",
    [
        (FIG2A, [[0, 1], [0, 0]]),
        (GaugeConfig(I2, I2, I2, I2), I2),
        (FIG3, [[0.5, 0.5j], [0.5j, -0.5]]),
        (FIG2B, [[0, (1 + 1j) / 2], [(1j - 1) / 2, 0]]),
        (FIG4, np.diag([1, 0])),
    ],
)
def test_interference_matrix(cfg, expected):
    np.testing.assert_allclose(interference_matrix(cfg), expected, atol=1e-15)


def test_interference_matrix_rejects_non_unitary():
    with pytest.raises(NonUnitaryLink, match="u2"):
        interference_matrix(GaugeConfig(I2, 1.1 * X, ROT, I2))


@pytest.mark.parametrize(
    "m, expected",
    [
        ([[0, 1], [0, 0]], 2),
        (np.zeros((2, 2)), 1),
        ([[0, (1 + 1j) / 2], [(1j - 1) / 2, 0]], None),
        ([[0.5, 0.5j], [0.5j, -0.5]], 2),
        (np.diag([1, 0]), None),
        (I2, None),
    ],
)
def test_nilpotency_index(m, expected):
    assert nilpotency_index(m) == expected


@pytest.mark.parametrize(
    "cfg, expected",
    [
        (FIG2A, [[-1, 0], [0, 1]]),
        (GaugeConfig(I2, I2, I2, I2), I2),
        (FIG4, [[1, 0], [0, -1]]),
    ],
)
def test_loop_operator(cfg, expected):
    np.testing.assert_allclose(loop_operator(cfg), expected, atol=1e-15)


@pytest.mark.parametrize(
    "w, expected",
    [(np.exp(1j * np.pi / 7) * I2, True), (np.diag([-1, 1]), False), (ROT, False)],
)
def test_is_abelian(w, expected):
    assert is_abelian(w) is expected


@pytest.mark.parametrize(
    "cfg, chi, s_right, s_left",
    [
        (FIG3, np.array([1j, 1]) / np.sqrt(2), 2, 1),
        (FIG3, np.array([-1j, 1]) / np.sqrt(2), 1, 2),
        (FIG4, np.array([0, 1]), 1, 1),
        (FIG4, np.array([1, 0]), None, None),
        (FIG2A, np.array([1, 0]), 1, 2),
        (FIG2B, np.array([1, 0]), None, None),
    ],
)
def test_predict_caging(cfg, chi, s_right, s_left):
    pred = predict_caging(cfg, chi)
    assert (pred.s_right, pred.s_left) == (s_right, s_left)
    if s_right and s_left:
        assert pred.s == max(s_right, s_left)
    else:
        assert pred.s is None


def test_predict_caging_requires_normalised_spinor():
    with pytest.raises(ValueError):
        predict_caging(FIG3, [1, 1])


def test_gauge_config_validation():
    with pytest.raises(ValueError):
        GaugeConfig(I2, I2, I2, I2, hopping_J_over_h=0)
    with pytest.raises(ValueError):
        GaugeConfig(I2, I2, I2, I2, mode="lab")
    with pytest.raises(ValueError):
        GaugeConfig(I2, I2, [[np.nan, 0], [0, 1]], I2)


# --- properties ---------------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(unitaries, unitaries, unitaries, unitaries)
def test_loop_operator_is_unitary(u1, u2, u3, u4):
    assert validate_unitary(loop_operator(GaugeConfig(u1, u2, u3, u4)), 1e-10)


def test_loop_operator_unitary_on_haar_samples(rng):
    us = random_unitaries(rng, 4000).reshape(1000, 4, 2, 2)
    assert all(validate_unitary(loop_operator(GaugeConfig(*links)), 1e-10) for links in us)


def test_nilpotency_index_matches_powers_on_random_matrices(rng):
    for _ in range(1000):
        m = rng.uniform(-1, 1, (2, 2)) + 1j * rng.uniform(-1, 1, (2, 2))
        assert nilpotency_index(m) == brute_force_index(m)


@settings(max_examples=300, deadline=None)
@given(unitaries, st.complex_numbers(min_magnitude=1e-3, max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_nilpotency_index_matches_powers_on_conjugated_jordan_blocks(p, c):
    m = p @ np.array([[0, c], [0, 0]]) @ p.conj().T
    assert nilpotency_index(m) == brute_force_index(m) == 2


def abelian_config(rng):
    u1, u3, u4 = random_unitaries(rng, 3)
    while True:
        theta = rng.uniform(0, 2 * np.pi)
        if abs(theta - np.pi) > 0.01:
            break
    u2 = np.exp(1j * theta) * u4 @ u3 @ u1.conj().T
    return GaugeConfig(u1, u2, u3, u4)


def test_abelian_configs_never_nilpotent(rng):
    for _ in range(1000):
        cfg = abelian_config(rng)
        assert is_abelian(loop_operator(cfg))
        assert nilpotency_index(interference_matrix(cfg)) is None


def test_abelian_configs_never_singular(rng):
    for _ in range(1000):
        cfg = abelian_config(rng)
        assert abs(np.linalg.det(interference_matrix(cfg))) > 1e-6
        # no spinor is annihilated, in either direction
        pred = predict_caging(cfg, np.array([1, 0]))
        assert pred.s_right is None and pred.s_left is None


@pytest.mark.parametrize("cfg", [FIG2A, FIG2B, FIG3, FIG4])
@settings(max_examples=100, deadline=None)
@given(alpha=angle)
def test_scalar_phase_covariance(cfg, alpha):
    ph = np.exp(1j * alpha)
    shifted = GaugeConfig(*(ph * u for u in cfg.links))
    np.testing.assert_allclose(interference_matrix(shifted), ph**2 * interference_matrix(cfg), atol=1e-14)
    assert nilpotency_index(interference_matrix(shifted)) == nilpotency_index(interference_matrix(cfg))
    assert is_abelian(loop_operator(shifted)) == is_abelian(loop_operator(cfg))


@settings(max_examples=200, deadline=None)
@given(unitaries)
def test_index_two_has_both_caging_sizes(p):
    # Rotating every link by the same p rotates I to p I p^dag.
    cfg = GaugeConfig(*(p @ u @ p.conj().T for u in FIG2A.links))
    assert nilpotency_index(interference_matrix(cfg)) == 2
    assert predict_caging(cfg, p @ np.array([1, 0])).s_right == 1
    assert predict_caging(cfg, p @ np.array([0, 1])).s_right == 2
