import numpy as np
import pytest

from abcage.analysis import (
    a_site_peaks,
    cage_region,
    observed_caging,
    probability_table,
    site_probabilities,
)
from abcage.config import preset
from abcage.dynamics import Trajectory, evolve_unitary, state_from_sites
from abcage.errors import DimensionMismatch, WindowTooSmall
from abcage.gauge_algebra import predict_caging
from abcage.lattice import SiteIndex, build_ideal_hamiltonian, parse_site, site_basis_index

from conftest import run_preset

UP2 = SiteIndex(2, "A", "up")
DN2 = SiteIndex(2, "A", "down")
CAGED = ["fig2a", "fig3a", "fig3b", "fig4b"]


def test_basis_state_probabilities():
    sp = site_probabilities(state_from_sites({UP2: 1}, 15), 15, 7)
    assert sp.probs[UP2] == 1
    assert sum(v for k, v in sp.probs.items() if k != UP2) == 0
    assert len(sp.probs) == 44
    assert sp.above_window == 0


def test_superposition_probabilities():
    psi = state_from_sites({DN2: 1 / np.sqrt(2), UP2: 1j / np.sqrt(2)}, 15)
    sp = site_probabilities(psi, 15, 7)
    assert sp.probs[UP2] == pytest.approx(0.5)
    assert sp.probs[DN2] == pytest.approx(0.5)


def test_mixed_state_probabilities():
    rho = np.zeros((96, 96), complex)
    for s in (UP2, DN2):
        rho[site_basis_index(s, 15), site_basis_index(s, 15)] = 0.5
    sp = site_probabilities(rho, 15, 7)
    assert sp.probs[UP2] == sp.probs[DN2] == 0.5
    assert sp.total == pytest.approx(1)


def test_above_window_bucket():
    psi = state_from_sites({"A_up_1": 0.6, "B_up_9": 0.8}, 15)
    sp = site_probabilities(psi, 15, 7)
    assert sp.above_window == pytest.approx(0.64)
    assert sp.total == pytest.approx(0.36)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        site_probabilities(np.zeros(10), 15, 7)
    with pytest.raises(DimensionMismatch):
        site_probabilities(np.zeros(96), 15, 20)


def test_rows_account_for_all_probability():
    _, traj = run_preset("fig2b")
    table = probability_table(traj, 7)
    assert table.shape == (201, 45)
    np.testing.assert_allclose(table.sum(axis=1), 1, atol=1e-6)


def test_cage_region():
    region = cage_region(2, 2, 1, 15)
    labels = {s.label for s in region}
    assert labels == {
        "A_up_1", "A_dn_1", "A_up_2", "A_dn_2",
        "B_up_0", "B_dn_0", "C_up_0", "C_dn_0",
        "B_up_1", "B_dn_1", "C_up_1", "C_dn_1",
        "B_up_2", "B_dn_2", "C_up_2", "C_dn_2",
    }


def test_fig2a_observed_sizes():
    cfg, traj = run_preset("fig2a")
    rep = observed_caging(traj, 2, 1e-4)
    assert (rep.observed_s_right, rep.observed_s_left, rep.observed_s) == (1, 2, 2)
    assert SiteIndex(0, "A", "up") not in rep.cage_sites


def test_fig4b_caged_size_one():
    _, traj = run_preset("fig4b")
    assert observed_caging(traj, 2).observed_s == 1


@pytest.mark.parametrize("name", ["fig2b", "fig4a"])
def test_spreading_presets_uncaged(name):
    _, traj = run_preset(name)
    rep = observed_caging(traj, 2)
    assert rep.observed_s_right is None
    assert not rep.caged


@pytest.mark.parametrize("name", CAGED)
def test_prediction_agrees_with_ideal_dynamics(name):
    cfg, traj = run_preset(name, mode="ideal")
    cell, chi = cfg.initial_spinor()
    pred = predict_caging(cfg.gauge, chi)
    rep = observed_caging(traj, cell, 1e-4, prediction=pred)
    assert (rep.observed_s_right, rep.observed_s_left) == (pred.s_right, pred.s_left)
    assert rep.max_leakage < 1e-8


@pytest.mark.parametrize("name", CAGED)
def test_epsilon_robustness(name):
    _, traj = run_preset(name, mode="ideal")
    reports = [observed_caging(traj, 2, eps) for eps in (1e-3, 1e-4, 1e-5)]
    assert len({(r.observed_s_right, r.observed_s_left) for r in reports}) == 1


@pytest.mark.parametrize("name", CAGED)
def test_larger_window_never_shrinks_sizes(name):
    _, traj = run_preset(name, mode="ideal")
    small = observed_caging(traj, 2, n_detect=5)
    big = observed_caging(traj, 2, n_detect=7)
    assert big.observed_s_right >= small.observed_s_right
    assert big.observed_s_left >= small.observed_s_left


def test_window_too_small():
    cfg = preset("fig2b", mode="ideal")
    h = build_ideal_hamiltonian(cfg.gauge, 15)
    traj = evolve_unitary(h, state_from_sites({"A_up_6": 1}, 15), np.linspace(0, 1, 51))
    with pytest.raises(WindowTooSmall):
        observed_caging(traj, 6)


def test_epsilon_bounds():
    _, traj = run_preset("fig2a")
    with pytest.raises(ValueError):
        observed_caging(traj, 2, 0.5)


def test_a_site_peaks_on_static_state():
    psi = state_from_sites({"A_up_3": 0.6, "A_dn_3": 0.8}, 15)
    traj = Trajectory(np.array([0.0]), psi[None, :], 15)
    peaks = a_site_peaks(traj, 7)
    assert peaks[3] == pytest.approx(1.0)
    assert peaks.sum() == pytest.approx(1.0)
