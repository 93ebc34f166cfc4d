"""
Tests for adjacency construction and reservoir simulation.
"""

import numpy as np
import pytest

from resmem.core.exceptions import (
    InsufficientDataError,
    InvalidInputError,
    InvalidMatrixError,
    InvalidSparsityError,
    ReservoirDivergedError,
)
from resmem.reservoir import (
    AdjacencyMatrix,
    ReservoirConfig,
    drive_linear,
    drive_multidim,
    drive_reservoir,
    drive_tanh,
    load_adjacency_csv,
    make_adjacency,
    rescale_spectral_radius,
    save_adjacency_csv,
    simulate,
    spectral_radius_of,
)
from resmem.signals import gaussian_noise


class TestAdjacency:
    """Test random adjacency matrices."""

    def test_spectral_radius(self):
        """Test the matrix is normalized to the requested radius."""
        A = make_adjacency(50, 0.3, 0.8, seed=1)
        assert spectral_radius_of(A.entries) == pytest.approx(0.8, rel=1e-10)
        assert A.spectral_radius == 0.8

    def test_occupied_count(self):
        """Test exactly round(eta_f * M^2) entries are nonzero."""
        A = make_adjacency(40, 0.25, seed=2)
        assert np.count_nonzero(A.entries) == 400
        assert A.eta_f == 0.25

    def test_rows_and_columns_covered(self):
        """Test every row and column has an entry at the sparsest allowed fraction."""
        A = make_adjacency(30, 1 / 30, seed=3)
        assert np.all(A.mask.any(axis=1))
        assert np.all(A.mask.any(axis=0))

    def test_deterministic(self):
        """Test the same seed gives the same matrix."""
        a = make_adjacency(20, 0.5, seed=11)
        b = make_adjacency(20, 0.5, seed=11)
        np.testing.assert_array_equal(a.entries, b.entries)

    def test_too_sparse_raises(self):
        """Test fewer than M entries is rejected."""
        with pytest.raises(InvalidSparsityError):
            make_adjacency(100, 0.005)

    def test_invalid_fraction_raises(self):
        """Test eta_f outside (0, 1] is rejected."""
        with pytest.raises(InvalidSparsityError):
            make_adjacency(10, 1.5)

    def test_entries_read_only(self):
        """Test the matrix cannot be modified in place."""
        A = make_adjacency(5, 1.0)
        with pytest.raises(ValueError):
            A.entries[0, 0] = 1.0

    def test_non_square_rejected(self):
        """Test non-square matrices are rejected."""
        with pytest.raises(InvalidMatrixError):
            AdjacencyMatrix(np.zeros((2, 3)), 0.0, 0.0)

    def test_rescale_same_radius_is_identity(self):
        """Test rescaling to the current radius leaves A unchanged."""
        A = make_adjacency(20, 0.5, 1.0, seed=4)
        np.testing.assert_array_equal(rescale_spectral_radius(A, 1.0).entries, A.entries)

    def test_rescale(self):
        """Test rescaling keeps the pattern and sets the radius."""
        A = make_adjacency(20, 0.5, 1.0, seed=4)
        B = rescale_spectral_radius(A, 0.5)
        assert spectral_radius_of(B.entries) == pytest.approx(0.5, rel=1e-10)
        np.testing.assert_array_equal(A.mask, B.mask)

    def test_rescale_zero_matrix_raises(self):
        """Test a zero matrix cannot be rescaled."""
        with pytest.raises(InvalidMatrixError):
            rescale_spectral_radius(AdjacencyMatrix.from_entries(np.zeros((3, 3))), 1.0)

    def test_csv_round_trip(self, tmp_path):
        """Test saving and loading preserves every entry exactly."""
        A = make_adjacency(12, 0.4, 0.9, seed=5)
        path = tmp_path / "matrix.csv"
        save_adjacency_csv(A, path)
        B = load_adjacency_csv(path)
        np.testing.assert_array_equal(A.entries, B.entries)
        assert B.eta_f == pytest.approx(A.eta_f)

    def test_two_nodes_half_full_is_permutation(self):
        """Test M = 2 at eta_f = 0.5 places one entry in each row and column."""
        for seed in range(10):
            A = make_adjacency(2, 0.5, seed=seed)
            assert np.count_nonzero(A.entries) == 2
            np.testing.assert_array_equal(A.mask.sum(axis=0), [1, 1])
            np.testing.assert_array_equal(A.mask.sum(axis=1), [1, 1])


class TestSimulation:
    """Test the tanh, multidimensional and linear reservoirs."""

    def test_zero_input_stays_at_origin(self, small_config, small_adjacency):
        """Test R(0) = 0 with no input stays at zero."""
        states, _ = simulate(small_config, small_adjacency, np.zeros(100))
        assert not np.any(states)

    def test_first_state(self, small_adjacency):
        """Test the first state is g tanh(eps s(0))."""
        config = ReservoirConfig(M=10, g=0.7, epsilon=0.3, washout=0, n_fit=5)
        s = np.array([0.5, 0.1, 0.2, 0.3, 0.4])
        traj = drive_tanh(config, small_adjacency, s)
        np.testing.assert_allclose(traj.states[0], 0.7 * np.tanh(0.3 * 0.5))

    def test_washout_alignment(self, small_config, small_adjacency):
        """Test row k of the trajectory is the state after input washout + k."""
        s = gaussian_noise(small_config.washout + small_config.n_fit, 0)
        states, _ = simulate(small_config, small_adjacency, s)
        traj = drive_tanh(small_config, small_adjacency, s)
        assert len(traj) == small_config.n_fit
        np.testing.assert_array_equal(traj.states, states[small_config.washout :])

    def test_states_bounded_by_g(self, small_config, small_adjacency):
        """Test tanh states never exceed g."""
        traj = drive_tanh(small_config, small_adjacency, gaussian_noise(2200, 1).values * 10)
        assert np.max(np.abs(traj.states)) <= small_config.g

    def test_short_drive_raises(self, small_config, small_adjacency):
        """Test drives shorter than washout + n_fit are rejected."""
        with pytest.raises(InsufficientDataError):
            drive_tanh(small_config, small_adjacency, np.zeros(100))

    def test_size_mismatch_raises(self, small_config):
        """Test the adjacency must match M."""
        with pytest.raises(InvalidInputError):
            drive_tanh(small_config, make_adjacency(5, 1.0), np.zeros(2200))

    def test_multidim_without_feedback_matches_tanh(self, small_config, small_adjacency):
        """Test d_e = 1 and b = 0 reduce to the plain tanh node."""
        s = gaussian_noise(2200, 2)
        config = small_config.model_copy(update={"delay_feedback": 0.0})
        plain = drive_tanh(config, small_adjacency, s)
        multi = drive_multidim(config, small_adjacency, s)
        np.testing.assert_array_equal(plain.states, multi.states)

    def test_multidim_delay_line(self, small_config, small_adjacency):
        """Test each delay component is the previous step's earlier component."""
        config = small_config.model_copy(update={"node_type": "multidim", "d_e": 3})
        traj = drive_reservoir(config, small_adjacency, gaussian_noise(2200, 3))
        M = config.M
        assert traj.states.shape == (config.n_fit, 3 * M)
        np.testing.assert_array_equal(traj.states[1:, M : 2 * M], traj.states[:-1, :M])
        np.testing.assert_array_equal(traj.states[1:, 2 * M :], traj.states[:-1, M : 2 * M])
        assert traj.first_components().states.shape == (config.n_fit, M)

    def test_dispatch_on_node_type(self, small_config, small_adjacency):
        """Test drive_reservoir honors node_type."""
        config = small_config.model_copy(update={"node_type": "multidim", "d_e": 2})
        assert drive_reservoir(config, small_adjacency, gaussian_noise(2200, 4)).d_e == 2
        assert config.state_dim == 20

    def test_linear_without_coupling(self, small_adjacency):
        """Test rho = 0 gives R(n+1) = W s(n)."""
        s = gaussian_noise(50, 5)
        traj = drive_linear(small_adjacency, 0.0, s, 40, washout=10)
        np.testing.assert_allclose(traj.states[:, 0], s.values[10:50])

    def test_linear_divergence(self):
        """Test an expanding linear reservoir raises."""
        A = AdjacencyMatrix.from_entries(np.eye(4))
        with pytest.raises(ReservoirDivergedError):
            drive_linear(A, 2.0, np.ones(200), 200)

    def test_linear_impulse_response(self):
        """Test a unit impulse gives R(n) = (rho A)^(n-1) W."""
        A = make_adjacency(6, 0.5, 1.0, seed=8)
        W = np.arange(1.0, 7.0)
        s = np.zeros(15)
        s[0] = 1.0
        traj = drive_linear(A, 0.8, s, 15, input_weights=W)
        expected = W.copy()
        for k in range(15):
            np.testing.assert_allclose(traj.states[k], expected, rtol=1e-12, atol=1e-15)
            expected = 0.8 * A.entries @ expected

    @pytest.mark.parametrize("drive", ["impulse", "noise"])
    def test_small_input_tanh_matches_linear(self, small_adjacency, drive):
        """Test tanh nodes with a tiny input follow the linear reservoir with rho = g."""
        g, eps = 0.6, 1e-6
        config = ReservoirConfig(M=10, g=g, epsilon=eps, washout=0, n_fit=20)
        if drive == "impulse":
            s = np.zeros(20)
            s[0] = 1.0
        else:
            s = gaussian_noise(20, 6).values
        tanh = drive_tanh(config, small_adjacency, s).states
        linear = drive_linear(small_adjacency, g, s, 20, input_weights=np.full(10, g * eps)).states
        scale = np.max(np.abs(linear))
        assert np.max(np.abs(tanh - linear)) / scale < 1e-3
        np.testing.assert_allclose(tanh / (g * eps), linear / (g * eps), rtol=1e-6, atol=1e-9)
