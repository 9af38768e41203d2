"""Dense spectral toolkit: eigensystem, GFT, projections, denoiser, responses."""

from __future__ import annotations

import numpy as np
import pytest

from giftplace import (
    CutoffOutOfRangeError,
    DegenerateSpectrumWarning,
    Region,
    SpectralBasis,
    TooLargeForDenseError,
    eigendecompose,
    eigenvector_placement,
    exact_denoise,
    filter_response,
    from_coo,
    gft,
    identity_minus,
    igft,
    ideal_lowpass,
    laplacian,
    normalized_augmented_adjacency,
    quadratic_wirelength,
    rayleigh_smoothness,
    taylor_gap,
)
from tests.conftest import random_connected_graph


def norm_laplacian(adj):
    return identity_minus(normalized_augmented_adjacency(adj, 0.0))


def path_graph(n):
    rows, cols = [], []
    for i in range(n - 1):
        rows += [i, i + 1]
        cols += [i + 1, i]
    return from_coo(n, rows, cols, np.ones(2 * (n - 1)))


class TestEigendecompose:
    def test_two_node_path(self):
        basis = eigendecompose(norm_laplacian(path_graph(2)))
        assert np.abs(basis.lambdas - np.array([0.0, 2.0])).max() < 1e-12

    def test_complete_graph_k3(self):
        adj = from_coo(3, [0, 1, 1, 2, 0, 2], [1, 0, 2, 1, 2, 0], np.ones(6))
        basis = eigendecompose(norm_laplacian(adj))
        assert np.abs(basis.lambdas - np.array([0.0, 1.5, 1.5])).max() < 1e-12

    def test_kernel_is_sqrt_degree(self, graph_rng):
        adj = random_connected_graph(30, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        assert abs(basis.lambdas[0]) < 1e-9
        u0 = basis.U[:, 0]
        expected = np.sqrt(adj.degrees)
        expected /= np.linalg.norm(expected)
        # sign-invariant comparison
        assert min(np.abs(u0 - expected).max(), np.abs(u0 + expected).max()) < 1e-8

    def test_orthonormal_and_ascending(self, graph_rng):
        adj = random_connected_graph(50, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        assert np.all(np.diff(basis.lambdas) >= -1e-12)
        assert np.abs(basis.U.T @ basis.U - np.eye(50)).max() < 1e-8

    def test_reconstruction(self, graph_rng):
        adj = random_connected_graph(40, graph_rng)
        lap = norm_laplacian(adj)
        basis = eigendecompose(lap)
        rebuilt = basis.U @ np.diag(basis.lambdas) @ basis.U.T
        assert np.abs(rebuilt - lap.to_dense()).max() < 1e-8

    def test_dense_guard(self, graph_rng):
        adj = random_connected_graph(20, graph_rng)
        with pytest.raises(TooLargeForDenseError):
            eigendecompose(adj, limit=10)

    def test_decomposition_is_timed(self, graph_rng):
        basis = eigendecompose(random_connected_graph(20, graph_rng))
        assert basis.seconds >= 0.0


class TestGft:
    def test_eigenvector_maps_to_basis_vector(self, graph_rng):
        adj = random_connected_graph(25, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        ghat = gft(basis, basis.U[:, 2])
        expected = np.zeros(25)
        expected[2] = 1.0
        assert min(np.abs(ghat - expected).max(), np.abs(ghat + expected).max()) < 1e-8

    def test_round_trip(self, graph_rng):
        adj = random_connected_graph(30, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        g = graph_rng.standard_normal((30, 2))
        assert np.abs(igft(basis, gft(basis, g)) - g).max() < 1e-8

    def test_parseval(self, graph_rng):
        adj = random_connected_graph(30, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        g = graph_rng.standard_normal(30)
        assert np.linalg.norm(gft(basis, g)) == pytest.approx(np.linalg.norm(g), abs=1e-8)


class TestIdealLowpass:
    def test_full_cutoff_is_identity(self, graph_rng):
        adj = random_connected_graph(20, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        g = graph_rng.standard_normal((20, 2))
        assert np.abs(ideal_lowpass(basis, g, 20) - g).max() < 1e-8

    def test_cutoff_one_is_rank_one(self, graph_rng):
        adj = random_connected_graph(20, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        g = graph_rng.standard_normal(20)
        out = ideal_lowpass(basis, g, 1)
        u0 = basis.U[:, 0]
        assert np.abs(out - u0 * (u0 @ g)).max() < 1e-10

    def test_idempotent(self, graph_rng):
        adj = random_connected_graph(20, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        g = graph_rng.standard_normal((20, 2))
        once = ideal_lowpass(basis, g, 7)
        assert np.abs(ideal_lowpass(basis, once, 7) - once).max() < 1e-10

    def test_never_roughens(self, graph_rng):
        adj = random_connected_graph(25, graph_rng)
        lap = laplacian(adj)
        basis = eigendecompose(norm_laplacian(adj))
        g = graph_rng.standard_normal((25, 2))
        # projection onto low modes of L-tilde cannot raise the L-tilde form;
        # check with the quadratic form of the same operator it projects in
        lt = norm_laplacian(adj)
        s_before = quadratic_wirelength_like(lt, g)
        s_after = quadratic_wirelength_like(lt, ideal_lowpass(basis, g, 5))
        assert s_after <= s_before + 1e-10
        assert lap.n == 25  # silence unused-variable lint

    def test_cutoff_bounds(self, graph_rng):
        adj = random_connected_graph(10, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        g = np.zeros(10)
        for bad in (0, 11):
            with pytest.raises(CutoffOutOfRangeError):
                ideal_lowpass(basis, g, bad)


def quadratic_wirelength_like(op, g):
    """x^T M x summed over columns, dense oracle form."""
    dense = op.to_dense()
    g = np.atleast_2d(np.asarray(g, dtype=float).T).T
    return float(sum(col @ dense @ col for col in g.T))


class TestEigenvectorPlacement:
    def test_path_order_recovered(self):
        basis = eigendecompose(norm_laplacian(path_graph(3)))
        g = eigenvector_placement(basis)
        x = g[:, 0]
        # u2 of P3 is the odd mode: monotone along the path (up to global sign)
        assert np.all(np.diff(x) > 0) or np.all(np.diff(x) < 0)

    def test_path_two_nodal_domains(self):
        # for longer paths the degree-normalized u2 need not be monotone,
        # but as the second mode it crosses zero exactly once
        basis = eigendecompose(norm_laplacian(path_graph(7)))
        x = eigenvector_placement(basis)[:, 0]
        signs = np.sign(x[np.abs(x) > 1e-12])
        assert int(np.count_nonzero(np.diff(signs) != 0)) == 1

    def test_columns_orthogonal(self, graph_rng):
        adj = random_connected_graph(30, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        g = eigenvector_placement(basis)
        assert abs(g[:, 0] @ g[:, 1]) < 1e-10

    def test_rescaled_into_region(self, graph_rng):
        adj = random_connected_graph(30, graph_rng)
        basis = eigendecompose(norm_laplacian(adj))
        region = Region(2.0, 3.0, 12.0, 9.0)
        g = eigenvector_placement(basis, region)
        assert g[:, 0].min() == pytest.approx(2.0) and g[:, 0].max() == pytest.approx(12.0)
        assert g[:, 1].min() == pytest.approx(3.0) and g[:, 1].max() == pytest.approx(9.0)

    def test_disconnected_graph_warns(self):
        # three disjoint edges = three components
        adj = from_coo(6, [0, 1, 2, 3, 4, 5], [1, 0, 3, 2, 5, 4], np.ones(6))
        basis = eigendecompose(norm_laplacian(adj))
        with pytest.warns(DegenerateSpectrumWarning):
            eigenvector_placement(basis)

    def test_too_small(self):
        basis = eigendecompose(norm_laplacian(path_graph(2)))
        with pytest.raises(ValueError):
            eigenvector_placement(basis)


class TestExactDenoise:
    def test_two_node_hand_solve(self):
        adj = from_coo(2, [0, 1], [1, 0], [1.0, 1.0])
        out = exact_denoise(laplacian(adj), np.array([0.0, 3.0]))
        assert np.abs(out - np.array([1.0, 2.0])).max() < 1e-12

    def test_constant_passes_through(self, graph_rng):
        adj = random_connected_graph(30, graph_rng)
        g = np.full((30, 2), 4.25)
        assert np.abs(exact_denoise(laplacian(adj), g) - g).max() < 1e-10

    def test_residual(self, graph_rng):
        adj = random_connected_graph(60, graph_rng)
        lap = laplacian(adj)
        g = graph_rng.standard_normal((60, 2)) * 5.0
        out = exact_denoise(lap, g)
        residual = out + lap.matmul(out) - g
        assert np.abs(residual).max() <= 1e-8

    def test_dense_guard(self, graph_rng):
        adj = random_connected_graph(30, graph_rng)
        with pytest.raises(TooLargeForDenseError):
            exact_denoise(laplacian(adj), np.zeros(30), limit=10)


class TestFilterResponse:
    def test_endpoints(self):
        resp = filter_response(2.0, 3, np.array([0.0, 1.0]))
        assert resp.samples[0] == (0.0, 1.0)
        assert resp.samples[1] == (1.0, 0.0)

    def test_halfway(self):
        resp = filter_response(4.0, 2, np.array([0.5]))
        assert resp.samples[0][1] == pytest.approx(0.25)

    def test_label_and_csv(self, tmp_path):
        resp = filter_response(4.0, 2, np.array([0.0, 0.5, 1.0]))
        assert resp.label == "sigma=4,k=2"
        path = tmp_path / "resp.csv"
        resp.write_csv(str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "lambda,h"
        assert len(lines) == 4

    def test_power_ordering_on_unit_interval(self, graph_rng):
        adj = random_connected_graph(40, graph_rng)
        basis = eigendecompose(identity_minus(normalized_augmented_adjacency(adj, 4.0)))
        lams = basis.lambdas[(basis.lambdas >= 0.0) & (basis.lambdas <= 1.0)]
        h1 = np.array([h for _, h in filter_response(4.0, 1, lams).samples])
        h2 = np.array([h for _, h in filter_response(4.0, 2, lams).samples])
        h4 = np.array([h for _, h in filter_response(4.0, 4, lams).samples])
        assert np.all(h4 <= h2 + 1e-12)
        assert np.all(h2 <= h1 + 1e-12)


class TestTaylorGap:
    def test_zero_at_origin(self):
        assert taylor_gap(0.0) == 0.0

    def test_value_at_one(self):
        assert taylor_gap(1.0) == pytest.approx(0.5)

    def test_closed_form(self):
        for lam in np.linspace(0.0, 2.0, 21):
            assert taylor_gap(float(lam)) == pytest.approx(lam * lam / (1.0 + lam), abs=1e-12)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            taylor_gap(-0.1)


class TestRayleighSpectralIdentities:
    def test_eigenvector_gives_eigenvalue(self, graph_rng):
        adj = random_connected_graph(35, graph_rng)
        lt = norm_laplacian(adj)
        basis = eigendecompose(lt)
        for i in (0, 1, 17, 34):
            r = rayleigh_smoothness(lt, basis.U[:, i], center=False)
            assert abs(r - basis.lambdas[i]) <= 1e-8

    def test_lower_mode_is_smoother(self, graph_rng):
        adj = random_connected_graph(35, graph_rng)
        lt = norm_laplacian(adj)
        basis = eigendecompose(lt)
        values = [rayleigh_smoothness(lt, basis.U[:, i], center=False) for i in range(35)]
        assert np.all(np.diff(values) >= -1e-8)


def test_spectral_basis_n():
    basis = SpectralBasis(lambdas=np.zeros(4), U=np.eye(4))
    assert basis.n == 4
