"""Pair couplings, reduced matrices, geometries, full-operator embedding."""

import numpy as np
import pytest

from dfslab import (
    AtomConfiguration,
    ReducedDecayMatrix,
    collective_model,
    check_nilpotent,
    decoherence_operator,
    excitation_number,
    find_ipdfs,
    full_gamma,
    gamma_coupling,
    line_config,
    reduced_embedding_report,
    reduced_matrix,
    ring_config,
    square_config,
)

from helpers import brute_force_gamma, random_configuration, random_unit

# independent scalar evaluations of the coupling at the special angles
AXIAL_QUARTER = 3.0 / (np.pi / 2.0) ** 3          # = 0.774036826396788
TRANSVERSE_HALF = -3.0 / (2.0 * np.pi ** 2)       # = -0.151981775463507

ZHAT = np.array([0.0, 0.0, 1.0])
XHAT = np.array([1.0, 0.0, 0.0])


class TestGammaCoupling:
    def test_axial_quarter_wavelength(self):
        val = gamma_coupling([0.0, 0.0, 0.25], ZHAT)
        assert abs(val - AXIAL_QUARTER) <= 1e-12

    def test_transverse_half_wavelength(self):
        # sin(pi) = 0 and cos(pi) = -1 by hand: (3/2)(-1/pi^2)
        val = gamma_coupling([0.0, 0.0, 0.5], XHAT)
        assert abs(val - TRANSVERSE_HALF) <= 1e-12

    def test_colocation_limit_by_numerical_convergence(self):
        # evaluate at shrinking separations and confirm convergence to 1;
        # Taylor oracle for the axial case: 1 - u^2/10 + O(u^4)
        errors = []
        for r in (1e-3, 1e-4, 1e-5):
            val = gamma_coupling([0.0, 0.0, r], ZHAT)
            u = 2.0 * np.pi * r
            errors.append(abs(val - 1.0))
            assert abs((1.0 - val) - u * u / 10.0) <= 1e-3 * u * u / 10.0
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] <= 1e-8

    def test_exact_at_colocation(self):
        assert gamma_coupling([0.0, 0.0, 1e-9], ZHAT) == 1.0
        assert gamma_coupling([0.0, 0.0, 0.0], XHAT) == 1.0

    def test_parity(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            sep = rng.uniform(-2, 2, 3)
            dip = random_unit(rng)
            assert gamma_coupling(sep, dip) == gamma_coupling(-sep, dip)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            sep = rng.uniform(-2, 2, 3)
            dip = random_unit(rng)
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            rotated = gamma_coupling(q @ sep, q @ dip)
            assert abs(rotated - gamma_coupling(sep, dip)) <= 1e-12

    def test_bounded_by_one(self):
        rng = np.random.default_rng(14)
        for _ in range(200):
            sep = rng.uniform(-3, 3, 3)
            if np.linalg.norm(sep) < 1e-6:
                continue
            assert abs(gamma_coupling(sep, random_unit(rng))) <= 1.0 + 1e-9

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            gamma_coupling([np.inf, 0.0, 0.0], ZHAT)
        with pytest.raises(ValueError):
            gamma_coupling([1.0, 0.0, 0.0], [0.0, 0.0, 0.0])


class TestReducedMatrix:
    def test_two_atom_closed_form(self):
        rm = reduced_matrix(line_config(2, 0.25, "axial"))
        expected = np.array([[1.0, AXIAL_QUARTER], [AXIAL_QUARTER, 1.0]])
        assert np.abs(rm.entries - expected).max() <= 1e-12
        eig = np.linalg.eigvalsh(rm.entries)
        assert abs(eig[0] - (1.0 - AXIAL_QUARTER)) <= 1e-12
        assert abs(eig[1] - (1.0 + AXIAL_QUARTER)) <= 1e-12

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_dicke_flag_gives_all_ones(self, n):
        rm = reduced_matrix(line_config(n, 0.25, dicke=True))
        assert np.array_equal(rm.entries, np.ones((n, n)))
        eig = np.linalg.eigvalsh(rm.entries)
        assert abs(eig[-1] - n) <= 1e-12
        assert np.abs(eig[:-1]).max() <= 1e-12

    def test_isolated_atoms_approach_identity(self):
        rm = reduced_matrix(line_config(2, 1e5, "axial"))
        assert np.abs(rm.entries - np.eye(2)).max() <= 1e-4
        assert np.abs(np.linalg.eigvalsh(rm.entries) - 1.0).max() <= 1e-4

    def test_positive_semidefinite_random_configurations(self):
        rng = np.random.default_rng(100)
        for _ in range(200):
            config = random_configuration(rng, int(rng.integers(2, 9)), min_sep=0.05)
            rm = reduced_matrix(config)
            assert np.linalg.eigvalsh(rm.entries).min() >= -1e-10

    def test_validation_rejects_bad_matrices(self):
        with pytest.raises(ValueError):
            ReducedDecayMatrix(np.array([[1.0, 0.2], [0.3, 1.0]]))  # asymmetric
        with pytest.raises(ValueError):
            ReducedDecayMatrix(np.array([[1.0, 2.0], [2.0, 1.0]]))  # |off| > 1
        with pytest.raises(ValueError):
            ReducedDecayMatrix(np.array([[0.9, 0.0], [0.0, 1.0]]))  # diagonal != 1

    def test_coincident_atoms_require_dicke_flag(self):
        with pytest.raises(ValueError):
            AtomConfiguration([(0, 0, 0), (0, 0, 0)], ZHAT)
        cfg = AtomConfiguration([(0, 0, 0), (0, 0, 0)], ZHAT, dicke=True)
        assert reduced_matrix(cfg).n == 2


class TestFullGamma:
    def test_single_atom(self):
        cfg = AtomConfiguration([(0.0, 0.0, 0.0)], ZHAT, gamma0=1.3)
        assert np.allclose(full_gamma(cfg), np.diag([0.0, 1.3]), atol=1e-15)

    def test_dicke_pair_spectrum(self):
        cfg = line_config(2, 0.1, dicke=True)
        eig = np.linalg.eigvalsh(full_gamma(cfg))
        assert np.allclose(eig, [0.0, 0.0, 2.0, 2.0], atol=1e-12)

    def test_quarter_wave_pair_spectrum(self):
        # hand diagonalization in the 4-dim basis: the doubly excited state
        # keeps eigenvalue 2 because the cross terms annihilate it
        cfg = line_config(2, 0.25, "axial")
        eig = np.linalg.eigvalsh(full_gamma(cfg))
        expected = [0.0, 1.0 - AXIAL_QUARTER, 1.0 + AXIAL_QUARTER, 2.0]
        assert np.abs(eig - expected).max() <= 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matches_embedded_operator_sum(self, n):
        rng = np.random.default_rng(n)
        config = random_configuration(rng, n, min_sep=0.1)
        assert np.abs(full_gamma(config) - brute_force_gamma(config)).max() <= 1e-12

    def test_ground_state_in_kernel_and_psd(self):
        rng = np.random.default_rng(77)
        for _ in range(5):
            config = random_configuration(rng, 3, min_sep=0.08)
            gamma = full_gamma(config)
            assert np.abs(gamma[:, 0]).max() == 0.0  # lowering kills |g...g>
            floor = -1e-10 * np.linalg.norm(gamma)
            assert np.linalg.eigvalsh(gamma).min() >= floor

    def test_n_cap(self):
        cfg = line_config(15, 0.3)
        with pytest.raises(ValueError):
            full_gamma(cfg)


class TestCollectiveModel:
    def test_reconstructs_full_gamma(self):
        rng = np.random.default_rng(55)
        for n in (2, 3, 4):
            config = random_configuration(rng, n, min_sep=0.1)
            model = collective_model(config)
            rebuilt = decoherence_operator(model)
            target = full_gamma(config)
            assert np.abs(rebuilt - target).max() <= 1e-12 * max(1.0, np.abs(target).max())

    def test_jumps_are_nilpotent_with_positive_rates(self):
        config = line_config(3, 0.2, "transverse")
        model = collective_model(config)
        assert len(model.jumps) == 3
        for op, rate in model.jumps:
            assert rate > 0.0
            assert check_nilpotent(op)

    def test_dicke_pair_keeps_single_mode(self):
        model = collective_model(line_config(2, 0.1, dicke=True))
        assert len(model.jumps) == 1
        assert abs(model.jumps[0][1] - 2.0) <= 1e-12

    def test_unweighted_jump_square_sum_is_excitation_number(self):
        # with no dropped mode, sum_m J_m† J_m equals the number operator
        config = line_config(3, 0.3, "axial")
        model = collective_model(config)
        total = sum(op.conj().T @ op for op, _ in model.jumps)
        assert np.abs(total - excitation_number(3)).max() <= 1e-12


class TestGeometries:
    def test_line_positions_and_dipoles(self):
        cfg = line_config(3, 0.4, "axial")
        assert np.allclose(cfg.positions[:, 2], [0.0, 0.4, 0.8])
        assert np.array_equal(cfg.dipole, ZHAT)
        assert np.array_equal(line_config(2, 0.4, "transverse").dipole, XHAT)

    def test_single_atom_line(self):
        rm = reduced_matrix(line_config(1, 0.5))
        assert np.array_equal(rm.entries, np.eye(1))

    def test_square_distance_multiset(self):
        cfg = square_config(0.25)
        dists = sorted(
            np.linalg.norm(cfg.positions[j] - cfg.positions[k])
            for j in range(4) for k in range(j + 1, 4)
        )
        expected = sorted([0.25] * 4 + [0.25 * np.sqrt(2.0)] * 2)
        assert np.allclose(dists, expected, atol=1e-15)

    def test_square_has_three_distinct_couplings(self):
        # enumerate the six pairs: two side orientations relative to the
        # dipole plus the diagonals
        rm = reduced_matrix(square_config(0.25)).entries
        offs = {round(rm[j, k], 12) for j in range(4) for k in range(j + 1, 4)}
        assert len(offs) == 3

    def test_square_dicke_limit(self):
        rm = reduced_matrix(square_config(0.25, dicke=True))
        assert np.array_equal(rm.entries, np.ones((4, 4)))

    def test_ring_of_four_is_square(self):
        ring = ring_config(4, 0.3)
        square = square_config(0.3 * np.sqrt(2.0))
        ring_d = sorted(
            np.linalg.norm(ring.positions[j] - ring.positions[k])
            for j in range(4) for k in range(j + 1, 4)
        )
        square_d = sorted(
            np.linalg.norm(square.positions[j] - square.positions[k])
            for j in range(4) for k in range(j + 1, 4)
        )
        assert np.allclose(ring_d, square_d, atol=1e-12)

    def test_ring_fourteen_minimum_distance(self):
        cfg = ring_config(14, 1.0)
        dists = [
            np.linalg.norm(cfg.positions[j] - cfg.positions[k])
            for j in range(14) for k in range(j + 1, 14)
        ]
        expected = 2.0 * np.sin(np.pi / 14.0)  # 0.4450
        assert abs(min(dists) - expected) <= 1e-12
        assert abs(expected - 0.445) <= 5e-4

    def test_two_atom_ring_is_a_diameter(self):
        cfg = ring_config(2, 0.7)
        assert abs(np.linalg.norm(cfg.positions[0] - cfg.positions[1]) - 1.4) <= 1e-12

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            line_config(0, 0.2)
        with pytest.raises(ValueError):
            line_config(2, -0.1)
        with pytest.raises(ValueError):
            square_config(0.0)
        with pytest.raises(ValueError):
            ring_config(1, 0.5)
        with pytest.raises(ValueError):
            line_config(2, 0.3, "diagonal")


class TestConfigurationValidation:
    def test_dipole_must_be_unit(self):
        with pytest.raises(ValueError):
            AtomConfiguration([(0, 0, 0)], [0.0, 0.0, 2.0])

    def test_gamma0_positive(self):
        with pytest.raises(ValueError):
            AtomConfiguration([(0, 0, 0)], ZHAT, gamma0=0.0)

    def test_immutability(self):
        cfg = line_config(2, 0.25)
        with pytest.raises(ValueError):
            cfg.positions[0, 0] = 1.0


class TestEmbeddingReport:
    def test_two_atom_any_geometry(self):
        # both derived families coincide with the same manifold for N = 2
        rng = np.random.default_rng(60)
        for _ in range(5):
            config = random_configuration(rng, 2, min_sep=0.1)
            report = reduced_embedding_report(config, tol=1e-9)
            assert report.passed

    def test_triangle_normal_dipole(self):
        s = 0.3
        positions = [(0.0, 0.0, 0.0), (s, 0.0, 0.0), (s / 2.0, s * np.sqrt(3.0) / 2.0, 0.0)]
        config = AtomConfiguration(positions, ZHAT)
        report = reduced_embedding_report(config, tol=1e-9)
        assert report.passed
        assert report.single_excitation_residuals.max() <= 1e-9
        assert report.complement_residuals.max() <= 1e-9

    def test_four_atom_line_inclusion(self):
        # all 8 predicted values appear inside the 16-value full spectrum
        config = line_config(4, 0.25, "axial")
        report = reduced_embedding_report(config, tol=1e-9)
        assert report.passed
        assert report.reduced_eigenvalues.shape == (4,)
        assert report.single_excitation_distances.max() <= 1e-9
        assert report.complement_distances.max() <= 1e-9

    def test_inclusion_is_strict_for_two_atoms(self):
        # the full spectrum holds 2 gamma0 (doubly excited state), which is
        # outside both reduced-derived families at generic separation
        config = line_config(2, 0.25, "axial")
        full_spectrum = np.linalg.eigvalsh(full_gamma(config))
        lam = np.linalg.eigvalsh(reduced_matrix(config).entries)
        families = set(np.round(np.concatenate([lam, lam]), 9))  # N-2+lam = lam here
        assert 2.0 in set(np.round(full_spectrum, 9)) - families


class TestDickeKernelGrowth:
    @pytest.mark.parametrize("n,expected_kernel", [(2, 2), (3, 3)])
    def test_multi_atom_kernel_at_colocation(self, n, expected_kernel):
        # co-location is exactly where a multi-atom protected subspace opens
        # up; ker(collective lowering) has dimension C(N, floor(N/2))
        model = collective_model(line_config(n, 0.25, dicke=True))
        report = find_ipdfs(model)
        assert report.kernel_dim == expected_kernel

    def test_separated_atoms_have_trivial_kernel(self):
        for n in (2, 3):
            model = collective_model(line_config(n, 0.25, "axial"))
            assert find_ipdfs(model).kernel_dim == 1
