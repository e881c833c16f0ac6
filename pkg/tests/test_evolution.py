"""Master-equation integration and decay-rate fitting."""

import numpy as np
import pytest

from dfslab import (
    DensityMatrix,
    EvolutionResult,
    LOWERING,
    LindbladModel,
    StabilityError,
    collective_model,
    evolve,
    excitation_number,
    find_ipdfs,
    fit_decay_rate,
    line_config,
    pure_state,
    reduced_matrix,
)

AXIAL_QUARTER = 3.0 / (np.pi / 2.0) ** 3


def single_atom_model(rate=1.0):
    return LindbladModel(h_eff=np.zeros((2, 2)), jumps=((LOWERING, rate),))


def embedded_single_excitation(coeffs):
    """State vector sum_l coeffs[l] |one atom l excited>."""
    n = len(coeffs)
    psi = np.zeros(1 << n, dtype=complex)
    for l, c in enumerate(coeffs):
        psi[1 << (n - 1 - l)] = c
    return psi / np.linalg.norm(psi)


class TestEvolve:
    def test_ground_state_is_stationary(self):
        model = single_atom_model()
        res = evolve(model, pure_state([1.0, 0.0]), t_final=2.0, dt=1e-3)
        assert np.abs(res.excited_population).max() <= 1e-14
        assert np.abs(res.final_state.matrix - np.diag([1.0, 0.0])).max() <= 1e-12

    def test_single_atom_exponential_decay(self):
        model = single_atom_model()
        res = evolve(model, pure_state([0.0, 1.0]), t_final=1.0, dt=1e-3)
        assert abs(res.excited_population[-1] - np.exp(-1.0)) <= 1e-6
        assert np.abs(res.excited_population - np.exp(-res.times)).max() <= 1e-6

    def test_antisymmetric_pair_decays_at_subradiant_rate(self):
        config = line_config(2, 0.25, "axial")
        model = collective_model(config)
        psi = embedded_single_excitation([1.0, -1.0])
        res = evolve(model, pure_state(psi), t_final=3.0, dt=1e-3,
                     observable=excitation_number(2))
        rate = 1.0 - AXIAL_QUARTER
        expected = np.exp(-rate * res.times)
        assert np.abs(res.excited_population - expected).max() <= 1e-6

    def test_trace_preserved(self):
        config = line_config(3, 0.2, "transverse")
        model = collective_model(config)
        psi = embedded_single_excitation([1.0, 1.0, 1.0])
        res = evolve(model, pure_state(psi), t_final=5.0, dt=1e-3,
                     observable=excitation_number(3))
        assert res.trace_drift <= 1e-8

    def test_result_series_shape(self):
        res = evolve(single_atom_model(), pure_state([0.0, 1.0]), t_final=0.5, dt=1e-3)
        assert np.all(np.diff(res.times) > 0.0)
        assert len(res.times) == len(res.excited_population) == len(res.purity) == 501

    def test_positivity_monitored_through_run(self):
        config = line_config(2, 0.15, "axial")
        model = collective_model(config)
        psi = np.zeros(4)
        psi[3] = 1.0  # both atoms excited
        res = evolve(model, pure_state(psi), t_final=4.0, dt=1e-3,
                     observable=excitation_number(2), snapshot_stride=250)
        assert len(res.snapshots) >= 16
        for _t, rho in res.snapshots:
            assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -1e-7

    def test_kernel_state_is_frozen(self):
        model = collective_model(line_config(2, 0.25, "axial"))
        kernel = find_ipdfs(model)
        v = kernel.basis[:, 0]
        rho0 = pure_state(v)
        res = evolve(model, rho0, t_final=10.0, dt=1e-3,
                     observable=excitation_number(2))
        assert np.linalg.norm(res.final_state.matrix - rho0.matrix) <= 1e-7

    def test_rate_spectrum_agreement(self):
        # every reduced eigenstate decays at its eigenvalue (cross-module)
        config = line_config(3, 0.3, "axial")
        model = collective_model(config)
        w, v = np.linalg.eigh(reduced_matrix(config).entries)
        for i in range(3):
            mu = w[i]
            if mu <= 0.01:
                continue
            psi = embedded_single_excitation(v[:, i])
            t_final = min(1.2 / mu, 50.0)
            res = evolve(model, pure_state(psi), t_final=t_final, dt=1e-3,
                         observable=excitation_number(3))
            fitted = fit_decay_rate(res)
            assert abs(fitted - mu) <= 0.005 * mu

    def test_hamiltonian_term_active(self):
        # pure unitary evolution: Rabi oscillation of a driven two-level atom
        h = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        model = LindbladModel(h_eff=h, jumps=())
        res = evolve(model, pure_state([1.0, 0.0]), t_final=np.pi / 2.0, dt=1e-4,
                     observable=np.diag([0.0, 1.0]).astype(complex))
        # rho(t) = cos^2(t)|g><g| + ... : fully inverted at t = pi/2
        assert abs(res.excited_population[-1] - 1.0) <= 1e-8

    def test_stability_guard(self):
        model = single_atom_model(rate=10.0)
        with pytest.raises(StabilityError):
            evolve(model, pure_state([0.0, 1.0]), t_final=1.0, dt=0.01)

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            evolve(single_atom_model(), DensityMatrix(np.eye(4) / 4.0), t_final=1.0)


class TestFitDecayRate:
    def _result_from_series(self, times, pops):
        return EvolutionResult(
            times=times,
            excited_population=pops,
            purity=np.ones_like(times),
            trace_drift=0.0,
            final_state=DensityMatrix(np.diag([1.0, 0.0])),
        )

    def test_exact_exponential(self):
        t = np.linspace(0.0, 4.0, 2001)
        res = self._result_from_series(t, np.exp(-0.5 * t))
        assert abs(fit_decay_rate(res, window=(0.5, 3.5)) - 0.5) <= 1e-10

    def test_constant_population(self):
        t = np.linspace(0.0, 2.0, 101)
        res = self._result_from_series(t, np.full_like(t, 0.8))
        assert abs(fit_decay_rate(res, window=(0.0, 2.0))) <= 1e-12

    def test_single_atom_run(self):
        res = evolve(single_atom_model(), pure_state([0.0, 1.0]), t_final=1.2, dt=1e-3)
        assert abs(fit_decay_rate(res) - 1.0) <= 1e-4

    def test_rejects_nonpositive_window(self):
        t = np.linspace(0.0, 1.0, 11)
        pops = np.linspace(1.0, -0.1, 11)
        res = self._result_from_series(t, pops)
        with pytest.raises(ValueError):
            fit_decay_rate(res, window=(0.5, 1.0))

    def test_dark_population_returns_zero(self):
        t = np.linspace(0.0, 1.0, 11)
        res = self._result_from_series(t, np.zeros_like(t))
        assert fit_decay_rate(res) == 0.0
