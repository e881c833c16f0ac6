"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from dfslab import AtomConfiguration, LindbladModel, embed_lowering


def random_positions(rng: np.random.Generator, n: int, min_sep: float = 0.05,
                     box: float = 1.5) -> np.ndarray:
    """Uniform positions in a box, resampled until pairwise separated."""
    pos = rng.uniform(-box, box, (n, 3))
    for _ in range(10_000):
        clash = False
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(pos[i] - pos[j]) < min_sep:
                    pos[j] = rng.uniform(-box, box, 3)
                    clash = True
        if not clash:
            return pos
    raise RuntimeError("could not separate positions")


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_configuration(rng: np.random.Generator, n: int, min_sep: float = 0.05,
                         box: float = 1.5) -> AtomConfiguration:
    return AtomConfiguration(random_positions(rng, n, min_sep, box), random_unit(rng))


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_lowering_model(rng: np.random.Generator, n_atoms: int,
                          n_jumps: int = 2) -> LindbladModel:
    """Model whose jumps are random combinations of single-atom lowerings."""
    dim = 1 << n_atoms
    lowerings = [embed_lowering(j, n_atoms) for j in range(1, n_atoms + 1)]
    jumps = []
    for _ in range(n_jumps):
        coeff = rng.normal(size=n_atoms) + 1j * rng.normal(size=n_atoms)
        op = sum(c * low for c, low in zip(coeff, lowerings))
        jumps.append((op, float(rng.uniform(0.2, 2.0))))
    return LindbladModel(h_eff=np.zeros((dim, dim)), jumps=tuple(jumps))


def brute_force_gamma(config: AtomConfiguration) -> np.ndarray:
    """Independent full decoherence operator: explicit embedded-operator sum."""
    from dfslab import dagger, reduced_matrix

    n = config.n
    g = reduced_matrix(config).entries
    ops = [embed_lowering(j, n) for j in range(1, n + 1)]
    total = np.zeros((1 << n, 1 << n), dtype=complex)
    for j in range(n):
        for k in range(n):
            total += config.gamma0 * g[j, k] * (dagger(ops[j]) @ ops[k])
    return total
