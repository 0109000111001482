"""Independent reference implementations used only by the tests.

These deliberately avoid the library's own numerical paths: the propagator
oracle is a plain fixed-step RK4 on da/dt = M a, and the entropy oracle
assembles the reduced density matrix explicitly and diagonalizes it.
"""

from __future__ import annotations

import numpy as np


def rk4_propagate(entries: np.ndarray, a0: np.ndarray, t_final: float, n_steps: int) -> np.ndarray:
    """Classical fixed-step RK4 integration of da/dt = M a up to t_final."""
    a = a0.astype(complex).copy()
    h = t_final / n_steps
    for _ in range(n_steps):
        k1 = entries @ a
        k2 = entries @ (a + 0.5 * h * k1)
        k3 = entries @ (a + 0.5 * h * k2)
        k4 = entries @ (a + h * k3)
        a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return a


def reduced_density_entropy(amplitudes: np.ndarray, cut: int) -> float:
    """Von Neumann entropy of the left block from the explicit reduced matrix.

    The full state is the single-excitation vector plus a vacuum weight
    1 - |a|^2; tracing out sites >= cut leaves a (cut+1)-dimensional block:
    one vacuum-like level carrying (1 - sum_{mu<cut} |a_mu|^2) and the pure
    left-amplitude outer product.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    left = amplitudes[:cut]
    rho = np.zeros((cut + 1, cut + 1), dtype=complex)
    rho[0, 0] = 1.0 - np.sum(np.abs(left) ** 2)
    rho[1:, 1:] = np.outer(left, np.conj(left))
    eigenvalues = np.linalg.eigvalsh(rho)
    eigenvalues = eigenvalues[eigenvalues > 1e-15]
    return float(-np.sum(eigenvalues * np.log(eigenvalues)))


def surmise_density(r: np.ndarray) -> np.ndarray:
    """GOE gap-ratio surmise density on [0, 1] (normalization 27/4)."""
    return 27.0 / 4.0 * (r + r**2) / (1.0 + r + r**2) ** 2.5


def random_config_params(rng: np.random.Generator, n_max: int = 40) -> dict:
    """Random well-posed system parameters covering zone/D/xi mixes."""
    n_total = int(rng.integers(2, n_max + 1))
    n_clean = int(rng.integers(0, n_total + 1))
    return dict(
        n_total=n_total,
        n_clean=n_clean,
        n_disordered=n_total - n_clean,
        xi=float(rng.uniform(0.0, np.pi)),
        directionality=float(rng.uniform(-0.9, 0.9)),
        disorder_strength=float(rng.uniform(0.0, 1.0)),
    )
