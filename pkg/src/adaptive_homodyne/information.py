"""Entropies, capacity bounds for bosonic channels, and Holevo information."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import entr

from .ensemble import Ensemble

LN2 = math.log(2.0)
NORM_CAPTURE = 1e-8
NEG_EIG_TOL = 1e-9


def shannon_entropy(p) -> np.ndarray | float:
    """Entropy in bits along the last axis; zero weights contribute nothing."""
    h = np.sum(entr(np.asarray(p, dtype=float)), axis=-1) / LN2
    return float(h) if np.ndim(h) == 0 else h


def _check_photons(n: float) -> float:
    n = float(n)
    if not n >= 0:
        raise ValueError(f"mean photon number must be >= 0, got {n}")
    return n


def capacity_heterodyne(n: float) -> float:
    """Heterodyne bound log2(1 + n)."""
    return math.log2(1.0 + _check_photons(n))


def capacity_homodyne_squeezed(n: float) -> float:
    """Squeezed-state homodyne bound log2(1 + 2n)."""
    return math.log2(1.0 + 2.0 * _check_photons(n))


def capacity_holevo_bound(n: float) -> float:
    """Number-state (thermal) bound log2(1 + n) + n log2(1 + 1/n); 0 at n = 0."""
    n = _check_photons(n)
    if n == 0.0:
        return 0.0
    return math.log1p(n) / LN2 + n * math.log1p(1.0 / n) / LN2


def coherent_fock_vector(alpha: complex, n_max: int) -> np.ndarray:
    """Fock coefficients of ``|alpha>`` for n = 0..n_max via c_{n+1} = c_n alpha / sqrt(n+1)."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    alpha = complex(alpha)
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(n_max):
        c[n + 1] = c[n] * alpha / math.sqrt(n + 1)
    return c


def density_matrix(e: Ensemble, n_max: int = 100) -> np.ndarray:
    """Truncated Fock-basis density matrix of the ensemble average state."""
    vecs = np.stack([coherent_fock_vector(a, n_max) for a in e.amplitudes])
    norms = np.sum(np.abs(vecs) ** 2, axis=1)
    short = norms < 1.0 - NORM_CAPTURE
    if np.any(short):
        worst = int(np.argmin(norms))
        raise ValueError(
            f"n_max={n_max} captures only {norms[worst]:.3e} of state {worst}; increase n_max"
        )
    rho = (vecs.T * e.priors) @ vecs.conj()
    return 0.5 * (rho + rho.conj().T)


def holevo_information(e: Ensemble, n_max: int = 100) -> float:
    """von Neumann entropy (bits) of the ensemble's average state."""
    lam = np.linalg.eigvalsh(density_matrix(e, n_max))
    if lam.min() < -NEG_EIG_TOL:
        raise ArithmeticError(f"density matrix has eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    return float(np.sum(entr(lam)) / LN2)


def bound_curves(n_values) -> list[tuple[float, float, float, float]]:
    """Rows ``(n, I1, I2, I3)`` for the three capacity bounds."""
    return [
        (float(n), capacity_heterodyne(n), capacity_homodyne_squeezed(n), capacity_holevo_bound(n))
        for n in n_values
    ]
