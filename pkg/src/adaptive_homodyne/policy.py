"""Local-oscillator phase rules.

Every rule here is vectorized: posteriors may be a single probability vector
of shape ``(K,)`` or a stack ``(N, K)`` of independent trajectories, and the
phase outputs follow the leading shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import Ensemble, weighted_quadrature_stats

TWO_PI = 2.0 * math.pi
KINDS = ("heterodyne", "wiseman", "lmmi", "fixed")

# Relative size of the Arg operand below which the LMMI phase is undefined.
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class PolicySpec:
    """Selector plus parameters for the local-oscillator phase rule.

    ``het_step`` is the heterodyne phase increment per step, ``initial_phase``
    the starting phase for Wiseman's rule, and ``fixed_phase`` the phase held
    by the ``fixed`` homodyne baseline.
    """

    kind: str = "lmmi"
    het_step: float = 0.1
    initial_phase: float = 0.0
    fixed_phase: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; choose from {KINDS}")
        if not self.het_step > 0:
            raise ValueError("heterodyne step must be > 0")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "het_step": self.het_step,
            "initial_phase": self.initial_phase,
            "fixed_phase": self.fixed_phase,
        }


def heterodyne_phase(step_index, step_size: float = 0.1):
    return np.mod(np.asarray(step_index) * step_size, TWO_PI)


def wiseman_phase(prev_phase, last_charge, t: float, dt: float | None = None):
    """Phase after one Wiseman update, ``prev + dQ / sqrt(t)``.

    At ``t = 0`` the rule divides by zero; with ``dt`` given the divisor is
    ``sqrt(max(t, dt))``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    denom = math.sqrt(max(t, dt) if dt is not None else t)
    if denom == 0.0:
        raise ZeroDivisionError("wiseman_phase at t = 0 needs dt")
    return prev_phase + np.asarray(last_charge) / denom


def lmmi_operand(posterior, ensemble: Ensemble):
    """``(var_x - var_y) + 2i cov_xy`` and the total variance, under ``posterior``."""
    vx, vy, cxy = weighted_quadrature_stats(np.asarray(posterior, dtype=float), ensemble.x, ensemble.y)
    return (vx - vy) + 2j * cxy, vx + vy


def lmmi_phase(posterior, ensemble: Ensemble, previous=0.0):
    """Phase in (-pi/2, pi/2] maximizing the projected dispersion.

    Where the posterior is rotationally symmetric (or a point mass) the
    maximizer is not unique and ``previous`` is returned instead.
    """
    z, total = lmmi_operand(posterior, ensemble)
    phase = 0.5 * np.angle(z)
    degenerate = np.abs(z) <= DEGENERACY_RTOL * total
    out = np.where(degenerate, previous, phase)
    return float(out) if np.ndim(out) == 0 else out


def dispersion_objective(posterior, ensemble: Ensemble, phase):
    """2 var_x cos^2 + 2 var_y sin^2 + 4 cov_xy sin cos at the given phase."""
    vx, vy, cxy = weighted_quadrature_stats(np.asarray(posterior, dtype=float), ensemble.x, ensemble.y)
    c, s = np.cos(phase), np.sin(phase)
    return 2 * vx * c * c + 2 * vy * s * s + 4 * cxy * s * c


def linearized_step_info(posterior, ensemble: Ensemble, phase, t: float, dt: float):
    """Small-signal mutual information of one step, in nats.

    ``Var_k[A_k] / (2 dt)`` with ``A_k = 2 exp(-t/2) Re[alpha_k exp(-i phase)] dt``.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    p = np.asarray(posterior, dtype=float)
    phase = np.asarray(phase, dtype=float)
    a = 2.0 * math.exp(-t / 2) * dt * (
        ensemble.x * np.cos(phase)[..., None] + ensemble.y * np.sin(phase)[..., None]
    )
    mean = np.sum(p * a, axis=-1, keepdims=True)
    var = np.sum(p * (a - mean) ** 2, axis=-1)
    out = var / (2.0 * dt)
    return float(out) if np.ndim(out) == 0 else out
