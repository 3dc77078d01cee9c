"""Adaptive homodyne quantum-trajectory engine.

One measurement step of length ``dt`` at time ``t`` with local-oscillator
phase ``phi`` yields the normalized photocharge

    dQ = 2 exp(-t/2) Re[alpha exp(-i phi)] dt + sqrt(dt) g,    g ~ N(0, 1),

for the true state ``alpha``.  The posterior over ensemble indices is updated
by Bayes' rule with the Gaussian likelihoods of every candidate state, and the
per-step entropy drop is accumulated as the information gain.  Alongside, the
engine accumulates the two record functionals that fix the POVM element of
the whole trajectory (see :mod:`adaptive_homodyne.povm`).

The vectorized :func:`simulate_batch` is the workhorse; the scalar helpers
exist for clarity and testing and share the same arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import Ensemble
from .information import shannon_entropy
from .policy import PolicySpec, heterodyne_phase, lmmi_phase


@dataclass(frozen=True)
class SimConfig:
    dt: float = 5e-3
    t_max: float = 10.0
    seed: int = 0
    log_record: bool = False

    def __post_init__(self) -> None:
        if not (self.dt > 0 and self.t_max > 0):
            raise ValueError("dt and t_max must be positive")
        ratio = self.t_max / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"t_max/dt = {ratio!r} is not an integer step count")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def to_dict(self) -> dict:
        return {"dt": self.dt, "t_max": self.t_max, "seed": self.seed, "log_record": self.log_record}


@dataclass
class TrajectoryResult:
    true_index: int
    total_gain: float
    final_posterior: np.ndarray
    projector_a: complex
    projector_b: complex
    initial_entropy: float = 0.0
    record: list | None = field(default=None, repr=False)


@dataclass
class BatchResult:
    """Per-trajectory outputs of :func:`simulate_batch`, indexed like the input."""

    true_indices: np.ndarray
    total_gain: np.ndarray
    initial_entropy: np.ndarray
    final_posterior: np.ndarray
    acc_a: np.ndarray
    acc_b: np.ndarray
    records: list | None = None


def expected_charge(alpha, phase, t, dt):
    """Mean photocharge ``2 exp(-t/2) Re[alpha exp(-i phase)] dt``."""
    alpha = np.asarray(alpha)
    proj = alpha.real * np.cos(phase) + alpha.imag * np.sin(phase)
    out = 2.0 * np.exp(-np.asarray(t) / 2.0) * proj * dt
    return float(out) if np.ndim(out) == 0 else out


def sample_photocharge(alpha, phase, t, dt, rng: np.random.Generator | None, size=None):
    """Draw ``expected_charge + sqrt(dt) * N(0, 1)``.

    Passing ``rng=None`` switches the noise off, which is handy in tests.
    """
    mean = expected_charge(alpha, phase, t, dt)
    if rng is None:
        return mean if size is None else np.full(size, mean)
    return mean + math.sqrt(dt) * rng.standard_normal(size)


def charge_means(ensemble: Ensemble, phase, t: float, dt: float) -> np.ndarray:
    """``A_k`` for every ensemble state; shape ``phase.shape + (K,)``."""
    phase = np.asarray(phase, dtype=float)[..., None]
    proj = ensemble.x * np.cos(phase) + ensemble.y * np.sin(phase)
    return (2.0 * math.exp(-t / 2.0) * dt) * proj


def bayes_update(posterior, charge, ensemble: Ensemble, phase, t: float, dt: float) -> np.ndarray:
    """Posterior after observing ``charge``.

    Only the k-dependent part of the Gaussian log-likelihood,
    ``(dQ A_k - A_k^2 / 2) / dt``, enters; the update is done in log space
    with the maximum subtracted so the normalizer is at least 1.
    """
    p = np.asarray(posterior, dtype=float)
    a = charge_means(ensemble, phase, t, dt)
    q = np.asarray(charge, dtype=float)[..., None]
    with np.errstate(divide="ignore"):
        logw = np.log(p) + (q * a - 0.5 * a * a) / dt
    logw -= np.max(logw, axis=-1, keepdims=True)
    w = np.exp(logw)
    norm = np.sum(w, axis=-1, keepdims=True)
    assert np.all(norm >= 1.0), "posterior normalizer underflowed"
    return w / norm


def info_gain(before, after):
    """Entropy reduction ``H(before) - H(after)`` in bits."""
    return shannon_entropy(before) - shannon_entropy(after)


def _initial_phase(policy: PolicySpec) -> float:
    if policy.kind == "wiseman":
        return policy.initial_phase
    if policy.kind == "fixed":
        return policy.fixed_phase
    return 0.0


def simulate_batch(
    ensemble: Ensemble,
    true_indices,
    policy: PolicySpec,
    cfg: SimConfig,
    noise: np.ndarray,
    record: bool = False,
) -> BatchResult:
    """Run ``N`` independent trajectories in lock-step.

    Parameters
    ----------
    true_indices : array of int, shape (N,)
        Ensemble index of the state actually prepared in each trajectory.
    noise : ndarray, shape (N, n_steps)
        Standard-normal draws; row ``i`` is consumed one entry per step by
        trajectory ``i`` whatever the policy.
    record : bool
        Keep ``(t, phi, dQ, posterior)`` for every step of every trajectory.

    Each trajectory only ever touches its own row, so results do not depend
    on how trajectories are grouped into batches.
    """
    idx = np.asarray(true_indices, dtype=int)
    n_traj = idx.shape[0]
    n_steps = cfg.n_steps
    dt = cfg.dt
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (n_traj, n_steps):
        raise ValueError(f"noise must have shape {(n_traj, n_steps)}, got {noise.shape}")
    k = len(ensemble)
    if np.any(idx < 0) or np.any(idx >= k):
        raise IndexError("true index out of range")

    true_x = ensemble.x[idx]
    true_y = ensemble.y[idx]
    sqrt_dt = math.sqrt(dt)
    b_weight = -math.expm1(-dt)

    post = np.broadcast_to(ensemble.priors, (n_traj, k)).copy()
    h0 = shannon_entropy(post)
    h = h0.copy()
    gain = np.zeros(n_traj)
    phase = np.full(n_traj, _initial_phase(policy))
    acc_a = np.zeros(n_traj, dtype=complex)
    acc_b = np.zeros(n_traj, dtype=complex)
    rec = [[] for _ in range(n_traj)] if record else None

    for j in range(n_steps):
        t = j * dt
        if policy.kind == "heterodyne":
            phase = np.full(n_traj, heterodyne_phase(j, policy.het_step))
        elif policy.kind == "lmmi":
            phase = lmmi_phase(post, ensemble, previous=phase)

        c, s = np.cos(phase), np.sin(phase)
        decay = math.exp(-t / 2.0)
        dq = 2.0 * decay * (true_x * c + true_y * s) * dt + sqrt_dt * noise[:, j]

        acc_a += dq * decay * (c + 1j * s)
        acc_b -= (decay * decay * b_weight) * ((c * c - s * s) + 2j * s * c)

        post = bayes_update(post, dq, ensemble, phase, t, dt)
        h_new = shannon_entropy(post)
        gain += h - h_new
        h = h_new

        if record:
            for i in range(n_traj):
                rec[i].append((t, float(phase[i]), float(dq[i]), post[i].copy()))

        if policy.kind == "wiseman":
            phase = phase + dq / math.sqrt(max(t, dt))

    return BatchResult(
        true_indices=idx,
        total_gain=gain,
        initial_entropy=h0,
        final_posterior=post,
        acc_a=acc_a,
        acc_b=acc_b,
        records=rec,
    )


def run_trajectory(
    ensemble: Ensemble,
    true_index: int,
    policy: PolicySpec,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> TrajectoryResult:
    """Simulate one complete measurement of state ``true_index``.

    ``rng`` defaults to a generator seeded from ``cfg.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    noise = rng.standard_normal((1, cfg.n_steps))
    out = simulate_batch(ensemble, [true_index], policy, cfg, noise, record=cfg.log_record)
    return TrajectoryResult(
        true_index=int(true_index),
        total_gain=float(out.total_gain[0]),
        final_posterior=out.final_posterior[0],
        projector_a=complex(out.acc_a[0]),
        projector_b=complex(out.acc_b[0]),
        initial_entropy=float(out.initial_entropy[0]),
        record=out.records[0] if out.records is not None else None,
    )


def write_record_csv(result: TrajectoryResult, path) -> None:
    """Dump a logged trajectory as CSV with columns t, phi, dQ, p_1..p_K."""
    import csv

    if result.record is None:
        raise ValueError("trajectory was run without log_record")
    k = len(result.final_posterior)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "phi", "dQ"] + [f"p_{i + 1}" for i in range(k)])
        for t, phi, dq, post in result.record:
            writer.writerow([repr(t), repr(phi), repr(dq)] + [repr(float(p)) for p in post])
