"""Batch Monte Carlo estimation of mutual information.

The mutual information between the source symbol and the full photocurrent
record is estimated as the sample mean of per-trajectory information gains,
with the symbol drawn from the ensemble priors.

Seeding: every trajectory gets two private streams (symbol choice and
measurement noise) whose seeds are derived from the master seed and the
trajectory index.  Trajectories are processed in fixed-size chunks keyed by
index, so outputs are bit-identical for any worker count.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ensemble import Ensemble, mean_photon_number
from .information import capacity_heterodyne, holevo_information, shannon_entropy
from .policy import KINDS, PolicySpec
from .trajectory import SimConfig, simulate_batch

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
CHUNK = 250


class Purpose(enum.IntEnum):
    NOISE = 0
    SYMBOL = 1


def splitmix64(x: int) -> int:
    """splitmix64 output finalizer; a bijection on 64-bit integers."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_stream_seed(master_seed: int, trajectory_index: int, purpose: Purpose) -> int:
    """64-bit seed for one (trajectory, purpose) stream.

    The counter ``2 * index + purpose + 1`` is spread by the odd golden-ratio
    increment and finalized with :func:`splitmix64`; both maps are injective
    modulo 2**64, so distinct pairs never collide under one master seed.
    """
    counter = 2 * int(trajectory_index) + int(purpose) + 1
    return splitmix64((int(master_seed) + counter * GOLDEN_GAMMA) & MASK64)


def policy_salted_seed(master_seed: int, policy: PolicySpec) -> int:
    """Master seed used when policies should see independent randomness."""
    salt = KINDS.index(policy.kind) + 1
    return splitmix64((int(master_seed) ^ (salt * GOLDEN_GAMMA)) & MASK64)


@dataclass(frozen=True)
class BatchStatistics:
    n_trajectories: int
    mean_gain: float
    std_gain: float | None
    ci_half_width: float | None
    per_symbol_means: list[float | None]
    per_symbol_counts: list[int]
    ensemble_label: str
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_trajectories": self.n_trajectories,
            "mean_gain": self.mean_gain,
            "std_gain": self.std_gain,
            "ci_half_width": self.ci_half_width,
            "per_symbol_means": self.per_symbol_means,
            "per_symbol_counts": self.per_symbol_counts,
            "ensemble_label": self.ensemble_label,
            "config": self.config,
        }

    def invariant_violations(self, prior_entropy: float) -> list[str]:
        """Statistical sanity checks; an empty list means all hold."""
        bad = []
        if self.std_gain is None:
            return bad
        if self.ci_half_width != 2.0 * self.std_gain / math.sqrt(self.n_trajectories):
            bad.append("ci_half_width != 2 std / sqrt(n)")
        slack = 5.0 * self.std_gain / math.sqrt(self.n_trajectories)
        if self.mean_gain < -slack:
            bad.append(f"mean gain {self.mean_gain} is significantly negative")
        if self.mean_gain > prior_entropy + slack:
            bad.append(f"mean gain {self.mean_gain} exceeds prior entropy {prior_entropy}")
        return bad


def draw_symbols(ensemble: Ensemble, seeds) -> np.ndarray:
    cdf = np.cumsum(ensemble.priors)
    cdf[-1] = 1.0
    u = np.array([np.random.default_rng(s).random() for s in seeds])
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(ensemble) - 1)


def _run_chunk(ensemble, policy, cfg, master, start, stop):
    indices = range(start, stop)
    true_idx = draw_symbols(ensemble, [derive_stream_seed(master, i, Purpose.SYMBOL) for i in indices])
    noise = np.stack([
        np.random.default_rng(derive_stream_seed(master, i, Purpose.NOISE)).standard_normal(cfg.n_steps)
        for i in indices
    ])
    return simulate_batch(ensemble, true_idx, policy, cfg, noise)


def simulate_many(
    ensemble: Ensemble,
    policy: PolicySpec,
    cfg: SimConfig,
    n_trajectories: int,
    workers: int = 1,
    crn: bool = False,
):
    """Run trajectories ``0..n-1`` and return the per-chunk batch results in order.

    With ``crn`` the same symbol and noise streams are reused for every
    policy; otherwise the streams are salted by policy kind.
    """
    if n_trajectories < 1:
        raise ValueError("need at least one trajectory")
    master = cfg.seed if crn else policy_salted_seed(cfg.seed, policy)
    bounds = [(s, min(s + CHUNK, n_trajectories)) for s in range(0, n_trajectories, CHUNK)]

    def job(b):
        return _run_chunk(ensemble, policy, cfg, master, *b)

    if workers <= 1:
        return [job(b) for b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, bounds))


def run_batch(
    ensemble: Ensemble,
    policy: PolicySpec,
    cfg: SimConfig,
    n_trajectories: int,
    workers: int = 1,
    crn: bool = False,
) -> BatchStatistics:
    """Estimate the mutual information of ``policy`` on ``ensemble``.

    A single trajectory gives no spread estimate; ``std_gain`` and
    ``ci_half_width`` are then ``None``.
    """
    chunks = simulate_many(ensemble, policy, cfg, n_trajectories, workers=workers, crn=crn)
    gains = np.concatenate([c.total_gain for c in chunks])
    symbols = np.concatenate([c.true_indices for c in chunks])

    mean = float(np.mean(gains))
    if n_trajectories >= 2:
        std = float(np.std(gains, ddof=1))
        half = 2.0 * std / math.sqrt(n_trajectories)
    else:
        std = half = None

    per_mean, per_count = [], []
    for k in range(len(ensemble)):
        sel = gains[symbols == k]
        per_count.append(int(sel.size))
        per_mean.append(float(sel.mean()) if sel.size else None)

    return BatchStatistics(
        n_trajectories=n_trajectories,
        mean_gain=mean,
        std_gain=std,
        ci_half_width=half,
        per_symbol_means=per_mean,
        per_symbol_counts=per_count,
        ensemble_label=ensemble.label,
        config={
            "sim": cfg.to_dict(),
            "policy": policy.to_dict(),
            "ensemble": ensemble.to_dict(),
            "crn": crn,
        },
    )


POLICY_ROWS = ("heterodyne", "wiseman", "lmmi")


@dataclass
class PolicyTable:
    """One ensemble's column of the policy comparison table."""

    label: str
    mean_photons: float
    i1: float
    holevo: float
    results: dict[str, BatchStatistics]

    def rows(self) -> list[tuple[str, float, float | None]]:
        out = [("<n>", self.mean_photons, None), ("I1(<n>)", self.i1, None), ("chi(E)", self.holevo, None)]
        for kind, st in self.results.items():
            out.append((f"I_{kind}", st.mean_gain, st.ci_half_width))
        return out

    def to_dict(self) -> dict:
        return {
            "ensemble": self.label,
            "mean_photon_number": self.mean_photons,
            "I1": self.i1,
            "holevo": self.holevo,
            "policies": {k: v.to_dict() for k, v in self.results.items()},
        }


def compare_policies(
    ensemble: Ensemble,
    cfg: SimConfig,
    n_trajectories: int,
    workers: int = 1,
    crn: bool = False,
    fock_nmax: int = 100,
    policies: dict[str, PolicySpec] | None = None,
) -> PolicyTable:
    if policies is None:
        policies = {kind: PolicySpec(kind) for kind in POLICY_ROWS}
    n = mean_photon_number(ensemble)
    results = {}
    for kind, spec in policies.items():
        log.info("running %s / %s with %d trajectories", ensemble.label, kind, n_trajectories)
        results[kind] = run_batch(ensemble, spec, cfg, n_trajectories, workers=workers, crn=crn)
    return PolicyTable(
        label=ensemble.label,
        mean_photons=n,
        i1=capacity_heterodyne(n),
        holevo=holevo_information(ensemble, fock_nmax),
        results=results,
    )


def prior_entropy(ensemble: Ensemble) -> float:
    return shannon_entropy(ensemble.priors)
