"""Coherent-state ensembles and their phase-space statistics.

An ensemble is an ordered list of ``(prior, amplitude)`` pairs.  The index of
an entry identifies the source symbol everywhere downstream, so the builders
below fix a canonical order:

* PSK: increasing phase, ``k = 1..m``.
* 16QAM: row-major starting at ``(-1.5, -1.5)``, real part varying fastest.
* STAR: vacuum first, then the three lobes by phase, amplitude ascending.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PRIOR_TOL = 1e-12
WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class CoherentAmplitude:
    """Complex amplitude of a coherent state, stored as (X, Y) quadratures."""

    re: float
    im: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"amplitude must be finite, got ({self.re}, {self.im})")

    @classmethod
    def from_complex(cls, z: complex) -> CoherentAmplitude:
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @property
    def photon_number(self) -> float:
        return self.re * self.re + self.im * self.im


@dataclass(frozen=True)
class QuadratureStats:
    var_x: float
    var_y: float
    cov_xy: float


@dataclass(frozen=True)
class Ensemble:
    """Immutable weighted list of coherent states.

    Parameters
    ----------
    entries : tuple of (float, CoherentAmplitude)
        ``(prior, amplitude)`` pairs; priors must be non-negative and sum to 1.
    label : str
        Human-readable name used in reports.
    """

    entries: tuple[tuple[float, CoherentAmplitude], ...]
    label: str = "custom"

    def __post_init__(self) -> None:
        entries = tuple(
            (float(p), a if isinstance(a, CoherentAmplitude) else CoherentAmplitude.from_complex(a))
            for p, a in self.entries
        )
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("ensemble needs at least one entry")
        priors = [p for p, _ in entries]
        if any(not math.isfinite(p) or p < 0 for p in priors):
            raise ValueError("priors must be finite and non-negative")
        if abs(math.fsum(priors) - 1.0) > PRIOR_TOL:
            raise ValueError(f"priors sum to {math.fsum(priors)!r}, expected 1")

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def priors(self) -> np.ndarray:
        p = np.array([p for p, _ in self.entries], dtype=float)
        p.setflags(write=False)
        return p

    @cached_property
    def amplitudes(self) -> np.ndarray:
        a = np.array([complex(a) for _, a in self.entries], dtype=complex)
        a.setflags(write=False)
        return a

    @property
    def x(self) -> np.ndarray:
        return self.amplitudes.real

    @property
    def y(self) -> np.ndarray:
        return self.amplitudes.imag

    def rotated(self, theta: float) -> Ensemble:
        """Return a copy with every amplitude multiplied by ``exp(i*theta)``."""
        rot = complex(math.cos(theta), math.sin(theta))
        return Ensemble(
            tuple((p, CoherentAmplitude.from_complex(complex(a) * rot)) for p, a in self.entries),
            label=self.label,
        )

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "entries": [{"p": p, "re": a.re, "im": a.im} for p, a in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Ensemble:
        try:
            label = str(data.get("label", "custom"))
            raw = data["entries"]
            entries = tuple(
                (float(e["p"]), CoherentAmplitude(float(e["re"]), float(e.get("im", 0.0))))
                for e in raw
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed ensemble definition: {exc}") from exc
        return cls(entries, label=label)


def from_amplitudes(
    amplitudes: Iterable[complex], priors: Sequence[float] | None = None, label: str = "custom"
) -> Ensemble:
    amps = [complex(a) for a in amplitudes]
    if priors is None:
        priors = [1.0 / len(amps)] * len(amps)
    if len(priors) != len(amps):
        raise ValueError("priors and amplitudes differ in length")
    return Ensemble(
        tuple((float(p), CoherentAmplitude.from_complex(a)) for p, a in zip(priors, amps)),
        label=label,
    )


def make_psk(m: int, amplitude: float) -> Ensemble:
    """``m`` equiprobable states ``amplitude * exp(2 pi i k / m)``, ``k = 1..m``."""
    if m < 1:
        raise ValueError("PSK order must be >= 1")
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    amps = [amplitude * complex(math.cos(2 * math.pi * k / m), math.sin(2 * math.pi * k / m))
            for k in range(1, m + 1)]
    return from_amplitudes(amps, label=f"{m}psk")


def make_qam16() -> Ensemble:
    levels = (-1.5, -0.5, 0.5, 1.5)
    amps = [complex(x, y) for y in levels for x in levels]
    return from_amplitudes(amps, label="16qam")


def make_star() -> Ensemble:
    """Vacuum plus amplitudes 1, 2, 3 on each of three lobes at 0, 2pi/3, 4pi/3."""
    amps = [0j]
    for lobe in range(3):
        phase = 2 * math.pi * lobe / 3
        rot = complex(math.cos(phase), math.sin(phase))
        amps.extend(r * rot for r in (1, 2, 3))
    return from_amplitudes(amps, label="star")


BUILTINS = {
    "8psk": lambda: make_psk(8, math.sqrt(2.0)),
    "16qam": make_qam16,
    "star": make_star,
}


def builtin(name: str) -> Ensemble:
    try:
        return BUILTINS[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown ensemble {name!r}; choose from {sorted(BUILTINS)}") from None


def load_ensemble(path: str | Path) -> Ensemble:
    """Read an ensemble definition file (``{"label", "entries": [{"p","re","im"}]}``)."""
    with open(path, encoding="utf-8") as fh:
        return Ensemble.from_dict(json.load(fh))


def save_ensemble(ensemble: Ensemble, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ensemble.to_dict(), fh, indent=2)
        fh.write("\n")


def resolve(source: str) -> Ensemble:
    """Builtin name (``8psk``, ``16qam``, ``star``) or path to a JSON definition."""
    if source.lower() in BUILTINS:
        return builtin(source)
    path = Path(source)
    if not path.is_file():
        raise FileNotFoundError(f"no builtin ensemble or file named {source!r}")
    return load_ensemble(path)


def mean_photon_number(e: Ensemble) -> float:
    return float(np.dot(e.priors, np.abs(e.amplitudes) ** 2))


def weighted_quadrature_stats(weights: np.ndarray, x: np.ndarray, y: np.ndarray):
    """Variances and covariance of (X, Y) under ``weights`` along the last axis.

    Works on a single weight vector or a stack of them; centred sums keep the
    result accurate for nearly collapsed posteriors.
    """
    mx = np.sum(weights * x, axis=-1, keepdims=True)
    my = np.sum(weights * y, axis=-1, keepdims=True)
    dx = x - mx
    dy = y - my
    var_x = np.sum(weights * dx * dx, axis=-1)
    var_y = np.sum(weights * dy * dy, axis=-1)
    cov_xy = np.sum(weights * dx * dy, axis=-1)
    return var_x, var_y, cov_xy


def quadrature_stats(entries: Sequence[tuple[float, CoherentAmplitude | complex]]) -> QuadratureStats:
    w = np.array([p for p, _ in entries], dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ValueError("weights must be non-negative and sum to 1")
    z = np.array([complex(a) for _, a in entries])
    vx, vy, cxy = weighted_quadrature_stats(w, z.real, z.imag)
    return QuadratureStats(float(vx), float(vy), float(cxy))
