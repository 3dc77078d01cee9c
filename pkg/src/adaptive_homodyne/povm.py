"""Squeezed-state POVM elements of completed trajectories.

Any homodyne measurement with a time-dependent local-oscillator phase has
POVM elements that are projectors onto pure squeezed states ``|alpha, xi>``.
They are fixed by two functionals of the record,

    A = sum dQ(t) exp(i phi(t) - t/2),
    B = -sum exp(2i phi(t)) * integral_t^{t+dt} exp(-s) ds,

via ``alpha = (A + B conj(A)) / (1 - |B|^2)`` and
``xi = -(B / |B|) artanh|B|``.  Integrating ``exp(-s)`` exactly over each
step (the phase is constant within a step) keeps ``|B| <= 1 - exp(-t_max)``;
a plain ``exp(-t) dt`` Riemann sum overshoots 1 by about ``dt/2`` for a
constant phase.

For plotting, each projector is drawn as the 1/e contour of its Wigner
function: an ellipse of semi-axes ``exp(+r)/2`` and ``exp(-r)/2`` with
``r = |xi|``, major axis at ``arg(xi)/2 + pi/2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import CoherentAmplitude, Ensemble
from .montecarlo import simulate_many
from .policy import PolicySpec
from .trajectory import SimConfig


@dataclass(frozen=True)
class PovmProjector:
    alpha: CoherentAmplitude
    xi: complex


@dataclass(frozen=True)
class WignerEllipse:
    center: tuple[float, float]
    semi_major: float
    semi_minor: float
    orientation: float
    xi: complex = 0j
    true_index: int = -1

    @property
    def aspect_ratio(self) -> float:
        return self.semi_major / self.semi_minor


def accumulate_ab(record, dt: float) -> tuple[complex, complex]:
    """Functionals ``(A, B)`` of a record of ``(t, phase, charge, ...)`` tuples."""
    a = 0j
    b = 0j
    weight = -math.expm1(-dt)
    for step in record:
        t, phi, dq = step[0], step[1], step[2]
        decay = math.exp(-t / 2)
        rot = complex(math.cos(phi), math.sin(phi))
        a += dq * decay * rot
        b -= decay * decay * weight * rot * rot
    return a, b


def projector_params(a: complex, b: complex) -> PovmProjector:
    a = complex(a)
    b = complex(b)
    mod_b = abs(b)
    if not mod_b < 1.0:
        raise ValueError(f"|B| = {mod_b} >= 1; no finite squeezing parameter")
    alpha = (a + b * a.conjugate()) / (1.0 - mod_b * mod_b)
    xi = 0j if mod_b == 0.0 else -(b / mod_b) * math.atanh(mod_b)
    return PovmProjector(CoherentAmplitude.from_complex(alpha), xi)


def wigner_ellipse(p: PovmProjector, true_index: int = -1) -> WignerEllipse:
    r = abs(p.xi)
    if not math.isfinite(r):
        raise ValueError("squeezing parameter must be finite")
    orientation = math.fmod(np.angle(p.xi) / 2 + math.pi / 2, math.pi)
    if orientation < 0:
        orientation += math.pi
    return WignerEllipse(
        center=(p.alpha.re, p.alpha.im),
        semi_major=0.5 * math.exp(r),
        semi_minor=0.5 * math.exp(-r),
        orientation=orientation,
        xi=p.xi,
        true_index=true_index,
    )


def sample_povm(
    ensemble: Ensemble,
    policy: PolicySpec,
    cfg: SimConfig,
    n_samples: int,
    workers: int = 1,
    crn: bool = False,
) -> list[WignerEllipse]:
    """Ellipses of ``n_samples`` projectors, sampled with trajectory probabilities."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    out = []
    for chunk in simulate_many(ensemble, policy, cfg, n_samples, workers=workers, crn=crn):
        for k, a, b in zip(chunk.true_indices, chunk.acc_a, chunk.acc_b):
            out.append(wigner_ellipse(projector_params(a, b), int(k)))
    return out


ELLIPSE_COLUMNS = ("x", "y", "semi_major", "semi_minor", "orientation_rad", "xi_abs", "xi_arg", "true_index")


def write_ellipses_csv(ellipses, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ELLIPSE_COLUMNS)
        for e in ellipses:
            writer.writerow([
                repr(e.center[0]), repr(e.center[1]), repr(e.semi_major), repr(e.semi_minor),
                repr(e.orientation), repr(abs(e.xi)), repr(float(np.angle(e.xi))), e.true_index,
            ])
