"""Inversion of the phase-stepping measurement.

With I_n the recorded frames and alpha_n = 2 pi n / N,

    C = sum_n I_n cos(alpha_n),   S = sum_n I_n sin(alpha_n),

the closed-form expansion of the forward model gives
C - C0 = N |K| u cos(phi - mu) and S = N |K| u sin(phi - mu) with
C0 = -N |K|^2, so the wavefront phase follows from arctan2(S, C - C0).
"""

from dataclasses import dataclass

import numpy as np

from .circular import wrap
from .errors import EstimationError, ShapeError
from .forward import InterferogramSet


@dataclass(frozen=True)
class ReconstructionResult:
    """Recovered phase map (wrapped to (-pi, pi]) and amplitude map
    (sqrt of frame 0, in sqrt photons)."""

    phase: np.ndarray
    amplitude: np.ndarray
    c0_used: float
    mu_used: float

    def __post_init__(self):
        if self.phase.shape != self.amplitude.shape:
            raise ShapeError("phase and amplitude maps differ in shape")


def _harmonic_weights(alphas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # cos/sin at exact multiples of pi/2 are analytically 0 or +-1; snap the
    # float residue so cancellations (e.g. identical frames) are exact
    cos_w, sin_w = np.cos(alphas), np.sin(alphas)
    for w in (cos_w, sin_w):
        w[np.abs(w) < 1e-12] = 0.0
        w[np.abs(np.abs(w) - 1.0) < 1e-12] = np.sign(w[np.abs(np.abs(w) - 1.0) < 1e-12])
    return cos_w, sin_w


def combine(frames: InterferogramSet) -> tuple[np.ndarray, np.ndarray]:
    """Cosine and sine harmonic combinations C(x, y), S(x, y)."""
    alphas = np.asarray(frames.psi_config.phase_steps)
    cos_w, sin_w = _harmonic_weights(alphas)
    stack = frames.frames
    c = np.tensordot(cos_w, stack, axes=1)
    s = np.tensordot(sin_w, stack, axes=1)
    return c, s


def c0_analytic(reference: complex, n_steps: int) -> float:
    """C0 = -N |K|^2 from a known reference amplitude."""
    return -n_steps * abs(reference) ** 2


def c0_empirical(c: np.ndarray, dark_region: np.ndarray) -> float:
    """Mean of C over pixels where the input wavefront is zero."""
    dark_region = np.asarray(dark_region, dtype=bool)
    if dark_region.shape != c.shape:
        raise ShapeError("dark region mask shape does not match C")
    if not dark_region.any():
        raise EstimationError("empty dark region; cannot estimate C0")
    return float(c[dark_region].mean())


def extract_phase(frames: InterferogramSet, c0: float | None = None,
                  mu: float | None = None, mu_sign: int = +1) -> ReconstructionResult:
    """Recover the wrapped phase and amplitude maps.

    c0 and mu default to the analytic values from the stored reference.
    mu_sign selects how the reference phase re-enters the result; +1 is the
    algebraically consistent choice (arctan2(S, C - C0) = phi - mu), -1 is
    provided for convention compatibility. Pixels with C - c0 = S = 0 get
    phase 0 (arctan2(0, 0) convention).
    """
    if mu_sign not in (+1, -1):
        raise ValueError("mu_sign must be +1 or -1")
    if c0 is None:
        c0 = c0_analytic(frames.reference, frames.n_steps)
    if mu is None:
        mu = float(np.angle(frames.reference))
    c, s = combine(frames)
    phase = wrap(np.arctan2(s, c - c0) + mu_sign * mu)
    amplitude = np.sqrt(np.clip(frames.frames[0], 0.0, None))
    return ReconstructionResult(phase=phase, amplitude=amplitude,
                                c0_used=float(c0), mu_used=float(mu))
