"""Detector model: Poisson shot noise plus Gaussian readout noise.

Readout noise follows the multi-sample averaging law sigma = sigma1 /
sqrt(NSAMP) with sigma1 = 3.0 e- by default (single-sample readout). Optional
integer-electron quantization models the photon-counting regime. Randomness
comes from splittable seeded streams so parallel sweeps are reproducible
independent of scheduling.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .forward import InterferogramSet

#: Readout noise at NSAMP = 1, in electrons.
DEFAULT_SIGMA1 = 3.0


def sigma_from_nsamp(nsamp: int, sigma1: float = DEFAULT_SIGMA1) -> float:
    """Readout noise after nsamp non-destructive charge samples."""
    if nsamp < 1:
        raise DomainError(f"nsamp must be >= 1, got {nsamp}")
    return sigma1 / np.sqrt(nsamp)


def rng_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Deterministic splittable stream: identical (seed, stream_id) yields
    identical sequences on every platform and worker."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,))
    )


@dataclass(frozen=True)
class NoiseParams:
    """Sensor noise settings.

    Either give readout_sigma directly or set nsamp, in which case sigma is
    derived as sigma1/sqrt(nsamp). Setting both is rejected unless consistent.
    """

    readout_sigma: float | None = None
    nsamp: int | None = None
    quantize: bool = False
    seed: int = 0
    sigma1: float = DEFAULT_SIGMA1

    def __post_init__(self):
        sigma = self.readout_sigma
        if self.nsamp is not None:
            derived = sigma_from_nsamp(self.nsamp, self.sigma1)
            if sigma is not None and abs(sigma - derived) > 1e-12:
                raise DomainError(
                    f"readout_sigma={sigma} inconsistent with nsamp={self.nsamp} "
                    f"(implies {derived})"
                )
            sigma = derived
        elif sigma is None:
            sigma = 0.0
        if sigma < 0:
            raise DomainError(f"readout_sigma must be >= 0, got {sigma}")
        object.__setattr__(self, "readout_sigma", float(sigma))


def sample_noise(frames: np.ndarray, sigma: float, rng: np.random.Generator,
                 quantize: bool = False) -> np.ndarray:
    """Noisy realization of non-negative photon-rate maps.

    Each value lambda is replaced by Poisson(lambda) + Normal(0, sigma^2),
    optionally rounded to integer electrons.
    """
    frames = np.asarray(frames, dtype=float)
    if np.any(frames < 0):
        raise DomainError("Poisson rates must be non-negative")
    noisy = rng.poisson(frames).astype(float)
    if sigma > 0:
        noisy += rng.normal(0.0, sigma, size=frames.shape)
    if quantize:
        noisy = np.rint(noisy)
    return noisy


def apply_noise(frames: InterferogramSet, params: NoiseParams,
                rng: np.random.Generator | None = None) -> InterferogramSet:
    """Apply the detector model to a noiseless interferogram set.

    When `rng` is not supplied, a fresh stream is derived from params.seed, so
    identical inputs give bit-identical outputs.
    """
    if rng is None:
        rng = rng_stream(params.seed)
    noisy = sample_noise(frames.frames, params.readout_sigma, rng,
                         quantize=params.quantize)
    return replace(frames, frames=noisy)
