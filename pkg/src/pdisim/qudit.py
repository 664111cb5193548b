"""Qudit state extraction and fidelity statistics.

The state is read off a reconstructed phase map by sampling pixels inside
each slit, averaging their phases circularly, and assigning uniform
amplitudes 1/sqrt(d). Fidelity is the pure-state overlap |<target|recon>|.
"""

from dataclasses import dataclass

import numpy as np

from .circular import circ_mean
from .errors import DomainError, SamplingError, ShapeError
from .field import QuditState, SlitLayout
from .reconstruct import ReconstructionResult


@dataclass(frozen=True)
class BinningPolicy:
    """How many pixels per slit are averaged (uniform, without replacement)."""

    n_bin: int = 1
    use_measured_amplitude: bool = False

    def __post_init__(self):
        if self.n_bin < 1:
            raise DomainError(f"n_bin must be >= 1, got {self.n_bin}")


@dataclass(frozen=True)
class FidelityStats:
    """Mean/std/stderr of fidelity over Monte-Carlo or bootstrap runs."""

    mean: float
    std: float
    stderr: float
    n_states_per_run: int
    n_runs: int


def fidelity(target: QuditState, reconstructed: QuditState) -> float:
    """|<target|reconstructed>|, invariant under global phase."""
    if target.dim != reconstructed.dim:
        raise ShapeError(
            f"dimension mismatch: {target.dim} vs {reconstructed.dim}"
        )
    return float(abs(np.vdot(target.coeffs, reconstructed.coeffs)))


def _slit_phases(result: ReconstructionResult, layout: SlitLayout):
    """Per-slit arrays of (phase, amplitude) samples from the maps."""
    from .field import GridSpec

    height, width = result.phase.shape
    grid = GridSpec(width=width, height=height)
    phases, amps = [], []
    for rows, cols in layout.slit_indices(grid):
        phases.append(result.phase[rows, cols])
        amps.append(result.amplitude[rows, cols])
    return phases, amps


def _state_from_samples(phase_samples, amp_samples, use_measured_amplitude):
    d = len(phase_samples)
    slit_phases = np.array([circ_mean(p) for p in phase_samples])
    if use_measured_amplitude:
        amps = np.array([a.mean() for a in amp_samples])
        if not amps.any():
            amps = np.ones(d)
    else:
        amps = np.ones(d)
    return QuditState.from_coeffs(amps * np.exp(1j * slit_phases))


def extract_state(result: ReconstructionResult, layout: SlitLayout,
                  policy: BinningPolicy,
                  rng: np.random.Generator) -> QuditState:
    """Sample n_bin pixels per slit and build the reconstructed state."""
    phases, amps = _slit_phases(result, layout)
    n_px = layout.pixels_per_slit
    if policy.n_bin > n_px:
        raise SamplingError(
            f"n_bin={policy.n_bin} exceeds {n_px} pixels per slit"
        )
    sel_phases, sel_amps = [], []
    for p, a in zip(phases, amps):
        idx = rng.choice(n_px, size=policy.n_bin, replace=False)
        sel_phases.append(p[idx])
        sel_amps.append(a[idx])
    return _state_from_samples(sel_phases, sel_amps, policy.use_measured_amplitude)


def bootstrap_fidelity(result: ReconstructionResult, target: QuditState,
                       layout: SlitLayout, policy: BinningPolicy,
                       n_states: int = 81, n_runs: int = 64,
                       rng: np.random.Generator | None = None,
                       seed: int = 0) -> FidelityStats:
    """Bootstrap protocol: per run, draw n_states pixel-tuples that are
    disjoint within each slit, average their fidelities; report mean, std and
    stderr over n_runs."""
    if rng is None:
        from .sensor import rng_stream

        rng = rng_stream(seed)
    n_px = layout.pixels_per_slit
    if n_states * policy.n_bin > n_px:
        raise SamplingError(
            f"{n_states} states x {policy.n_bin} pixels > {n_px} pixels per slit; "
            "without-replacement draw infeasible"
        )
    phases, amps = _slit_phases(result, layout)
    run_means = np.empty(n_runs)
    for run in range(n_runs):
        perms = [rng.permutation(n_px) for _ in range(layout.d)]
        fids = np.empty(n_states)
        for j in range(n_states):
            lo, hi = j * policy.n_bin, (j + 1) * policy.n_bin
            sel_p = [p[perm[lo:hi]] for p, perm in zip(phases, perms)]
            sel_a = [a[perm[lo:hi]] for a, perm in zip(amps, perms)]
            state = _state_from_samples(sel_p, sel_a, policy.use_measured_amplitude)
            fids[j] = fidelity(target, state)
        run_means[run] = fids.mean()
    std = float(run_means.std(ddof=1)) if n_runs > 1 else 0.0
    return FidelityStats(
        mean=float(run_means.mean()),
        std=std,
        stderr=std / float(np.sqrt(n_runs)),
        n_states_per_run=n_states,
        n_runs=n_runs,
    )
