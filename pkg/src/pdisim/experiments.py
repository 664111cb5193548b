"""Monte-Carlo sweep engine.

Covers the standard studies: mean reconstruction fidelity of the slit
qudit versus readout noise, illumination and pixel binning; a 2D fidelity map
over (illumination x readout noise); and continuous-phase error statistics of
a lens wavefront against a high-flux reference.

Every cell of a sweep is an independent task fed by its own random stream
(seed, cell index), so results are bit-identical for a fixed seed regardless
of worker count or scheduling order.
"""

import concurrent.futures
from dataclasses import dataclass, field as dc_field

import numpy as np

from .circular import circ_dist, circ_std
from .errors import DomainError, PdisimError, ShapeError
from .field import (ComplexField, GridSpec, QuditState, SlitLayout,
                    equal_step_state, make_lens_phase, make_slit_mask)
from .forward import PsiConfig, simulate_interferograms
from .qudit import FidelityStats
from .reconstruct import _harmonic_weights, extract_phase
from .sensor import apply_noise, NoiseParams, rng_stream, sample_noise, sigma_from_nsamp

#: Fixed vectorization chunk (repetitions per RNG block). Part of the
#: determinism contract: results must not depend on worker count, so the
#: chunking must not either.
_CHUNK = 256

#: Readout noise used when building the high-flux reference map.
_REFERENCE_SIGMA = 0.2


@dataclass(frozen=True)
class QuditScene:
    """Slit-state scene: layout + target state on a pixel grid."""

    grid: GridSpec = GridSpec(128, 128)
    layout: SlitLayout = SlitLayout(d=6)
    state: QuditState = dc_field(default_factory=equal_step_state)
    background_amplitude: float = 1.0
    background_phase: float = 0.0

    def field(self) -> ComplexField:
        return make_slit_mask(self.layout, self.state, self.grid,
                              self.background_amplitude, self.background_phase)

    def region(self) -> np.ndarray:
        return self.layout.region_mask(self.grid)


@dataclass(frozen=True)
class LensScene:
    """Continuous quadratic-phase scene with uniform amplitude."""

    grid: GridSpec = GridSpec(128, 128)
    curvature: float = np.pi / 2048.0
    amplitude: float = 1.0
    center: tuple[float, float] | None = None

    def field(self) -> ComplexField:
        return make_lens_phase(self.grid, self.curvature, self.center,
                               self.amplitude)

    def region(self) -> np.ndarray:
        return np.ones(self.grid.shape, dtype=bool)


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian sweep over illumination, readout noise and binning.

    Noise may be given as sigmas (e-) or as Skipper sample counts (nsamps);
    nsamps are converted through sigma_from_nsamp.
    """

    illuminations: tuple[float, ...] = (1.7, 3.0, 11.3)
    sigmas: tuple[float, ...] | None = (3.0, 1.0, 0.5, 0.2)
    nsamps: tuple[int, ...] | None = None
    n_bins: tuple[int, ...] = (1, 2, 4, 8)
    repetitions: int = 2000

    def __post_init__(self):
        if self.nsamps is not None:
            sigmas = tuple(sigma_from_nsamp(n) for n in self.nsamps)
            object.__setattr__(self, "sigmas", sigmas)
        if not self.illuminations or not self.sigmas or not self.n_bins:
            raise DomainError("sweep grid lists must be non-empty")
        if self.repetitions < 1:
            raise DomainError("repetitions must be >= 1")

    def cells(self):
        """Deterministic cell order: illumination-major, n_bin-minor."""
        nsamps = self.nsamps or (None,) * len(self.sigmas)
        for illum in self.illuminations:
            for sigma, nsamp in zip(self.sigmas, nsamps):
                for n_bin in self.n_bins:
                    yield illum, sigma, nsamp, n_bin


@dataclass(frozen=True)
class CellResult:
    """One sweep cell; `stats` is None when the cell failed."""

    illumination: float
    sigma: float
    nsamp: int | None
    n_bin: int
    stats: FidelityStats | None
    error: str | None = None


@dataclass(frozen=True)
class PhaseErrorStats:
    """Histogram and circular spread of per-pixel phase error."""

    bin_edges: np.ndarray
    counts: np.ndarray
    circ_std: float
    n_pixels: int


@dataclass(frozen=True)
class ContinuousCase:
    """Phase-error statistics of one (illumination, sigma) reconstruction."""

    illumination: float
    sigma: float
    nsamp: int | None
    stats: PhaseErrorStats
    phase_map: np.ndarray


def _scene_data(scene: QuditScene):
    """Precompute the per-slit complex amplitudes and the reference."""
    fld = scene.field()
    indices = scene.layout.slit_indices(scene.grid)
    slit_values = np.stack([fld.values[rows, cols] for rows, cols in indices])
    reference = complex(fld.values.mean())
    mean_i0 = float(np.mean(np.abs(slit_values) ** 2))
    target = scene.state.coeffs
    return slit_values, reference, mean_i0, target


def _qudit_cell(task):
    """Monte-Carlo fidelity of one sweep cell.

    Per repetition: draw a noisy realization of the slit-region frames,
    invert to a phase map, sample one n_bin pixel tuple per slit and score
    the fidelity against the target. Restricting the noise draw to slit
    pixels is exact: the inversion is per pixel and only slit pixels are
    ever sampled.
    """
    (cell_index, seed, slit_values, reference, mean_i0, target,
     n_steps, illumination, sigma, n_bin, repetitions, quantize) = task

    d, n_px = slit_values.shape
    if n_bin > n_px:
        raise DomainError(f"n_bin={n_bin} exceeds {n_px} pixels per slit")
    if reference == 0:
        raise DomainError("degenerate reference (mean field is zero)")
    root_scale = np.sqrt(illumination / mean_i0)
    scaled = slit_values * root_scale
    ref = reference * root_scale
    alphas = 2.0 * np.pi * np.arange(n_steps) / n_steps
    lam = np.abs(scaled[None] + (ref * (np.exp(1j * alphas) - 1.0))[:, None, None]) ** 2
    c0 = -n_steps * abs(ref) ** 2
    mu = np.angle(ref)
    cos_a, sin_a = _harmonic_weights(alphas)
    target_conj = np.conj(target) / np.sqrt(d)

    rng = rng_stream(seed, cell_index)
    fids = np.empty(repetitions)
    for start in range(0, repetitions, _CHUNK):
        m = min(_CHUNK, repetitions - start)
        noisy = sample_noise(np.broadcast_to(lam, (m,) + lam.shape), sigma, rng,
                             quantize=quantize)
        c = np.einsum("n,mndp->mdp", cos_a, noisy)
        s = np.einsum("n,mndp->mdp", sin_a, noisy)
        phase = np.arctan2(s, c - c0) + mu
        order = np.argsort(rng.random((m, d, n_px)), axis=-1)[..., :n_bin]
        sampled = np.take_along_axis(phase, order, axis=-1)
        slit_phase = np.angle(np.exp(1j * sampled).sum(axis=-1))
        overlap = np.abs((target_conj[None] * np.exp(1j * slit_phase)).sum(axis=-1))
        fids[start:start + m] = overlap
    std = float(fids.std(ddof=1)) if repetitions > 1 else 0.0
    return FidelityStats(
        mean=float(fids.mean()),
        std=std,
        stderr=std / float(np.sqrt(repetitions)),
        n_states_per_run=1,
        n_runs=repetitions,
    )


def _run_cell(task):
    try:
        return _qudit_cell(task), None
    except (PdisimError, ValueError) as exc:
        return None, str(exc)


def _map_tasks(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def fidelity_sweep(scene: QuditScene, grid: SweepGrid, seed: int = 0,
                   jobs: int = 1, quantize: bool = False) -> list[CellResult]:
    """Run the full sweep; failed cells are recorded, not fatal."""
    slit_values, reference, mean_i0, target = _scene_data(scene)
    n_steps = 4
    cells = list(grid.cells())
    tasks = [
        (index, seed, slit_values, reference, mean_i0, target, n_steps,
         illum, sigma, n_bin, grid.repetitions, quantize)
        for index, (illum, sigma, _nsamp, n_bin) in enumerate(cells)
    ]
    outcomes = _map_tasks(_run_cell, tasks, jobs)
    return [
        CellResult(illumination=illum, sigma=sigma, nsamp=nsamp, n_bin=n_bin,
                   stats=stats, error=error)
        for (illum, sigma, nsamp, n_bin), (stats, error) in zip(cells, outcomes)
    ]


@dataclass(frozen=True)
class FidelityMap:
    """Mean-fidelity matrix over (illumination, sigma)."""

    illuminations: tuple[float, ...]
    sigmas: tuple[float, ...]
    mean: np.ndarray
    stderr: np.ndarray


def fidelity_map(scene: QuditScene, illuminations, sigmas, repetitions: int,
                 seed: int = 0, n_bin: int = 1, jobs: int = 1) -> FidelityMap:
    """2D mean-fidelity map, each cell averaged over `repetitions` pipelines."""
    grid = SweepGrid(illuminations=tuple(illuminations), sigmas=tuple(sigmas),
                     n_bins=(n_bin,), repetitions=repetitions)
    results = fidelity_sweep(scene, grid, seed=seed, jobs=jobs)
    shape = (len(grid.illuminations), len(grid.sigmas))
    mean = np.full(shape, np.nan)
    stderr = np.full(shape, np.nan)
    for idx, cell in enumerate(results):
        i, j = divmod(idx, shape[1])
        if cell.stats is not None:
            mean[i, j] = cell.stats.mean
            stderr[i, j] = cell.stats.stderr
    return FidelityMap(grid.illuminations, grid.sigmas, mean, stderr)


def _reconstruct_noisy(fld: ComplexField, region, illumination, sigma, rng,
                       quantize=False):
    config = PsiConfig(n_steps=4)
    clean = simulate_interferograms(fld, config, illumination, region=region)
    params = NoiseParams(readout_sigma=sigma, quantize=quantize)
    noisy = apply_noise(clean, params, rng=rng)
    return extract_phase(noisy)


def phase_error_stats(phase: np.ndarray, reference_phase: np.ndarray,
                      support: np.ndarray | None = None,
                      n_bins: int = 64) -> PhaseErrorStats:
    """Histogram + circular std of the wrapped per-pixel phase difference."""
    if phase.shape != reference_phase.shape:
        raise ShapeError("phase maps differ in shape")
    diff = circ_dist(phase, reference_phase)
    if support is not None:
        diff = diff[np.asarray(support, dtype=bool)]
    diff = diff.ravel()
    edges = np.linspace(-np.pi, np.pi, n_bins + 1)
    counts, _ = np.histogram(diff, bins=edges)
    return PhaseErrorStats(
        bin_edges=edges,
        counts=counts,
        circ_std=float(circ_std(diff)),
        n_pixels=diff.size,
    )


def continuous_experiment(scene: LensScene, illuminations,
                          sigma_pair: tuple[float, float] = (3.0, 0.2),
                          reference_illumination: float = 500.0,
                          seed: int = 0, n_hist_bins: int = 64,
                          quantize: bool = False):
    """Continuous-phase study against a high-flux reference map.

    Builds the reference reconstruction at `reference_illumination` (readout
    noise 0.2 e-), then for each (illumination, sigma) pair records the
    per-pixel wrapped phase difference. Returns (reference phase map, list of
    ContinuousCase in deterministic order).
    """
    illuminations = tuple(illuminations)
    if reference_illumination < max(illuminations):
        raise DomainError(
            "reference illumination must be at least the largest test illumination"
        )
    fld = scene.field()
    region = scene.region()
    ref_result = _reconstruct_noisy(fld, region, reference_illumination,
                                    _REFERENCE_SIGMA, rng_stream(seed, 0))
    support = fld.amplitude > 0
    cases = []
    stream = 1
    for illum in illuminations:
        for sigma in sigma_pair:
            result = _reconstruct_noisy(fld, region, illum, sigma,
                                        rng_stream(seed, stream),
                                        quantize=quantize)
            stream += 1
            stats = phase_error_stats(result.phase, ref_result.phase,
                                      support=support, n_bins=n_hist_bins)
            cases.append(ContinuousCase(illumination=illum, sigma=sigma,
                                        nsamp=None, stats=stats,
                                        phase_map=result.phase))
    return ref_result.phase, cases
