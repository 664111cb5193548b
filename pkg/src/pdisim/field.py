"""Input wavefront construction.

Wavefronts are complex amplitude maps U(x, y) = u(x, y) exp(i phi(x, y)) on a
pixel grid of the image plane. This module builds the two scene families used
throughout: slit-encoded qudit phase masks embedded in a uniform background,
and lens-like quadratic phases.
"""

from dataclasses import dataclass

import numpy as np

from .circular import wrap
from .errors import DomainError, ShapeError

NORM_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Pixel grid of the image plane."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DomainError(f"grid must be at least 1x1, got {self.width}x{self.height}")

    @property
    def shape(self):
        """Numpy array shape (rows, cols)."""
        return (self.height, self.width)

    @property
    def n_pixels(self):
        return self.width * self.height


@dataclass(frozen=True)
class ComplexField:
    """2D grid of complex amplitudes. Intensity is |value|^2 after
    illumination scaling in the forward model."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise ShapeError(
                f"values shape {values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def amplitude(self):
        return np.abs(self.values)

    @property
    def phase(self):
        return wrap(np.angle(self.values))


@dataclass(frozen=True)
class SlitLayout:
    """Geometry of d rectangular slits laid out side by side.

    Slits are slit_width_px wide (horizontal), slit_length_px tall, separated
    by slit_gap_px, with the bounding box anchored at `origin` = (col, row).
    """

    d: int
    slit_width_px: int = 10
    slit_gap_px: int = 4
    slit_length_px: int = 10
    origin: tuple[int, int] | None = None

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"slit count must be >= 1, got {self.d}")
        if self.slit_width_px < 1:
            raise DomainError("slit width must be >= 1 pixel")
        if self.slit_gap_px < 0:
            raise DomainError("slit gap must be >= 0 pixels")
        if self.slit_length_px < self.slit_width_px:
            raise DomainError("slit length must be >= slit width")

    @property
    def bounding_width(self):
        return self.d * self.slit_width_px + (self.d - 1) * self.slit_gap_px

    @property
    def pixels_per_slit(self):
        return self.slit_width_px * self.slit_length_px

    def anchor(self, grid: GridSpec) -> tuple[int, int]:
        """Top-left (col, row) of the slit bounding box; centered if unset."""
        if self.origin is not None:
            return self.origin
        return (
            (grid.width - self.bounding_width) // 2,
            (grid.height - self.slit_length_px) // 2,
        )

    def slit_indices(self, grid: GridSpec) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-slit (rows, cols) index arrays, validated against the grid."""
        x0, y0 = self.anchor(grid)
        if x0 < 0 or y0 < 0 or x0 + self.bounding_width > grid.width \
                or y0 + self.slit_length_px > grid.height:
            raise ShapeError(
                f"slit layout (box {self.bounding_width}x{self.slit_length_px} "
                f"at {x0},{y0}) exceeds grid {grid.width}x{grid.height}"
            )
        out = []
        for k in range(self.d):
            xk = x0 + k * (self.slit_width_px + self.slit_gap_px)
            rows, cols = np.mgrid[y0:y0 + self.slit_length_px, xk:xk + self.slit_width_px]
            out.append((rows.ravel(), cols.ravel()))
        return out

    def region_mask(self, grid: GridSpec) -> np.ndarray:
        """Boolean mask of all slit pixels."""
        mask = np.zeros(grid.shape, dtype=bool)
        for rows, cols in self.slit_indices(grid):
            mask[rows, cols] = True
        return mask


@dataclass(frozen=True)
class QuditState:
    """Pure d-level state: complex coefficients on the logical slit basis.

    Coefficients must already be normalized; use `from_coeffs` to normalize
    raw amplitudes.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ShapeError("coefficients must be a non-empty 1D sequence")
        norm_sq = float(np.sum(np.abs(coeffs) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise DomainError(f"state not normalized: sum |c_k|^2 = {norm_sq!r}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, raw) -> "QuditState":
        """Normalize raw coefficients into a valid state."""
        raw = np.atleast_1d(np.asarray(raw, dtype=complex))
        norm = np.linalg.norm(raw)
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return cls(raw / norm)

    @property
    def dim(self):
        return self.coeffs.size


def equal_step_state(d: int = 6, step: float = 2.0 * np.pi / 5.0) -> QuditState:
    """Uniform-amplitude state whose phase increases by `step` per slit."""
    k = np.arange(d)
    return QuditState.from_coeffs(np.exp(1j * step * k))


def make_uniform_field(grid: GridSpec, amplitude: float = 1.0,
                       phase: float = 0.0) -> ComplexField:
    values = np.full(grid.shape, amplitude * np.exp(1j * phase), dtype=complex)
    return ComplexField(grid, values)


def make_slit_mask(layout: SlitLayout, state: QuditState,
                   grid: GridSpec = GridSpec(128, 128),
                   background_amplitude: float = 1.0,
                   background_phase: float = 0.0) -> ComplexField:
    """Embed a qudit phase mask in a uniform background.

    Pixels of slit k carry amplitude |c_k| (rescaled so the brightest slit has
    amplitude 1) and phase arg(c_k); all other pixels carry the background
    amplitude and phase.
    """
    if state.dim != layout.d:
        raise ShapeError(f"state dimension {state.dim} != layout slit count {layout.d}")
    indices = layout.slit_indices(grid)
    values = np.full(grid.shape, background_amplitude * np.exp(1j * background_phase),
                     dtype=complex)
    amps = np.abs(state.coeffs)
    amps = amps / amps.max()
    for k, (rows, cols) in enumerate(indices):
        values[rows, cols] = amps[k] * np.exp(1j * np.angle(state.coeffs[k]))
    return ComplexField(grid, values)


def make_lens_phase(grid: GridSpec, curvature: float,
                    center: tuple[float, float] | None = None,
                    amplitude: float = 1.0) -> ComplexField:
    """Quadratic (lens-like) phase: curvature * r^2 around `center`, wrapped.

    `center` is (col, row); defaults to the grid center, which keeps the map
    reflection-symmetric on symmetric grids.
    """
    if not np.isfinite(curvature):
        raise DomainError("curvature must be finite")
    if center is None:
        center = ((grid.width - 1) / 2.0, (grid.height - 1) / 2.0)
    cx, cy = center
    rows, cols = np.mgrid[0:grid.height, 0:grid.width]
    phase = wrap(curvature * ((cols - cx) ** 2 + (rows - cy) ** 2))
    return ComplexField(grid, amplitude * np.exp(1j * phase))


def field_from_phase_map(phase: np.ndarray, amplitude=1.0) -> ComplexField:
    """Build a field from a raw phase map (radians) and uniform or per-pixel
    amplitude."""
    phase = np.asarray(phase, dtype=float)
    if phase.ndim != 2:
        raise ShapeError("phase map must be 2D")
    grid = GridSpec(width=phase.shape[1], height=phase.shape[0])
    return ComplexField(grid, np.asarray(amplitude) * np.exp(1j * phase))


def mean_field(field: ComplexField) -> complex:
    """Spatial mean of the field: the plane-wave reference K exp(i mu)."""
    if field.values.size == 0:
        raise ShapeError("cannot average an empty field")
    return complex(field.values.mean())
