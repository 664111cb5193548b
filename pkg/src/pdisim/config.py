"""Run configuration: line-oriented ``key = value`` files with sections.

Sections are ``[scene]``, ``[psi]``, ``[noise]``, ``[sweep]``, ``[output]``.
Only ``[scene]`` is mandatory; every other key has a default. Unknown keys,
type mismatches and constraint violations raise ConfigError naming the key
and line number. A hand-rolled parser (rather than configparser) is used so
diagnostics can carry line numbers.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import io as pio
from .errors import ConfigError, PdisimError
from .experiments import LensScene, QuditScene, SweepGrid
from .field import (ComplexField, GridSpec, QuditState, SlitLayout,
                    field_from_phase_map)
from .forward import PsiConfig
from .sensor import NoiseParams

_SECTIONS = {
    "scene": {
        "type", "d", "slit_width_px", "slit_gap_px", "slit_length_px",
        "grid_width", "grid_height", "background_amplitude",
        "background_phase", "state_step", "curvature", "amplitude",
        "phase_map", "amplitude_map",
    },
    "psi": {"n_steps", "illumination", "reference_re", "reference_im"},
    "noise": {"readout_sigma", "nsamp", "quantize", "seed"},
    "sweep": {
        "illuminations", "sigmas", "nsamps", "n_bins", "repetitions",
        "n_states", "n_runs", "reference_illumination",
    },
    "output": {"directory"},
}

_SCENE_TYPES = ("eq6_qudit", "lens", "phmap")


@dataclass(frozen=True)
class PhmapScene:
    """Scene backed by an external PHMAP (and optional AMMAP) file."""

    phase_path: str
    amplitude_path: str | None = None

    def field(self) -> ComplexField:
        phase = pio.read_map(self.phase_path, "PHMAP")
        amplitude = 1.0
        if self.amplitude_path is not None:
            amplitude = pio.read_map(self.amplitude_path, "AMMAP")
        return field_from_phase_map(phase, amplitude)

    def region(self) -> np.ndarray:
        return self.field().amplitude > 0


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run settings."""

    scene_type: str
    scene: object
    psi: PsiConfig
    illumination: float
    noise: NoiseParams
    noise_enabled: bool
    sweep: SweepGrid
    n_states: int
    n_runs: int
    reference_illumination: float
    output_directory: str | None


class _Entry:
    __slots__ = ("value", "line")

    def __init__(self, value, line):
        self.value = value
        self.line = line


def _tokenize(text: str) -> dict[str, dict[str, _Entry]]:
    sections: dict[str, dict[str, _Entry]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section [{name}]", line=lineno)
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        if current is None:
            raise ConfigError("key outside any section", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        section_name = next(n for n, s in sections.items() if s is current)
        if key not in _SECTIONS[section_name]:
            raise ConfigError(f"unknown key in [{section_name}]",
                              key=key, line=lineno)
        if key in current:
            raise ConfigError("duplicate key", key=key, line=lineno)
        current[key] = _Entry(value.strip(), lineno)
    return sections


def _get(section, key, convert, default):
    entry = section.get(key)
    if entry is None:
        return default
    try:
        return convert(entry.value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value {entry.value!r}: {exc}",
                          key=key, line=entry.line) from None


def _bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError("expected true/false")


def _float_list(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(t) for t in items)


def _int_list(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(int(t) for t in items)


def _fail(section, key, message):
    entry = section.get(key)
    raise ConfigError(message, key=key,
                      line=entry.line if entry is not None else None)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a config; every default is resolved."""
    sections = _tokenize(text)
    scene_sec = sections.get("scene", {})
    scene_type = _get(scene_sec, "type", str, "eq6_qudit")
    if scene_type not in _SCENE_TYPES:
        _fail(scene_sec, "type", f"scene type must be one of {_SCENE_TYPES}")

    grid = GridSpec(
        width=_get(scene_sec, "grid_width", int, 128),
        height=_get(scene_sec, "grid_height", int, 128),
    )
    pixels_per_slit = None
    try:
        if scene_type == "eq6_qudit":
            layout = SlitLayout(
                d=_get(scene_sec, "d", int, 6),
                slit_width_px=_get(scene_sec, "slit_width_px", int, 10),
                slit_gap_px=_get(scene_sec, "slit_gap_px", int, 4),
                slit_length_px=_get(scene_sec, "slit_length_px", int, 10),
            )
            layout.slit_indices(grid)  # bounds check up front
            step = _get(scene_sec, "state_step", float, 2.0 * np.pi / 5.0)
            state = QuditState.from_coeffs(np.exp(1j * step * np.arange(layout.d)))
            scene = QuditScene(
                grid=grid,
                layout=layout,
                state=state,
                background_amplitude=_get(scene_sec, "background_amplitude",
                                          float, 1.0),
                background_phase=_get(scene_sec, "background_phase", float, 0.0),
            )
            pixels_per_slit = layout.pixels_per_slit
        elif scene_type == "lens":
            scene = LensScene(
                grid=grid,
                curvature=_get(scene_sec, "curvature", float, np.pi / 2048.0),
                amplitude=_get(scene_sec, "amplitude", float, 1.0),
            )
        else:
            phase_path = _get(scene_sec, "phase_map", str, None)
            if phase_path is None:
                _fail(scene_sec, "type", "phmap scene requires a phase_map path")
            if not os.path.exists(phase_path):
                _fail(scene_sec, "phase_map", f"file not found: {phase_path}")
            amp_path = _get(scene_sec, "amplitude_map", str, None)
            if amp_path is not None and not os.path.exists(amp_path):
                _fail(scene_sec, "amplitude_map", f"file not found: {amp_path}")
            scene = PhmapScene(phase_path=phase_path, amplitude_path=amp_path)
    except ConfigError:
        raise
    except PdisimError as exc:
        raise ConfigError(f"invalid scene: {exc}") from exc

    psi_sec = sections.get("psi", {})
    try:
        psi = PsiConfig(n_steps=_get(psi_sec, "n_steps", int, 4))
        ref_re = _get(psi_sec, "reference_re", float, None)
        ref_im = _get(psi_sec, "reference_im", float, None)
        if ref_re is not None or ref_im is not None:
            psi = PsiConfig(n_steps=psi.n_steps,
                            reference_override=complex(ref_re or 0.0, ref_im or 0.0))
    except PdisimError as exc:
        raise ConfigError(f"invalid [psi]: {exc}") from exc
    illumination = _get(psi_sec, "illumination", float, 3.0)
    if illumination < 0:
        _fail(psi_sec, "illumination", "illumination must be >= 0")

    noise_sec = sections.get("noise", {})
    try:
        nsamp = _get(noise_sec, "nsamp", int, None)
        sigma = _get(noise_sec, "readout_sigma", float, None)
        if sigma is None and nsamp is None:
            sigma = 0.2
        noise = NoiseParams(
            readout_sigma=sigma,
            nsamp=nsamp,
            quantize=_get(noise_sec, "quantize", _bool, False),
            seed=_get(noise_sec, "seed", int, 0),
        )
    except PdisimError as exc:
        raise ConfigError(f"invalid [noise]: {exc}") from exc

    sweep_sec = sections.get("sweep", {})
    default_illums = (1.9, 4.0, 12.7) if scene_type == "lens" else (1.7, 3.0, 11.3)
    try:
        sweep = SweepGrid(
            illuminations=_get(sweep_sec, "illuminations", _float_list,
                               default_illums),
            sigmas=_get(sweep_sec, "sigmas", _float_list, (3.0, 1.0, 0.5, 0.2)),
            nsamps=_get(sweep_sec, "nsamps", _int_list, None),
            n_bins=_get(sweep_sec, "n_bins", _int_list, (1, 2, 4, 8)),
            repetitions=_get(sweep_sec, "repetitions", int, 2000),
        )
    except PdisimError as exc:
        raise ConfigError(f"invalid [sweep]: {exc}") from exc
    n_states = _get(sweep_sec, "n_states", int, 81)
    n_runs = _get(sweep_sec, "n_runs", int, 64)
    reference_illumination = _get(sweep_sec, "reference_illumination", float, 500.0)
    if n_states < 1:
        _fail(sweep_sec, "n_states", "n_states must be >= 1")
    if n_runs < 1:
        _fail(sweep_sec, "n_runs", "n_runs must be >= 1")
    if reference_illumination < max(sweep.illuminations):
        _fail(sweep_sec, "reference_illumination",
              "reference illumination must be at least the largest sweep illumination")
    if pixels_per_slit is not None:
        for n_bin in sweep.n_bins:
            if n_bin > pixels_per_slit:
                _fail(sweep_sec, "n_bins",
                      f"n_bin={n_bin} exceeds {pixels_per_slit} pixels per slit")

    output_sec = sections.get("output", {})
    outdir = _get(output_sec, "directory", str, None)

    return RunConfig(
        scene_type=scene_type,
        scene=scene,
        psi=psi,
        illumination=illumination,
        noise=noise,
        noise_enabled="noise" in sections,
        sweep=sweep,
        n_states=n_states,
        n_runs=n_runs,
        reference_illumination=reference_illumination,
        output_directory=outdir,
    )


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse(serialize(parse(x))) == parse(x)."""
    f = pio.fmt_float
    lines = ["[scene]", f"type = {cfg.scene_type}"]
    if cfg.scene_type == "eq6_qudit":
        layout = cfg.scene.layout
        step = float(np.angle(cfg.scene.state.coeffs[1] /
                              cfg.scene.state.coeffs[0])) if layout.d > 1 else 0.0
        if step < 0:
            step += 2.0 * np.pi
        lines += [
            f"d = {layout.d}",
            f"slit_width_px = {layout.slit_width_px}",
            f"slit_gap_px = {layout.slit_gap_px}",
            f"slit_length_px = {layout.slit_length_px}",
            f"grid_width = {cfg.scene.grid.width}",
            f"grid_height = {cfg.scene.grid.height}",
            f"background_amplitude = {f(cfg.scene.background_amplitude)}",
            f"background_phase = {f(cfg.scene.background_phase)}",
            f"state_step = {f(step)}",
        ]
    elif cfg.scene_type == "lens":
        lines += [
            f"curvature = {f(cfg.scene.curvature)}",
            f"amplitude = {f(cfg.scene.amplitude)}",
            f"grid_width = {cfg.scene.grid.width}",
            f"grid_height = {cfg.scene.grid.height}",
        ]
    else:
        lines.append(f"phase_map = {cfg.scene.phase_path}")
        if cfg.scene.amplitude_path is not None:
            lines.append(f"amplitude_map = {cfg.scene.amplitude_path}")

    lines += ["", "[psi]", f"n_steps = {cfg.psi.n_steps}",
              f"illumination = {f(cfg.illumination)}"]
    if cfg.psi.reference_override is not None:
        ref = cfg.psi.reference_override
        lines += [f"reference_re = {f(ref.real)}", f"reference_im = {f(ref.imag)}"]

    if cfg.noise_enabled:
        lines += ["", "[noise]",
                  f"readout_sigma = {f(cfg.noise.readout_sigma)}"]
        if cfg.noise.nsamp is not None:
            lines.append(f"nsamp = {cfg.noise.nsamp}")
        lines += [f"quantize = {'true' if cfg.noise.quantize else 'false'}",
                  f"seed = {cfg.noise.seed}"]

    lines += [
        "", "[sweep]",
        "illuminations = " + ",".join(f(x) for x in cfg.sweep.illuminations),
        "sigmas = " + ",".join(f(x) for x in cfg.sweep.sigmas),
    ]
    if cfg.sweep.nsamps is not None:
        lines.append("nsamps = " + ",".join(str(x) for x in cfg.sweep.nsamps))
    lines += [
        "n_bins = " + ",".join(str(x) for x in cfg.sweep.n_bins),
        f"repetitions = {cfg.sweep.repetitions}",
        f"n_states = {cfg.n_states}",
        f"n_runs = {cfg.n_runs}",
        f"reference_illumination = {f(cfg.reference_illumination)}",
    ]
    if cfg.output_directory is not None:
        lines += ["", "[output]", f"directory = {cfg.output_directory}"]
    return "\n".join(lines) + "\n"
