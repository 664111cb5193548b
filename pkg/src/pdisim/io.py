"""On-disk formats.

Phase maps: text header ``PHMAP <width> <height>\\n`` followed by
width*height little-endian float32, row-major, radians. Amplitude maps are
identical with header ``AMMAP``. Interferogram sets are one AMMAP file per
frame plus a line-oriented manifest.
"""

import os

import numpy as np

from .errors import ShapeError
from .field import GridSpec

_MAP_MAGIC = {"PHMAP", "AMMAP"}


def write_map(path, data: np.ndarray, kind: str):
    """Write a 2D float map. kind is 'PHMAP' or 'AMMAP'."""
    if kind not in _MAP_MAGIC:
        raise ValueError(f"unknown map kind {kind!r}")
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ShapeError("map must be 2D")
    height, width = data.shape
    with open(path, "wb") as fh:
        fh.write(f"{kind} {width} {height}\n".encode("ascii"))
        fh.write(data.astype("<f4").tobytes(order="C"))


def read_map(path, kind: str | None = None) -> np.ndarray:
    """Read a PHMAP/AMMAP file. If kind is given, enforce it."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 3 or header[0] not in _MAP_MAGIC:
            raise ShapeError(f"{path}: not a PHMAP/AMMAP file")
        if kind is not None and header[0] != kind:
            raise ShapeError(f"{path}: expected {kind}, found {header[0]}")
        width, height = int(header[1]), int(header[2])
        raw = fh.read(4 * width * height)
        if len(raw) != 4 * width * height:
            raise ShapeError(f"{path}: truncated map payload")
        return np.frombuffer(raw, dtype="<f4").astype(float).reshape(height, width)


def write_phase_map(path, phase):
    write_map(path, phase, "PHMAP")


def write_amplitude_map(path, amplitude):
    write_map(path, amplitude, "AMMAP")


def fmt_float(x) -> str:
    """Shortest round-trip decimal form; deterministic across runs."""
    return repr(float(x))


def write_interferogram_set(directory, iset, prefix="frame"):
    """Write one AMMAP per frame plus `manifest.txt`. Returns manifest path."""
    os.makedirs(directory, exist_ok=True)
    frame_names = []
    for n, frame in enumerate(iset.frames):
        name = f"{prefix}_{n}.ammap"
        write_map(os.path.join(directory, name), frame, "AMMAP")
        frame_names.append(name)
    lines = ["INTERFEROGRAMS 1"]
    lines.append(f"n_steps = {iset.psi_config.n_steps}")
    lines.append("alphas = " + ",".join(fmt_float(a) for a in iset.psi_config.phase_steps))
    lines.append(f"reference_re = {fmt_float(iset.reference.real)}")
    lines.append(f"reference_im = {fmt_float(iset.reference.imag)}")
    illum = "" if iset.illumination is None else fmt_float(iset.illumination)
    lines.append(f"illumination = {illum}")
    for name in frame_names:
        lines.append(f"frame = {name}")
    manifest = os.path.join(directory, "manifest.txt")
    with open(manifest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest


def read_interferogram_set(manifest_path):
    """Load an InterferogramSet from its manifest file."""
    from .forward import InterferogramSet, PsiConfig

    directory = os.path.dirname(os.path.abspath(manifest_path))
    keys = {}
    frames = []
    with open(manifest_path, "r", encoding="utf-8") as fh:
        magic = fh.readline().strip()
        if not magic.startswith("INTERFEROGRAMS"):
            raise ShapeError(f"{manifest_path}: not an interferogram manifest")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "frame":
                frames.append(read_map(os.path.join(directory, value), "AMMAP"))
            else:
                keys[key] = value
    n_steps = int(keys["n_steps"])
    alphas = [float(v) for v in keys["alphas"].split(",")]
    reference = complex(float(keys["reference_re"]), float(keys["reference_im"]))
    illumination = float(keys["illumination"]) if keys.get("illumination") else None
    if len(frames) != n_steps:
        raise ShapeError(
            f"{manifest_path}: manifest lists {len(frames)} frames, n_steps={n_steps}"
        )
    height, width = frames[0].shape
    config = PsiConfig(n_steps=n_steps, phase_steps=tuple(alphas))
    return InterferogramSet(
        grid=GridSpec(width=width, height=height),
        frames=np.stack(frames),
        psi_config=config,
        reference=reference,
        illumination=illumination,
    )


def write_csv(path, header, rows):
    """Comma-separated, '.' decimal, UTF-8, \\n line endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(value) -> str:
    if isinstance(value, float):
        return "" if np.isnan(value) else fmt_float(value)
    return str(value)
