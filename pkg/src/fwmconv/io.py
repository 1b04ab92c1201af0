"""File formats: 16-bit binary PGM images, two-column profile CSVs, key-value records."""

from __future__ import annotations

import hashlib
import math
from pathlib import Path

import numpy as np

from .profiles import RadialProfile

MAXVAL = 65535


def quantize(intensity, peak: float | None = None) -> np.ndarray:
    """Map ``[0, peak]`` linearly onto ``[0, 65535]`` with round-half-up.

    ``peak`` defaults to the array maximum; an all-zero image uses a peak of 1.
    Values above ``peak`` saturate.
    """
    a = np.asarray(intensity, dtype=float)
    if a.ndim != 2:
        raise ValueError("image must be two-dimensional")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise ValueError("image must be finite and non-negative")
    if peak is None:
        peak = float(a.max()) if a.size else 0.0
    if peak <= 0:
        peak = 1.0
    q = np.floor(a * (MAXVAL / peak) + 0.5)
    return np.clip(q, 0, MAXVAL).astype(np.uint16)


def export_image(intensity, path, peak: float | None = None) -> Path:
    """Write a binary (P5) 16-bit PGM. Identical input gives identical bytes."""
    q = quantize(intensity, peak)
    path = Path(path)
    header = f"P5\n{q.shape[1]} {q.shape[0]}\n{MAXVAL}\n".encode("ascii")
    path.write_bytes(header + q.astype(">u2").tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    """Read back a binary PGM written by :func:`export_image` (no comment lines)."""
    data = Path(path).read_bytes()
    fields = data.split(maxsplit=4)
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    raw = fields[4]
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(raw, dtype=dtype, count=width * height).reshape(height, width)


def write_profile_csv(profile: RadialProfile, path) -> Path:
    path = Path(path)
    lines = [f"# position_{profile.unit},intensity"]
    lines += [f"{x:.17g},{y:.17g}" for x, y in zip(profile.positions, profile.intensities)]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_profile_csv(path) -> RadialProfile:
    """Parse a two-column ``position,intensity`` CSV.

    The header ``# position_<unit>,intensity`` sets the unit (``um`` when
    absent). Raises ``ValueError`` with the offending line number on bad input.
    """
    unit = "um"
    xs, ys = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            head = line.lstrip("#").strip().split(",")
            if head and head[0].startswith("position_"):
                unit = head[0][len("position_"):]
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        try:
            xs.append(float(parts[0]))
            ys.append(float(parts[1]))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
    if not xs:
        raise ValueError(f"{path}: no data rows")
    return RadialProfile(np.array(xs), np.array(ys), unit=unit)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return repr(v.real) if v.imag == 0 else f"{v.real!r}{v.imag:+.17g}j"
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    return str(v)


def write_record(items: dict, path=None) -> str:
    """Render ``key = value`` lines (insertion order); optionally write them to ``path``."""
    text = "".join(f"{k} = {_format_value(v)}\n" for k, v in items.items())
    if path is not None:
        Path(path).write_text(text)
    return text


def read_record(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
