"""Traced-filament tables to weighted circular samples and angular histograms.

Input is comma- or tab-delimited text with a header naming the columns
``cx, cy, length, angle_deg`` and optionally ``width``.  Filament
orientations are axial (defined modulo 180 degrees); by default they are
doubled onto the full circle.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circle import TWO_PI, wrap
from .errors import InputError
from .scalespace import CircularSample

REQUIRED_COLUMNS = ("cx", "cy", "length", "angle_deg")


@dataclass(frozen=True)
class FilamentRecord:
    cx: float
    cy: float
    length: float
    orientation: float  # radians in [-pi/2, pi/2)
    width: float | None = None

    def __post_init__(self):
        if not self.length > 0:
            raise InputError(f"filament length must be positive, got {self.length!r}")
        if not -math.pi / 2 <= self.orientation < math.pi / 2:
            raise InputError(f"orientation {self.orientation!r} outside [-pi/2, pi/2)")
        if self.width is not None and not self.width >= 1:
            raise InputError(f"filament width must be >= 1, got {self.width!r}")


def axial_reduce_degrees(deg):
    """Reduce an orientation in degrees to radians in ``[-pi/2, pi/2)``."""
    reduced = math.fmod(deg + 90.0, 180.0)
    if reduced < 0:
        reduced += 180.0
    rad = math.radians(reduced - 90.0)
    return rad if rad < math.pi / 2 else -math.pi / 2


def _float(value, column, line):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise InputError(f"line {line}: cannot parse {column}={value!r} as a number") from None
    if not math.isfinite(x):
        raise InputError(f"line {line}: {column} must be finite, got {value!r}")
    return x


def parse_filaments(text: str) -> list[FilamentRecord]:
    """Parse a delimited filament table; errors carry the offending line number."""
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise InputError("filament table is empty (missing header)")
    header_line = next(line for line in lines if line.strip())
    delimiter = "\t" if "\t" in header_line else ","
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    header = None
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
            continue
        if header is None:
            header = [c.strip().lower() for c in row]
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise InputError(f"line {line}: missing required column(s) {', '.join(missing)}")
            continue
        if len(row) != len(header):
            raise InputError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        d = dict(zip(header, (c.strip() for c in row)))
        length = _float(d["length"], "length", line)
        if length <= 0:
            raise InputError(f"line {line}: length must be positive, got {length:g}")
        width = None
        if d.get("width", "") not in ("", "NA"):
            width = _float(d["width"], "width", line)
            if width < 1:
                raise InputError(f"line {line}: width must be >= 1, got {width:g}")
        records.append(FilamentRecord(
            _float(d["cx"], "cx", line), _float(d["cy"], "cy", line), length,
            axial_reduce_degrees(_float(d["angle_deg"], "angle_deg", line)), width))
    return records


def read_filaments(path) -> list[FilamentRecord]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return parse_filaments(text)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def record_weights(records, weighting="length"):
    if weighting == "length":
        return np.array([r.length for r in records])
    if weighting == "length*width":
        return np.array([r.length * (r.width or 1.0) for r in records])
    raise InputError(f"unknown weighting {weighting!r}; use 'length' or 'length*width'")


def record_angles(records, axial_doubling=True):
    phi = np.array([r.orientation for r in records])
    return wrap(2.0 * phi if axial_doubling else phi)


def to_sample(records, weighting: str = "length", axial_doubling: bool = True) -> CircularSample:
    """Weighted circular sample; ``effective_n`` is the rounded total weight."""
    if not records:
        raise InputError("no filament records to convert")
    w = record_weights(records, weighting)
    return CircularSample(np.atleast_1d(record_angles(records, axial_doubling)), w,
                          float(max(1, round(float(w.sum())))))


@dataclass(frozen=True, eq=False)
class AngularHistogram:
    bins: int
    masses: np.ndarray
    total_weight: float
    axial_doubling: bool = True

    @property
    def edges(self):
        return np.arange(self.bins + 1) * (TWO_PI / self.bins)

    def density(self):
        """Bin heights as a density in ``dt``."""
        return self.masses / (TWO_PI / self.bins)

    def to_dict(self):
        return {"bins": self.bins, "masses": self.masses.tolist(),
                "total_weight": self.total_weight, "axial_doubling": self.axial_doubling}


def to_histogram(records, N: int, weighting: str = "length",
                 axial_doubling: bool = True) -> AngularHistogram:
    """Weight-normalised histogram; bin ``k`` covers ``[2 pi k / N, 2 pi (k+1) / N)``."""
    if int(N) != N or N < 2 or N % 2:
        raise InputError(f"number of bins must be an even integer >= 2, got {N!r}")
    if not records:
        raise InputError("no filament records to bin")
    w = record_weights(records, weighting)
    angles = np.atleast_1d(record_angles(records, axial_doubling))
    idx = np.minimum((angles / (TWO_PI / N)).astype(int), N - 1)
    masses = np.bincount(idx, weights=w, minlength=N) / w.sum()
    return AngularHistogram(int(N), masses, float(w.sum()), axial_doubling)


def sample_to_dict(sample: CircularSample) -> dict:
    return {"angles": sample.angles.tolist(), "weights": sample.weight_array.tolist(),
            "effective_n": sample.effective_n}


def export_json(sample: CircularSample | None = None, histogram: AngularHistogram | None = None) -> str:
    payload = {}
    if sample is not None:
        payload["sample"] = sample_to_dict(sample)
    if histogram is not None:
        payload["histogram"] = histogram.to_dict()
    return json.dumps(payload, indent=2, sort_keys=True)
