"""Run configuration shared by the CLI subcommands."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import InputError


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    grid_size: int = 512
    h0: float = 0.01
    hmax: float = 2.0
    steps: int = 200
    m: int = 1
    alpha: float = 0.05
    draws: int = 10_000
    seed: int = 0
    mc_backend: str = "gaussian"
    weighting: str = "length"
    axial_doubling: bool = True
    ess_threshold: float = 5.0
    # angular scales (degrees) of the curves drawn by ``smooth``: h = radians(deg)**2
    smooth_degrees: list = field(default_factory=lambda: [3.0, 6.0, 20.0])
    bins: int = 180
    kmax: int = 4
    units: str = "log-radians"
    output_dir: str = "wizer-out"
    formats: list = field(default_factory=lambda: ["csv", "json", "svg"])
    svg_timestamp: bool = False

    def validate(self):
        if self.grid_size < 8 or self.grid_size % 2:
            raise InputError(f"grid_size must be an even integer >= 8, got {self.grid_size}")
        if not 0 < self.h0 < self.hmax:
            raise InputError(f"need 0 < h0 < hmax, got {self.h0}, {self.hmax}")
        if self.steps < 1:
            raise InputError("steps must be >= 1")
        if self.m not in (0, 1, 2):
            raise InputError(f"m must be 0, 1 or 2, got {self.m}")
        if not 0 < self.alpha < 1:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.draws < 1000:
            raise InputError("draws must be >= 1000")
        if self.bins < 2 or self.bins % 2:
            raise InputError("bins must be an even integer >= 2")
        if self.kmax < 1:
            raise InputError("kmax must be >= 1")
        unknown = set(self.formats) - {"csv", "json", "svg"}
        if unknown:
            raise InputError(f"unknown output format(s): {', '.join(sorted(unknown))}")
        return self

    @property
    def smooth_bandwidths(self):
        return [math.radians(d) ** 2 for d in self.smooth_degrees]

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise InputError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None

    def updated(self, **overrides):
        d = asdict(self)
        d.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_dict(d).validate()
