"""Empirical circular scale-space tube.

For a (possibly weighted) circular sample the tube is the family of wrapped
Gaussian kernel density estimates ``f_h`` and their derivatives ``D^m f_h``
evaluated on an angle grid, for ``h`` along a bandwidth grid.  Each slice
also carries the effective sample size used to mask data-poor regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _accel
from .circle import AngleGrid, GridFunction, count_modes, wrap
from .errors import InputError
from .kernels import WrappedGaussian, wg_eval

DEFAULT_GRID_SIZE = 512
DEFAULT_H0 = 0.01
DEFAULT_HMAX = 2.0
DEFAULT_STEPS = 200
ESS_THRESHOLD = 5.0


@dataclass(frozen=True, eq=False)
class CircularSample:
    """Observed angles with optional positive weights.

    ``effective_n`` is the sample size used for ``sqrt(n)`` scaling; it
    defaults to the number of observations.
    """

    angles: np.ndarray
    weights: np.ndarray | None = None
    effective_n: float | None = None

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float).ravel()
        if not np.all(np.isfinite(angles)):
            raise InputError("sample angles must be finite")
        angles = wrap(angles) if angles.size else angles
        angles = np.atleast_1d(angles)
        angles.flags.writeable = False
        object.__setattr__(self, "angles", angles)
        if self.weights is not None:
            w = np.array(self.weights, dtype=float).ravel()
            if w.shape != angles.shape:
                raise InputError(f"{w.size} weights for {angles.size} angles")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise InputError("weights must be finite and positive")
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)
        if self.effective_n is None:
            object.__setattr__(self, "effective_n", float(angles.size))
        elif not self.effective_n > 0:
            raise InputError(f"effective_n must be positive, got {self.effective_n!r}")

    @property
    def n(self):
        return self.angles.size

    @cached_property
    def weight_array(self):
        if self.weights is None:
            return np.ones(self.n)
        return self.weights

    @property
    def total_weight(self):
        return float(self.weight_array.sum())

    def rotate(self, delta):
        return CircularSample(self.angles + delta, self.weights, self.effective_n)


@dataclass(frozen=True)
class BandwidthGrid:
    """Log-spaced bandwidths from ``h0`` to ``hmax``."""

    h0: float = DEFAULT_H0
    hmax: float = DEFAULT_HMAX
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if not (0 < self.h0 < self.hmax and math.isfinite(self.hmax)):
            raise InputError(f"need 0 < h0 < hmax, got h0={self.h0!r}, hmax={self.hmax!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise InputError(f"steps must be a positive integer, got {self.steps!r}")

    @cached_property
    def values(self):
        if self.steps == 1:
            v = np.array([self.h0])
        else:
            v = np.geomspace(self.h0, self.hmax, int(self.steps))
            v[0], v[-1] = self.h0, self.hmax
        v.flags.writeable = False
        return v

    def __len__(self):
        return int(self.steps)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True, eq=False)
class TubeSlice:
    h: float
    m: int
    values: GridFunction
    ess: GridFunction

    @property
    def grid(self):
        return self.values.grid

    def modes(self):
        """Mode count of the slice (meaningful for ``m = 0``)."""
        return count_modes(self.values)


def _check_order(m):
    if m not in (0, 1, 2):
        raise InputError(f"derivative order must be 0, 1 or 2, got {m!r}")


def kde(sample: CircularSample, h: float, m: int = 0, grid: AngleGrid | None = None,
        kernel: WrappedGaussian | None = None) -> TubeSlice:
    """Weighted wrapped-Gaussian KDE (or its ``m``-th derivative) on ``grid``."""
    _check_order(m)
    if sample.n == 0:
        raise InputError("cannot smooth an empty sample")
    if grid is None:
        grid = AngleGrid(DEFAULT_GRID_SIZE)
    if kernel is None:
        kernel = WrappedGaussian.with_default_cutoff(h)
    elif kernel.h != h:
        raise InputError("kernel bandwidth does not match h")
    w = sample.weight_array
    total = sample.total_weight
    raw, dens = _accel.kde_sums(grid.nodes, sample.angles, w, kernel.h, m, kernel.C)
    values = raw / total
    ess = dens / wg_eval(kernel, 0.0, 0) * (sample.effective_n / total)
    return TubeSlice(float(h), m, GridFunction(grid, values), GridFunction(grid, ess))


def tube(sample: CircularSample, bws: BandwidthGrid, m: int = 0,
         grid: AngleGrid | None = None) -> list[TubeSlice]:
    """One :class:`TubeSlice` per bandwidth, in increasing ``h``.

    Slices are computed independently so any evaluation order (or a parallel
    map over bandwidths) gives the same result.
    """
    grid = grid or AngleGrid(DEFAULT_GRID_SIZE)
    return [kde(sample, float(h), m, grid) for h in bws.values]


def ess_mask(slice_: TubeSlice, threshold: float = ESS_THRESHOLD) -> np.ndarray:
    """Boolean array, true where the effective sample size is ``<= threshold``."""
    return slice_.ess.values <= threshold


def mode_profile(sample: CircularSample, bws: BandwidthGrid, grid: AngleGrid) -> np.ndarray:
    """``count_modes`` of the density slice at each bandwidth."""
    return np.array([kde(sample, float(h), 0, grid).modes() for h in bws.values])


@dataclass(frozen=True)
class WrappedNormalMixture:
    """Finite mixture of wrapped normals, used for simulation and tests."""

    means: tuple
    variances: tuple
    weights: tuple = field(default=())

    def __post_init__(self):
        if len(self.means) != len(self.variances) or not self.means:
            raise InputError("means and variances must be nonempty and of equal length")
        if not self.weights:
            object.__setattr__(self, "weights", tuple([1.0 / len(self.means)] * len(self.means)))
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise InputError("mixture weights must sum to one")

    def sample(self, n, rng) -> CircularSample:
        comp = rng.choice(len(self.means), size=n, p=np.asarray(self.weights))
        x = rng.normal(np.asarray(self.means)[comp], np.sqrt(np.asarray(self.variances))[comp])
        return CircularSample(wrap(x))

    def density(self, t, m=0):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for mu, var, p in zip(self.means, self.variances, self.weights):
            out += p * wg_eval(WrappedGaussian.with_default_cutoff(var), t - mu, m)
        return out

    def on_grid(self, grid, m=0) -> GridFunction:
        return GridFunction(grid, self.density(grid.nodes, m))

    @classmethod
    def random(cls, rng, max_components=4, var_range=(0.005, 0.5)):
        c = int(rng.integers(1, max_components + 1))
        means = tuple(float(x) for x in rng.uniform(0, 2 * math.pi, c))
        variances = tuple(float(x) for x in np.exp(rng.uniform(*np.log(var_range), c)))
        w = rng.dirichlet(np.ones(c))
        w = w / w.sum()
        w[-1] = 1.0 - w[:-1].sum()
        return cls(means, variances, tuple(float(x) for x in w))
