"""Circle geometry, cyclic sign changes and grid functions on the circle.

Densities are taken with respect to Lebesgue measure ``dt`` on ``[0, 2*pi)``
so a probability density integrates to one and its Fourier coefficients are
``f_k = int f(t) exp(-i k t) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _accel
from .errors import InputError

TWO_PI = 2.0 * math.pi


def wrap(theta):
    """Reduce angles to ``[0, 2*pi)``; works on scalars and arrays."""
    out = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def wrap_signed(theta):
    """Reduce angle differences to the branch ``[-pi, pi)``."""
    out = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    out = np.where(out >= math.pi, -math.pi, out)
    return float(out) if np.ndim(out) == 0 else out


def circular_distance(a, b):
    """Geodesic distance on the unit circle, in ``[0, pi]``."""
    d = np.abs(wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class Angle:
    """A point on the unit circle stored by its branch angle in ``[0, 2*pi)``."""

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise InputError(f"angle must be finite, got {self.theta!r}")
        object.__setattr__(self, "theta", wrap(float(self.theta)))

    def __add__(self, other):
        other = other.theta if isinstance(other, Angle) else float(other)
        return Angle(self.theta + other)

    def __sub__(self, other):
        other = other.theta if isinstance(other, Angle) else float(other)
        return Angle(self.theta - other)

    def __neg__(self):
        return Angle(-self.theta)

    def __float__(self):
        return self.theta

    def distance(self, other):
        other = other.theta if isinstance(other, Angle) else float(other)
        return float(circular_distance(self.theta, other))


@dataclass(frozen=True)
class AngleGrid:
    """``size`` equally spaced nodes ``2*pi*g/size``."""

    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 8 or self.size % 2:
            raise InputError(f"grid size must be an even integer >= 8, got {self.size!r}")

    @property
    def step(self):
        return TWO_PI / self.size

    @cached_property
    def nodes(self):
        nodes = np.arange(self.size) * self.step
        nodes.flags.writeable = False
        return nodes

    def index(self, g):
        return int(g) % self.size


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values of a function at the nodes of an :class:`AngleGrid`."""

    grid: AngleGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            raise InputError(
                f"expected {self.grid.size} values, got array of shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("grid function values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid, func):
        return cls(grid, func(grid.nodes))

    def integral(self):
        return float(self.values.sum() * self.grid.step)

    def rotate(self, steps):
        """Function ``t -> f(t - steps * grid.step)``."""
        return GridFunction(self.grid, np.roll(self.values, steps))

    def __len__(self):
        return self.grid.size


def _as_values(f):
    return f.values if isinstance(f, GridFunction) else np.asarray(f, dtype=float)


def cyclic_sign_changes(x) -> int:
    """Number of sign alternations of ``x`` read cyclically, ignoring zeros.

    Always even; zero for an all-zero or empty sequence.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InputError("cyclic_sign_changes requires finite entries")
    if x.size == 0:
        return 0
    return int(_accel.sign_changes_rows(x[None, :])[0])


def sign_changes_of_grid_function(f: GridFunction) -> int:
    return cyclic_sign_changes(f.values)


def cyclic_difference(values):
    values = np.asarray(values, dtype=float)
    return np.roll(values, -1) - values


def count_modes(f) -> int:
    """Number of local maxima, read off the cyclic first difference."""
    return cyclic_sign_changes(cyclic_difference(_as_values(f))) // 2


def _check_same_grid(f, g):
    if f.grid != g.grid:
        raise InputError(f"grid mismatch: {f.grid.size} vs {g.grid.size} nodes")


def circular_convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Riemann sum of ``(g * f)(t) = int g(t - s) f(s) ds`` on the grid.

    The node weight is ``2*pi/G``, so two grid densities convolve to a grid
    density and a uniform ``g`` returns the constant ``1/(2*pi)``.
    """
    _check_same_grid(f, g)
    spec = np.fft.rfft(f.values) * np.fft.rfft(g.values)
    out = np.fft.irfft(spec, n=f.grid.size) * f.grid.step
    return GridFunction(f.grid, out)


def fourier_coefficients(f: GridFunction, kmax: int) -> dict[int, complex]:
    """Discrete ``f_k`` for ``|k| <= kmax``, keyed by ``k``."""
    G = f.grid.size
    if kmax < 0 or kmax >= G // 2:
        raise InputError(f"kmax={kmax} aliases on a grid of {G} nodes (need kmax < {G // 2})")
    spec = np.fft.fft(f.values) * f.grid.step
    return {k: complex(spec[k % G]) for k in range(-kmax, kmax + 1)}


def fourier_array(values, step=None):
    """All discrete coefficients ``f_k`` in numpy FFT order."""
    values = _as_values(values)
    if step is None:
        step = TWO_PI / values.size
    return np.fft.fft(values) * step


def frequencies(size):
    """Signed integer frequencies in numpy FFT order."""
    return np.fft.fftfreq(size, d=1.0 / size).astype(int)
