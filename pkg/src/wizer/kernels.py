"""Circular kernels: wrapped Gaussian, von Mises and user-supplied spectral kernels.

The wrapped Gaussian with bandwidth ``h`` (variance, in squared radians) is

    K_h(t) = sum_j phi((t + 2 pi j) / sqrt(h)) / sqrt(h),

a density in ``dt`` whose Fourier coefficients are exactly ``exp(-k^2 h / 2)``.
In practice the sum is cut off at ``|j| <= C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._accel import _wrapped_terms_numpy
from .circle import TWO_PI, GridFunction, frequencies, wrap_signed
from .errors import DomainError, InputError

DEFAULT_CUTOFF = 4
#: bandwidth range over which the default cutoff is certified
CERTIFIED_RANGE = (0.01, 2.0)


def minimal_cutoff(h, margin=1.0):
    """Smallest ``C`` with ``2*pi*(C - 1) >= sqrt(margin * h)``."""
    return max(1, math.ceil(math.sqrt(margin * h) / TWO_PI) + 1)


@dataclass(frozen=True)
class WrappedGaussian:
    h: float
    C: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise InputError(f"bandwidth must be positive and finite, got {self.h!r}")
        if int(self.C) != self.C or self.C < 1:
            raise InputError(f"wrapping cutoff must be an integer >= 1, got {self.C!r}")

    @classmethod
    def with_default_cutoff(cls, h):
        """Kernel with ``C = 4``, raised when ``h`` leaves the certified range."""
        return cls(h, max(DEFAULT_CUTOFF, minimal_cutoff(h, margin=20.0)))

    @property
    def is_certified(self):
        return TWO_PI * (self.C - 1) >= math.sqrt(self.h)

    def __call__(self, t, m=0):
        return wg_eval(self, t, m)

    def fourier(self, k):
        return wg_fourier(self, k)


def wg_eval(kernel: WrappedGaussian, t, m: int = 0):
    """``m``-th derivative (m in 0, 1, 2) of the C-truncated wrapped normal density."""
    if m not in (0, 1, 2):
        raise InputError(f"derivative order must be 0, 1 or 2, got {m!r}")
    t_arr = np.asarray(t, dtype=float)
    out = _wrapped_terms_numpy(np.atleast_1d(wrap_signed(t_arr)), kernel.h, m, int(kernel.C))
    return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)


def wg_fourier(kernel: WrappedGaussian, k):
    """Closed-form Fourier coefficient ``exp(-k^2 h / 2)`` of the untruncated kernel."""
    k = np.asarray(k, dtype=float)
    out = np.exp(-0.5 * k * k * kernel.h)
    return float(out) if out.ndim == 0 else out


def gaussian_density(x, h):
    """Centred normal density with variance ``h``."""
    return np.exp(-0.5 * np.square(x) / h) / math.sqrt(TWO_PI * h)


def wg_truncation_bound(h: float, C: int, conservative: bool = False) -> float:
    """Sup-norm bound on the first-derivative error from cutting the wrap sum at ``C``.

    Holds for the derivative of the kernel smoothed against any empirical
    measure, provided ``2*pi*(C - 1) >= sqrt(h)``.  The tail sum of
    integrals telescopes to ``phi_h(2*pi*(C - 1)) / pi``; ``conservative=True``
    returns the looser ``phi_h(2*pi*(C - 2)) / pi``.
    """
    if not h > 0:
        raise InputError(f"bandwidth must be positive, got {h!r}")
    if TWO_PI * (C - 1) < math.sqrt(h):
        raise DomainError(
            f"truncation bound needs 2*pi*(C-1) >= sqrt(h); h={h:g} requires C >= {minimal_cutoff(h)}")
    shift = C - 2 if conservative else C - 1
    return float(gaussian_density(TWO_PI * shift, h)) / math.pi


def bessel_i0(kappa: float, rtol: float = 1e-14) -> float:
    """Modified Bessel function ``I_0`` by its power series.

    Terms are ``((kappa/2)^j / j!)^2``; summation stops once a term falls
    below ``rtol`` relative to the partial sum and the terms are decreasing.
    """
    if kappa < 0 or not math.isfinite(kappa):
        raise InputError(f"kappa must be finite and >= 0, got {kappa!r}")
    x = 0.25 * kappa * kappa
    term = 1.0
    total = 1.0
    j = 0
    while True:
        j += 1
        term *= x / (j * j)
        total += term
        if term < rtol * total and j * j > x:
            return total


@dataclass(frozen=True)
class VonMises:
    kappa: float
    mu: float = 0.0

    def __post_init__(self):
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise InputError(f"kappa must be finite and >= 0, got {self.kappa!r}")

    def __call__(self, t):
        return vm_eval(self, t)

    def fourier(self, k):
        return vm_fourier(self.kappa, k)


def vm_eval(kernel: VonMises, t):
    """Von Mises density ``exp(kappa cos(t - mu)) / (2 pi I_0(kappa))``."""
    # exp(kappa*(cos - 1)) / I_0 keeps large kappa finite
    log_norm = math.log(TWO_PI * bessel_i0(kernel.kappa) * math.exp(-kernel.kappa))
    t = np.asarray(t, dtype=float)
    out = np.exp(kernel.kappa * (np.cos(t - kernel.mu) - 1.0) - log_norm)
    return float(out) if out.ndim == 0 else out


def vm_fourier(kappa, k):
    """Coefficients ``I_k(kappa) / I_0(kappa)`` of the centred von Mises density."""
    k = np.abs(np.asarray(k))
    if kappa == 0:
        out = (k == 0).astype(float)
    else:
        out = special.ive(k, kappa) / special.ive(0, kappa)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class SpectralKernel:
    """Symmetric kernel given by its coefficients ``L_k``, ``k = 0..kmax``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float).ravel()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise InputError("spectral kernel needs finite coefficients")
        if abs(c[0] - 1.0) > 1e-12:
            raise InputError(f"spectral kernel must have unit mass (L_0 = 1), got {c[0]!r}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def kmax(self):
        return self.coefficients.size - 1

    @classmethod
    def from_wrapped_gaussian(cls, h, kmax):
        return cls(wg_fourier(WrappedGaussian(h), np.arange(kmax + 1)))

    @classmethod
    def from_von_mises(cls, kappa, kmax):
        return cls(vm_fourier(kappa, np.arange(kmax + 1)))

    def fourier(self, k):
        k = np.abs(np.asarray(k, dtype=int))
        if np.any(k > self.kmax):
            raise InputError(f"coefficient requested beyond kmax={self.kmax}")
        return self.coefficients[k]


def _multiplier(kernel, size):
    k = np.abs(frequencies(size))
    if isinstance(kernel, (WrappedGaussian, SpectralKernel)):
        return np.asarray(kernel.fourier(k), dtype=float)
    if isinstance(kernel, VonMises):
        if kernel.mu != 0:
            raise InputError("spectral smoothing needs a centred (mu = 0) von Mises kernel")
        return np.asarray(vm_fourier(kernel.kappa, k), dtype=float)
    raise InputError(f"unsupported kernel type {type(kernel).__name__}")


def spectral_smooth(f: GridFunction, kernel) -> GridFunction:
    """Multiply the grid Fourier coefficients of ``f`` by the kernel's."""
    spec = np.fft.fft(f.values) * _multiplier(kernel, f.grid.size)
    return GridFunction(f.grid, np.fft.ifft(spec).real)


def kernel_on_grid(kernel, grid, m=0) -> GridFunction:
    """Kernel values (centred at node 0) sampled on ``grid``."""
    if isinstance(kernel, WrappedGaussian):
        return GridFunction(grid, wg_eval(kernel, grid.nodes, m))
    if isinstance(kernel, VonMises):
        return GridFunction(grid, vm_eval(kernel, grid.nodes))
    raise InputError(f"cannot sample kernel type {type(kernel).__name__}")
