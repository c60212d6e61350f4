"""Numerical checks of the circular scale-space axioms.

Covers the semigroup identity, kernel symmetry, the closed-form Fourier
coefficients, the strong-Lipschitz growth bound, mode-count monotonicity
sweeps and a constructed density on which von Mises smoothing creates a mode.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np
from scipy import optimize

from .circle import (TWO_PI, AngleGrid, GridFunction, circular_convolve, count_modes,
                     fourier_array, frequencies, wrap_signed)
from .errors import DomainError, InputError
from .kernels import (VonMises, WrappedGaussian, kernel_on_grid,
                      spectral_smooth, vm_fourier, wg_eval, wg_fourier)
from .scalespace import BandwidthGrid, CircularSample, WrappedNormalMixture, kde

FINE_GRID = 4096


class WrappedGaussianFamily:
    name = "wrapped-gaussian"

    def kernel(self, h):
        return WrappedGaussian(h)

    def smooth(self, f, h):
        if h == 0:
            return f
        return spectral_smooth(f, WrappedGaussian(h))

    def compose(self, h1, h2):
        return h1 + h2


class VonMisesFamily:
    """Von Mises kernels indexed by bandwidth ``h`` through ``kappa = 1 / h``."""

    name = "von-mises"

    def kernel(self, h):
        return VonMises(1.0 / h)

    def smooth(self, f, h):
        if h == 0:
            return f
        return spectral_smooth(f, VonMises(1.0 / h))

    def compose(self, h1, h2):
        return None  # no closed-form composition law


FAMILIES = {"wrapped-gaussian": WrappedGaussianFamily, "von-mises": VonMisesFamily}


def get_family(family):
    if isinstance(family, str):
        try:
            return FAMILIES[family]()
        except KeyError:
            raise InputError(f"unknown kernel family {family!r}") from None
    return family


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float | None = None
    detail: str = ""
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.worst = float(self.worst)


@dataclass
class AxiomReport:
    family: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, check):
        self.checks.append(check)
        return check

    def to_dict(self):
        return {"family": self.family, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], [CheckResult(**c) for c in d["checks"]])

    def to_text(self):
        lines = [f"[{self.family}]"]
        for c in self.checks:
            tol = "" if c.tolerance is None else f" (tol {c.tolerance:.1e})"
            lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}: worst={c.worst:.3e}{tol}"
                         + (f"  {c.detail}" if c.detail else ""))
        return "\n".join(lines)


def band_limited_probe(grid, degree=8, seed=0) -> GridFunction:
    """Positive trigonometric-polynomial density of the given degree."""
    rng = np.random.default_rng(seed)
    t = grid.nodes
    a = rng.normal(size=degree) / np.arange(1, degree + 1)
    b = rng.normal(size=degree) / np.arange(1, degree + 1)
    k = np.arange(1, degree + 1)[:, None]
    wave = a @ np.cos(k * t) + b @ np.sin(k * t)
    wave *= 0.9 / np.abs(wave).max()
    return GridFunction(grid, (1.0 + wave) / TWO_PI)


def check_semigroup(family, h1, h2, grid, probe=None) -> float:
    """Sup-norm gap between smoothing twice and smoothing once.

    For families without a composition law the gap is minimised over the
    single-kernel parameter.
    """
    family = get_family(family)
    f = probe if probe is not None else band_limited_probe(grid)
    twice = family.smooth(family.smooth(f, h1), h2).values
    target = family.compose(h1, h2)
    if target is not None:
        return float(np.abs(twice - family.smooth(f, target).values).max())

    def gap(log_h):
        return float(np.abs(twice - family.smooth(f, math.exp(log_h)).values).max())

    lo, hi = math.log(min(h1, h2) * 0.5), math.log((h1 + h2) * 4)
    res = optimize.minimize_scalar(gap, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-8})
    return min(res.fun, gap(lo), gap(hi))


@dataclass
class SweepResult:
    bandwidths: list
    modes: list
    monotone: bool
    violation: int | None = None  # index i with modes[i] > modes[i-1]
    confirmed: bool | None = None  # violation also present on the fine grid

    def to_dict(self):
        return asdict(self)


# Spectral smoothing leaves round-off ripples of order eps * max|f| where the
# smoothed density has underflowed; below this relative level values are zero.
NOISE_FLOOR = 1e-12


def _denoise(f: GridFunction) -> GridFunction:
    v = f.values
    return GridFunction(f.grid, np.where(np.abs(v) <= NOISE_FLOOR * np.abs(v).max(), 0.0, v))


def _first_increase(counts):
    for i in range(1, len(counts)):
        if counts[i] > counts[i - 1]:
            return i
    return None


def causality_sweep(family, density: GridFunction, bws, fine_density: GridFunction | None = None,
                    include_raw: bool = True) -> SweepResult:
    """Mode counts of the smoothed density along ``bws``.

    With ``include_raw`` the unsmoothed density leads the sequence (``h = 0``).
    Values below ``NOISE_FLOOR`` times the maximum count as zero.  A violation is re-checked on ``fine_density`` when given.
    """
    family = get_family(family)
    hs = [float(h) for h in (bws.values if isinstance(bws, BandwidthGrid) else bws)]
    if include_raw:
        hs = [0.0] + hs

    def counts(f):
        return [count_modes(_denoise(family.smooth(f, h))) for h in hs]

    modes = counts(density)
    i = _first_increase(modes)
    confirmed = None
    if i is not None and fine_density is not None:
        confirmed = _first_increase(counts(fine_density)) is not None
    return SweepResult(hs, modes, i is None, i, confirmed)


def sample_causality(sample: CircularSample, bws: BandwidthGrid, grid_size=512,
                     fine_size=FINE_GRID) -> SweepResult:
    """Mode-count monotonicity of an empirical KDE tube, fine-grid confirmed."""
    hs = [float(h) for h in bws.values]

    def counts(size):
        grid = AngleGrid(size)
        return [kde(sample, h, 0, grid).modes() for h in hs]

    modes = counts(grid_size)
    i = _first_increase(modes)
    confirmed = None
    if i is not None:
        confirmed = _first_increase(counts(fine_size)) is not None
    return SweepResult(hs, modes, i is None, i, confirmed)


# ---------------------------------------------------------------------------
# von Mises counterexample

SPIKE_SD = 0.03
# (cleft half-width, cleft depth as a fraction of the base level,
#  spike offsets a and b from the cleft, spike masses pa and pb)
_LATTICE = dict(
    width=(0.1, 0.2, 0.4, 0.8, 1.2),
    depth=(0.5, 0.9, 1.0),
    offset=tuple(round(0.2 * i, 1) for i in range(1, 16)),
    mass=(0.002, 0.005, 0.01, 0.02, 0.05, 0.1),
)


def spikes_and_cleft(grid, width, depth, a, b, pa, pb, spike_sd=SPIKE_SD) -> GridFunction:
    """Uniform density plus spikes at ``a`` and ``-b`` minus a raised-cosine cleft at 0.

    The cleft has half-width ``width`` and removes mass ``depth * width / (2 pi)``,
    so its bottom sits ``depth`` of the way down to zero.
    """
    t = grid.nodes
    u = wrap_signed(t)
    cleft = np.where(np.abs(u) < width, (1.0 + np.cos(np.pi * u / width)) / (2.0 * width), 0.0)
    c = depth * width / TWO_PI
    spike = WrappedGaussian(spike_sd ** 2, 8)
    f = ((1.0 - pa - pb + c) / TWO_PI + pa * wg_eval(spike, t - a)
         + pb * wg_eval(spike, t + b) - c * cleft)
    return GridFunction(grid, f / (f.sum() * grid.step))


@dataclass
class VonMisesCounterexample:
    kappa: float
    found: bool
    params: dict | None
    grid_size: int
    modes_before: int | None
    modes_after: int | None
    modes_after_spectral: int | None = None
    tried: int = 0

    def density(self, grid=None) -> GridFunction:
        if not self.params:
            raise InputError("no counterexample density recorded")
        return spikes_and_cleft(grid or AngleGrid(self.grid_size), **self.params)

    def revalidate(self) -> "VonMisesCounterexample":
        before, after, after_spec = _vm_modes(self.density(), self.kappa)
        return VonMisesCounterexample(self.kappa, before == 2 and min(after, after_spec) >= 3,
                                      dict(self.params), self.grid_size, before, after, after_spec,
                                      self.tried)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _vm_modes(f, kappa):
    direct = circular_convolve(f, kernel_on_grid(VonMises(kappa), f.grid))
    spectral = spectral_smooth(f, VonMises(kappa))
    return count_modes(f), count_modes(direct), count_modes(spectral)


def vonmises_counterexample(kappa: float = 6.0, grid_size: int = FINE_GRID) -> VonMisesCounterexample:
    """Deterministic lattice search for a bimodal density that von Mises smoothing makes trimodal.

    The first lattice point whose density has exactly two modes and whose
    smoothing (checked both by grid convolution and spectrally) has at least
    three is returned.  ``found=False`` if the lattice has none.
    """
    if not kappa > 0.5:
        raise DomainError(f"von Mises kernels with kappa <= 1/2 do not create modes; got {kappa!r}")
    grid = AngleGrid(grid_size)
    kern = np.fft.rfft(kernel_on_grid(VonMises(kappa), grid).values)
    tried = 0
    L = _LATTICE
    for width in L["width"]:
        for depth in L["depth"]:
            for a in L["offset"]:
                for b in L["offset"]:
                    if a <= width or b <= width:
                        continue
                    for pa in L["mass"]:
                        for pb in L["mass"]:
                            tried += 1
                            params = dict(width=width, depth=depth, a=a, b=b, pa=pa, pb=pb)
                            f = spikes_and_cleft(grid, **params)
                            if f.values.min() < 0 or count_modes(f) != 2:
                                continue
                            smoothed = np.fft.irfft(np.fft.rfft(f.values) * kern, n=grid_size) * grid.step
                            if count_modes(smoothed) < 3:
                                continue
                            before, after, after_spec = _vm_modes(f, kappa)
                            if min(after, after_spec) >= 3:
                                return VonMisesCounterexample(kappa, True, params, grid_size,
                                                              before, after, after_spec, tried)
    return VonMisesCounterexample(kappa, False, None, grid_size, None, None, None, tried)


def load_counterexample_fixture() -> VonMisesCounterexample:
    text = resources.files("wizer.data").joinpath("vonmises_kappa6.json").read_text()
    return VonMisesCounterexample.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# individual probes


def fourier_identity_gap(hs=(0.01, 0.1, 1.0, 2.0), kmax=16, C=8, nodes=4096) -> float:
    """Worst gap between quadrature coefficients of the truncated kernel and ``exp(-k^2 h/2)``."""
    grid = AngleGrid(nodes)
    k = frequencies(nodes)
    sel = np.abs(k) <= kmax
    worst = 0.0
    for h in hs:
        kern = WrappedGaussian(h, C)
        coef = fourier_array(wg_eval(kern, grid.nodes), grid.step)
        worst = max(worst, float(np.abs(coef[sel] - wg_fourier(kern, k[sel])).max()))
    return worst


def symmetry_gap(hs=(0.01, 0.1, 1.0, 2.0), points=257) -> float:
    t = np.linspace(0, math.pi, points)
    return max(float(np.abs(wg_eval(WrappedGaussian(h), t) - wg_eval(WrappedGaussian(h), -t)).max())
               for h in hs)


def strong_lipschitz_excess(hs=None, kmax=64) -> float:
    """Largest value of ``|exp(-k^2 h/2) - 1| - (h/2) k^2`` on a lattice (should be <= 0)."""
    hs = np.geomspace(1e-4, 10, 60) if hs is None else np.asarray(hs)
    k = np.arange(-kmax, kmax + 1)[None, :]
    h = hs[:, None]
    return float((np.abs(np.exp(-0.5 * k * k * h) - 1.0) - 0.5 * h * k * k).max())


def random_mixture_densities(count, grid, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        mix = WrappedNormalMixture.random(rng)
        yield mix, mix.on_grid(grid)


def run_suite(densities=500, seed=0, grid_size=512, vm_kappa=6.0, vd_kappa=0.3,
              semigroup_pairs=50, use_fixture=True) -> list[AxiomReport]:
    """Run every probe and return one report per kernel family."""
    rng = np.random.default_rng(seed)
    wg = AxiomReport("wrapped-gaussian")
    gap = fourier_identity_gap()
    wg.add(CheckResult("fourier-identity", gap <= 1e-8, gap, 1e-8))

    grid256 = AngleGrid(256)
    probe = band_limited_probe(grid256, seed=seed)
    pairs = rng.uniform(0.0, 2.0, size=(semigroup_pairs, 2))
    worst = max(check_semigroup("wrapped-gaussian", h1, h2, grid256, probe) for h1, h2 in pairs)
    wg.add(CheckResult("semigroup", worst <= 1e-10, worst, 1e-10))
    worst = check_semigroup("wrapped-gaussian", 0.5, 0.0, grid256, probe)
    wg.add(CheckResult("semigroup-identity", worst == 0.0, worst, 0.0))

    worst = symmetry_gap()
    wg.add(CheckResult("symmetry", worst <= 1e-12, worst, 1e-12))
    worst = strong_lipschitz_excess()
    wg.add(CheckResult("strong-lipschitz-r2", worst <= 0.0, worst, 0.0))

    grid = AngleGrid(grid_size)
    fine = AngleGrid(FINE_GRID)
    bws = BandwidthGrid(0.01, 2.0, 50)
    fails, apparent = [], 0
    for i, (mix, f) in enumerate(random_mixture_densities(densities, grid, seed)):
        res = causality_sweep("wrapped-gaussian", f, bws)
        if not res.monotone:
            apparent += 1
            res = causality_sweep("wrapped-gaussian", mix.on_grid(fine), bws)
            if not res.monotone:
                fails.append({"index": i, "mixture": asdict(mix), "modes": res.modes})
    wg.add(CheckResult("causality-sweep", not fails, float(len(fails)), 0.0,
                       f"{densities} mixtures, {apparent} coarse-grid violations, {len(fails)} confirmed",
                       {"failures": fails[:5]}))

    vm = AxiomReport("von-mises")
    gap = check_semigroup("von-mises", 0.5, 0.5, grid256, probe)
    vm.add(CheckResult("not-a-semigroup", gap > 1e-4, gap, 1e-4,
                       "kappa1 = kappa2 = 2 against the best single kappa"))
    if use_fixture and vm_kappa == 6.0:
        ce = load_counterexample_fixture().revalidate()
    else:
        ce = vonmises_counterexample(vm_kappa)
    vm.add(CheckResult(f"counterexample-kappa-{vm_kappa:g}", ce.found,
                       float(ce.modes_after or 0), None,
                       f"modes {ce.modes_before} -> {ce.modes_after}" if ce.found else "none in lattice",
                       ce.to_dict()))
    violations = 0
    for _, f in random_mixture_densities(min(densities, 200), grid, seed + 1):
        if count_modes(spectral_smooth(f, VonMises(vd_kappa))) > count_modes(f):
            violations += 1
    vm.add(CheckResult(f"variation-diminishing-kappa-{vd_kappa:g}",
                       violations == 0 if vd_kappa <= 0.5 else True, float(violations), None,
                       f"{violations} mode-count increases over {min(densities, 200)} densities"))
    return [wg, vm]


def coefficients_match(kappa, kmax=32):
    """Spectral coefficients of the von Mises kernel against grid quadrature."""
    grid = AngleGrid(1024)
    coef = fourier_array(kernel_on_grid(VonMises(kappa), grid).values, grid.step)[: kmax + 1].real
    return float(np.abs(coef - vm_fourier(kappa, np.arange(kmax + 1))).max())


__all__ = [
    "AxiomReport", "CheckResult", "SweepResult", "VonMisesCounterexample",
    "WrappedGaussianFamily", "VonMisesFamily",
    "band_limited_probe", "causality_sweep", "check_semigroup", "sample_causality",
    "vonmises_counterexample", "load_counterexample_fixture", "run_suite",
    "spikes_and_cleft", "fourier_identity_gap", "symmetry_gap", "strong_lipschitz_excess",
]
