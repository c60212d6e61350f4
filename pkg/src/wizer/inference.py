"""Simultaneous sign tests over the scale-space tube.

The threshold is ``q / sqrt(n)`` where ``q`` is the ``1 - alpha`` quantile of
the supremum of ``|G|`` for a centred Gaussian process ``G`` on the grid with
the plug-in covariance of ``D^m K_{h0}(z - X)``.  One threshold, computed at
the smallest bandwidth, serves every ``h >= h0``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .circle import AngleGrid
from .errors import InputError, NumericError
from .kernels import WrappedGaussian
from .scalespace import (DEFAULT_GRID_SIZE, ESS_THRESHOLD, BandwidthGrid, CircularSample,
                         ess_mask, kde)

DEFAULT_DRAWS = 10_000
DEFAULT_ALPHA = 0.05
_BLOCK = 1000  # draws per independent RNG stream


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    grid: AngleGrid
    h0: float
    m: int
    matrix: np.ndarray


@dataclass(frozen=True)
class QuantileEstimate:
    alpha: float
    q: float
    draws: int
    seed: int
    backend: str = "gaussian"

    def to_dict(self):
        return {"alpha": self.alpha, "q": self.q, "draws": self.draws,
                "seed": self.seed, "backend": self.backend}


@dataclass(frozen=True)
class MonteCarloConfig:
    draws: int = DEFAULT_DRAWS
    seed: int = 0
    backend: str = "gaussian"  # or "bootstrap"

    def __post_init__(self):
        if self.backend not in ("gaussian", "bootstrap"):
            raise InputError(f"unknown Monte Carlo backend {self.backend!r}")


def kernel_values(sample: CircularSample, h0: float, m: int, grid: AngleGrid) -> np.ndarray:
    """``(n, G)`` matrix of ``D^m K_{h0}(node_g - X_j)``."""
    kern = WrappedGaussian.with_default_cutoff(h0)
    return _accel.kernel_matrix(grid.nodes, sample.angles, kern.h, m, kern.C)


def estimate_covariance(sample: CircularSample, h0: float, m: int = 1,
                        grid: AngleGrid | None = None) -> CovarianceModel:
    """Plug-in covariance of ``D^m K_{h0}(z - X)`` across grid nodes.

    Observations are weighted by their normalised weights; the unweighted
    case is the usual (1/n) sample covariance.
    """
    grid = grid or AngleGrid(DEFAULT_GRID_SIZE)
    if sample.n < 2:
        raise NumericError("covariance needs at least two observations")
    if not h0 > 0:
        raise InputError(f"h0 must be positive, got {h0!r}")
    V = kernel_values(sample, h0, m, grid)
    p = sample.weight_array / sample.total_weight
    centred = V - p @ V
    cov = (centred * p[:, None]).T @ centred
    cov = 0.5 * (cov + cov.T)
    return CovarianceModel(grid, float(h0), m, cov)


def psd_factor(matrix, rtol=1e-8):
    """Factor ``L`` with ``L @ L.T`` the eigenvalue-clipped version of ``matrix``.

    Columns belonging to negligible eigenvalues are dropped.
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NumericError(f"covariance must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericError("covariance has non-finite entries")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale > 0 and float(np.max(np.abs(A - A.T))) > rtol * scale:
        raise NumericError("covariance is not symmetric; refusing to repair")
    evals, evecs = np.linalg.eigh(0.5 * (A + A.T))
    keep = evals > max(evals.max(initial=0.0), 0.0) * 1e-13
    return evecs[:, keep] * np.sqrt(evals[keep])


def _stream(seed, block):
    return np.random.default_rng(np.random.SeedSequence([int(seed), block]))


def _sup_draws(factor, draws, seed):
    out = np.empty(draws)
    r = factor.shape[1]
    for b, start in enumerate(range(0, draws, _BLOCK)):
        stop = min(start + _BLOCK, draws)
        if r == 0:
            out[start:stop] = 0.0
            continue
        z = _stream(seed, b).standard_normal((stop - start, r))
        out[start:stop] = np.abs(z @ factor.T).max(axis=1)
    return out


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha!r}")


def sup_quantile(cov: CovarianceModel | np.ndarray, alpha: float = DEFAULT_ALPHA,
                 draws: int = DEFAULT_DRAWS, seed: int = 0) -> QuantileEstimate:
    """Monte Carlo ``1 - alpha`` quantile of ``max_g |G(node_g)|``.

    Draws are generated in blocks of 1000 from streams keyed by
    ``(seed, block)``, so the result does not depend on how blocks are
    scheduled.
    """
    _check_alpha(alpha)
    if draws < 1000:
        raise InputError(f"need at least 1000 Monte Carlo draws, got {draws}")
    matrix = cov.matrix if isinstance(cov, CovarianceModel) else np.atleast_2d(cov)
    sups = _sup_draws(psd_factor(matrix), int(draws), seed)
    q = float(np.quantile(sups, 1.0 - alpha))
    return QuantileEstimate(float(alpha), q, int(draws), int(seed))


def bootstrap_quantile(sample: CircularSample, h0: float, m: int = 1,
                       grid: AngleGrid | None = None, alpha: float = DEFAULT_ALPHA,
                       draws: int = DEFAULT_DRAWS, seed: int = 0) -> QuantileEstimate:
    """Bootstrap alternative to :func:`sup_quantile`.

    Resamples the observations (multinomially, by weight) and records
    ``sqrt(n) * max_g |D^m f*_{h0} - D^m f_{h0}|``.
    """
    _check_alpha(alpha)
    grid = grid or AngleGrid(DEFAULT_GRID_SIZE)
    V = kernel_values(sample, h0, m, grid)
    p = sample.weight_array / sample.total_weight
    base = p @ V
    n = sample.n
    sups = np.empty(draws)
    for b, start in enumerate(range(0, draws, _BLOCK)):
        stop = min(start + _BLOCK, draws)
        counts = _stream(seed, b).multinomial(n, p, size=stop - start) / n
        sups[start:stop] = np.abs(counts @ V - base).max(axis=1)
    sups *= math.sqrt(n)
    q = float(np.quantile(sups, 1.0 - alpha))
    return QuantileEstimate(float(alpha), q, int(draws), int(seed), "bootstrap")


@dataclass(frozen=True, eq=False)
class SignatureMap:
    """Significance signs over bandwidths (rows) by grid angles (columns).

    ``signs`` holds the three-way test outcome in {-1, 0, +1}; ``mask`` marks
    data-poor cells.  Masked cells count as zeros in the per-row signature.
    """

    grid: AngleGrid
    bws: BandwidthGrid
    m: int
    signs: np.ndarray
    mask: np.ndarray
    threshold: float
    quantile: QuantileEstimate | None = None
    signature: np.ndarray = field(init=False)

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=np.int8)
        mask = np.asarray(self.mask, dtype=bool)
        shape = (len(self.bws), self.grid.size)
        if signs.shape != shape or mask.shape != shape:
            raise InputError(f"signature map arrays must have shape {shape}")
        for arr in (signs, mask):
            arr.flags.writeable = False
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "signature", row_signatures(signs, mask))

    @property
    def cells(self):
        """Masked array of signs, masked where data are too sparse."""
        return np.ma.array(self.signs, mask=self.mask)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["h", "w_h"] + [f"{t:.10g}" for t in self.grid.nodes])
        for i, h in enumerate(self.bws.values):
            row = ["NA" if self.mask[i, g] else str(int(self.signs[i, g]))
                   for g in range(self.grid.size)]
            writer.writerow([f"{h:.10g}", int(self.signature[i])] + row)
        return buf.getvalue()


def row_signatures(signs, mask=None) -> np.ndarray:
    """Cyclic sign changes of each row, treating masked cells as zero."""
    rows = np.asarray(signs, dtype=float)
    if mask is not None:
        rows = np.where(mask, 0.0, rows)
    return _accel.sign_changes_rows(rows)


def classify(values, threshold):
    """Three-way test: +1 above ``threshold``, -1 below ``-threshold``, else 0."""
    values = np.asarray(values, dtype=float)
    return np.where(values > threshold, 1, np.where(values < -threshold, -1, 0)).astype(np.int8)


def signature_map(sample: CircularSample, bws: BandwidthGrid, m: int = 1,
                  grid: AngleGrid | None = None, alpha: float = DEFAULT_ALPHA,
                  mc: MonteCarloConfig | None = None, *, quantile: QuantileEstimate | None = None,
                  threshold: float | None = None, ess_threshold: float = ESS_THRESHOLD) -> SignatureMap:
    """Three-way sign test at every (bandwidth, node) cell.

    ``quantile`` reuses a precomputed estimate; ``threshold`` overrides the
    ``q / sqrt(n)`` rejection level outright.
    """
    grid = grid or AngleGrid(DEFAULT_GRID_SIZE)
    mc = mc or MonteCarloConfig()
    if threshold is None:
        if quantile is None:
            if mc.backend == "bootstrap":
                quantile = bootstrap_quantile(sample, bws.h0, m, grid, alpha, mc.draws, mc.seed)
            else:
                cov = estimate_covariance(sample, bws.h0, m, grid)
                quantile = sup_quantile(cov, alpha, mc.draws, mc.seed)
        threshold = quantile.q / math.sqrt(sample.effective_n)
    signs = np.zeros((len(bws), grid.size), dtype=np.int8)
    mask = np.zeros((len(bws), grid.size), dtype=bool)
    for i, h in enumerate(bws.values):
        sl = kde(sample, float(h), m, grid)
        signs[i] = classify(sl.values.values, threshold)
        mask[i] = ess_mask(sl, ess_threshold)
    return SignatureMap(grid, bws, m, signs, mask, float(threshold), quantile)
