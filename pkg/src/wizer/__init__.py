"""Circular SiZer: wrapped-Gaussian scale spaces, simultaneous sign tests and mode persistence."""

from ._accel import backend
from .circle import (Angle, AngleGrid, GridFunction, circular_convolve, count_modes,
                     cyclic_sign_changes, fourier_coefficients, sign_changes_of_grid_function)
from .errors import DomainError, InputError, NumericError, WizerError
from .kernels import (SpectralKernel, VonMises, WrappedGaussian, spectral_smooth, vm_eval,
                      wg_eval, wg_fourier, wg_truncation_bound)
from .scalespace import (BandwidthGrid, CircularSample, TubeSlice, WrappedNormalMixture, ess_mask, kde,
                         tube)
from .inference import (CovarianceModel, MonteCarloConfig, QuantileEstimate, SignatureMap,
                        estimate_covariance, signature_map, sup_quantile)
from .persistence import (PersistenceDiagram, PersistenceRecord, build_diagram,
                          persistence_bandwidths, summarize)

__version__ = "0.1.0"
