"""Local Gaussian spectral density estimation for univariate time series.

Pipeline: pseudo-normalize a series, fit per-lag local Gaussian
correlations around a point, synthesize lag-windowed truncated spectra,
and wrap the whole thing in simulation or block-bootstrap confidence
bands.  See the README for the CLI and the HTTP explorer API.
"""

from .core import (
    Bandwidth,
    DataError,
    LaggedPairs,
    LocalPoint,
    NormalizedSeries,
    Series,
    lag_pairs,
    load_csv,
    normalize,
    strip_and_square_counts,
)
from .localgauss import (
    KernelSpec,
    LocalFit,
    LocalParams,
    fit_local,
    kernel_psi_integral,
    kernel_score_psi_integral,
    local_loglik,
    local_loglik_grad,
    psi,
    score,
)
from .lags import LocalAutocorrSet, estimate_autocorrs, folded_autocorr
from .spectral import (
    FrequencyGrid,
    LagWindow,
    SpectrumEstimate,
    conjugate_reflect,
    global_spectrum,
    lag_window_value,
    local_spectrum,
    sample_autocorr,
)
from .resampling import (
    BandSpec,
    BootstrapSource,
    ConfidenceBand,
    EnsembleBands,
    PipelineParams,
    SimulationSource,
    block_bootstrap_resample,
    circular_blocks,
    ensemble_band,
)
from .models import (
    ApArchModel,
    CosineModel,
    LocalTrigModel,
    simulate_aparch,
    simulate_cosine,
    simulate_gaussian_wn,
    simulate_local_trig,
)
from .config import RunConfig, auto_bandwidth, resolve_point
from .bundle import ResultBundle, list_bundles

__version__ = "0.1.0"
