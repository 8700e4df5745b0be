"""Pointwise confidence bands from replicate ensembles.

Two replicate sources: fresh simulation from a known model, or circular
block bootstrap of an observed raw series.  Every replicate is normalized
from scratch so the uncertainty of the empirical CDF propagates into the
bands.  Per-replicate RNG streams are spawned deterministically from the
master seed, so the result never depends on evaluation order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Bandwidth, DataError, LocalPoint, Series, normalize
from .lags import LocalAutocorrSet, estimate_autocorrs
from .spectral import FrequencyGrid, LagWindow, SpectrumEstimate, global_spectrum, local_spectrum


@dataclass(frozen=True)
class BandSpec:
    """Ensemble protocol: R replicates, quantile levels, seed, blocklength."""

    replicates: int = 100
    lower_q: float = 0.05
    upper_q: float = 0.95
    seed: int = 0
    block_length: int = 100

    def __post_init__(self):
        if self.replicates < 2:
            raise DataError(f"need at least 2 replicates, got {self.replicates}")
        if not 0.0 < self.lower_q < self.upper_q < 1.0:
            raise DataError(f"need 0 < lower_q < upper_q < 1, got ({self.lower_q}, {self.upper_q})")


@dataclass(frozen=True)
class ConfidenceBand:
    """Per-frequency (lower, median, upper) quantiles over replicates.

    For complex spectra (off-diagonal points) the imaginary-part band is
    carried alongside the real-part one.
    """

    grid: FrequencyGrid
    lower: np.ndarray
    median: np.ndarray
    upper: np.ndarray
    im_lower: np.ndarray | None = None
    im_median: np.ndarray | None = None
    im_upper: np.ndarray | None = None
    point: LocalPoint | None = None
    m: int = 0
    bandwidth: Bandwidth | None = None
    source: str = ""
    spec: BandSpec | None = None
    nc_failures: int = 0

    def __post_init__(self):
        for name in ("lower", "median", "upper"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (np.all(self.lower <= self.median) and np.all(self.median <= self.upper)):
            raise DataError("band quantiles must be ordered lower <= median <= upper")

    @property
    def has_imaginary(self) -> bool:
        return self.im_lower is not None

    def to_json_dict(self) -> dict:
        out = {
            "omega": self.grid.omegas.tolist(),
            "lower": self.lower.tolist(),
            "median": self.median.tolist(),
            "upper": self.upper.tolist(),
            "point": None if self.point is None else [self.point.v1, self.point.v2],
            "m": self.m,
            "source": self.source,
            "nc_failures": self.nc_failures,
        }
        if self.has_imaginary:
            out["im_lower"] = self.im_lower.tolist()
            out["im_median"] = self.im_median.tolist()
            out["im_upper"] = self.im_upper.tolist()
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["omega", "lower", "median", "upper", "part", "point", "source"])
            pt = "" if self.point is None else f"({self.point.v1:g},{self.point.v2:g})"
            for i, om in enumerate(self.grid.omegas):
                writer.writerow(
                    [format(om, ".17g"), format(self.lower[i], ".17g"),
                     format(self.median[i], ".17g"), format(self.upper[i], ".17g"),
                     "re", pt, self.source]
                )
            if self.has_imaginary:
                for i, om in enumerate(self.grid.omegas):
                    writer.writerow(
                        [format(om, ".17g"), format(self.im_lower[i], ".17g"),
                         format(self.im_median[i], ".17g"), format(self.im_upper[i], ".17g"),
                         "im", pt, self.source]
                    )


def circular_blocks(values: np.ndarray, starts, block_length: int) -> np.ndarray:
    """Concatenate wrapped blocks of the given length at the given start
    indices, truncated to the source length."""
    n = values.size
    doubled = np.concatenate([values, values])
    out = np.concatenate([doubled[s : s + block_length] for s in starts])
    return out[:n]


def block_bootstrap_resample(source: Series, block_length: int, rng: np.random.Generator) -> Series:
    """Circular block bootstrap of the raw series; output length always n."""
    n = source.n
    if not 1 <= block_length <= n:
        raise DataError(f"block length {block_length} out of range [1, {n}]")
    n_blocks = math.ceil(n / block_length)
    starts = rng.integers(0, n, size=n_blocks)
    return Series(circular_blocks(source.values, starts, block_length))


@dataclass(frozen=True)
class SimulationSource:
    """Fresh independent replicates drawn from a model."""

    draw: object  # callable (n, rng) -> Series
    n: int
    name: str = "simulation"

    def replicate(self, rng: np.random.Generator) -> Series:
        return self.draw(self.n, rng)


@dataclass(frozen=True)
class BootstrapSource:
    """Replicates resampled from an observed raw series."""

    series: Series
    block_length: int
    name: str = "bootstrap"

    def replicate(self, rng: np.random.Generator) -> Series:
        return block_bootstrap_resample(self.series, self.block_length, rng)


@dataclass(frozen=True)
class PipelineParams:
    """Everything one replicate needs: points, truncations, bandwidth,
    window kind, and the frequency grid."""

    points: tuple
    m_list: tuple
    b: Bandwidth
    window_kind: str = "tukey-hanning"
    grid: FrequencyGrid = field(default_factory=FrequencyGrid.default)

    def __post_init__(self):
        if not self.points:
            raise DataError("need at least one point")
        if not self.m_list or any(m < 1 for m in self.m_list):
            raise DataError("m_list must hold positive truncation levels")

    @property
    def max_m(self) -> int:
        return max(self.m_list)


@dataclass(frozen=True)
class EnsembleBands:
    """Bands per (point index, m) plus global-spectrum bands per m."""

    local: dict
    global_: dict
    nc_by_point: dict
    spec: BandSpec
    params: PipelineParams


def _replicate_spectra(series: Series, params: PipelineParams):
    """Run one replicate end to end; returns (local values, global values,
    per-lag fail masks) where local values is {(point_idx, m): complex array}."""
    z = normalize(series)
    local_vals = {}
    fail_masks = {}
    global_vals = {}
    for ip, v in enumerate(params.points):
        acf = estimate_autocorrs(z, v, params.b, params.max_m)
        fail_masks[ip] = ~acf.nc_at_v | ~acf.nc_at_v_reflected
        for m in params.m_list:
            w = LagWindow(params.window_kind, m)
            local_vals[(ip, m)] = local_spectrum(acf, w, params.grid).values
    for m in params.m_list:
        w = LagWindow(params.window_kind, m)
        global_vals[m] = global_spectrum(z, w, params.grid).values.real
    return local_vals, global_vals, fail_masks


def _band_from_stack(stack: np.ndarray, grid, spec, point, m, b, source, nc) -> ConfidenceBand:
    qs = np.quantile(stack.real, [spec.lower_q, 0.5, spec.upper_q], axis=0)
    kwargs = {}
    if np.any(stack.imag != 0.0):
        qi = np.quantile(stack.imag, [spec.lower_q, 0.5, spec.upper_q], axis=0)
        kwargs = {"im_lower": qi[0], "im_median": qi[1], "im_upper": qi[2]}
    return ConfidenceBand(
        grid=grid, lower=qs[0], median=qs[1], upper=qs[2],
        point=point, m=m, bandwidth=b, source=source, spec=spec,
        nc_failures=nc, **kwargs,
    )


def ensemble_band(source, params: PipelineParams, spec: BandSpec) -> EnsembleBands:
    """Estimate pointwise confidence bands over R replicates.

    Each replicate is drawn (simulated or bootstrap-resampled), normalized,
    and pushed through the full per-point estimation; the bands are
    per-frequency empirical quantiles.  Replicates with non-converged fits
    are kept, with failure counts reported per point.
    """
    children = np.random.SeedSequence(spec.seed).spawn(spec.replicates)
    local_stacks = {key: [] for key in
                    [(ip, m) for ip in range(len(params.points)) for m in params.m_list]}
    global_stacks = {m: [] for m in params.m_list}
    fail_counts = {ip: np.zeros(params.max_m, dtype=int) for ip in range(len(params.points))}

    for child in children:
        series = source.replicate(np.random.default_rng(child))
        local_vals, global_vals, fail_masks = _replicate_spectra(series, params)
        for key, vals in local_vals.items():
            local_stacks[key].append(vals)
        for m, vals in global_vals.items():
            global_stacks[m].append(vals)
        for ip, mask in fail_masks.items():
            fail_counts[ip] += mask

    for ip, counts in fail_counts.items():
        dead = np.flatnonzero(counts == spec.replicates)
        if dead.size:
            v = params.points[ip]
            raise DataError(
                f"every replicate failed to converge at point ({v.v1:g}, {v.v2:g}), "
                f"lag h={int(dead[0]) + 1}"
            )
    nc_totals = {ip: int(counts.sum()) for ip, counts in fail_counts.items()}

    local_bands = {}
    for (ip, m), stack in local_stacks.items():
        local_bands[(ip, m)] = _band_from_stack(
            np.vstack(stack), params.grid, spec, params.points[ip], m, params.b,
            source.name, nc_totals[ip],
        )
    global_bands = {}
    for m, stack in global_stacks.items():
        global_bands[m] = _band_from_stack(
            np.vstack(stack).astype(complex), params.grid, spec, None, m, None,
            source.name, 0,
        )
    return EnsembleBands(
        local=local_bands, global_=global_bands, nc_by_point=nc_totals,
        spec=spec, params=params,
    )
