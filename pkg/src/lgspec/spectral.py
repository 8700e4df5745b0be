"""Lag-window functions and truncated spectral synthesis.

A spectrum estimate at truncation m is the finite Fourier series of the
windowed autocorrelation-by-lag sequence.  On the diagonal the two lag
directions coincide and the series collapses to the real cosine form;
off the diagonal the estimate is complex with the reflected point
supplying the negative lags.  No FFT is involved: the per-lag local
correlations have no factorisation that a periodogram could exploit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import Bandwidth, DataError, LocalPoint, NormalizedSeries
from .lags import LocalAutocorrSet

WINDOW_KINDS = ("tukey-hanning", "uniform")


@dataclass(frozen=True)
class LagWindow:
    """Symmetric taper with lambda(0|m) = 1 and support |h| <= m."""

    kind: str
    m: int

    def __post_init__(self):
        if self.kind not in WINDOW_KINDS:
            raise DataError(f"unknown window kind {self.kind!r}; expected one of {WINDOW_KINDS}")
        if self.m < 0:
            raise DataError(f"truncation point must be >= 0, got {self.m}")


def lag_window_value(w: LagWindow, h: int) -> float:
    """Window weight at lag h; Tukey-Hanning is (1 + cos(pi h / m)) / 2."""
    ah = abs(h)
    if ah > w.m:
        return 0.0
    if ah == 0:
        return 1.0
    if w.kind == "uniform":
        return 1.0
    return 0.5 * (1.0 + np.cos(np.pi * ah / w.m))


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing frequencies in [0, 1/2]."""

    omegas: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        object.__setattr__(self, "omegas", om)
        if om.ndim != 1 or om.size == 0:
            raise DataError("frequency grid must be a nonempty 1-d array")
        if om[0] < 0.0 or om[-1] > 0.5 or np.any(np.diff(om) <= 0):
            raise DataError("frequencies must be strictly increasing within [0, 1/2]")

    @staticmethod
    def default(n_points: int = 257) -> "FrequencyGrid":
        """Equispaced grid on [0, 1/2]; the default 257 points step by 1/512."""
        return FrequencyGrid(np.linspace(0.0, 0.5, n_points))

    def __len__(self) -> int:
        return self.omegas.size


@dataclass(frozen=True)
class SpectrumEstimate:
    """Per-frequency spectrum values tagged with their provenance.

    values is complex; the imaginary part is exactly zero for diagonal
    points and for the global estimate.
    """

    grid: FrequencyGrid
    values: np.ndarray
    point: LocalPoint | None
    m: int
    bandwidth: Bandwidth | None
    window_kind: str
    label: str = "local"
    autocorrs: LocalAutocorrSet | None = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        if vals.shape != (len(self.grid),) :
            raise DataError("values must align with the frequency grid")
        if self.point is not None and self.point.is_diagonal and np.any(vals.imag != 0.0):
            raise DataError("diagonal-point spectrum must be exactly real")

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    def to_json_dict(self) -> dict:
        return {
            "omega": self.grid.omegas.tolist(),
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
            "point": None if self.point is None else [self.point.v1, self.point.v2],
            "m": self.m,
            "b": None if self.bandwidth is None else [self.bandwidth.b1, self.bandwidth.b2],
            "window": self.window_kind,
            "label": self.label,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["omega", "re", "im", "point_v1", "point_v2", "m", "b1", "b2", "window"])
            pv1 = "" if self.point is None else format(self.point.v1, ".17g")
            pv2 = "" if self.point is None else format(self.point.v2, ".17g")
            b1 = "" if self.bandwidth is None else format(self.bandwidth.b1, ".17g")
            b2 = "" if self.bandwidth is None else format(self.bandwidth.b2, ".17g")
            for om, val in zip(self.grid.omegas, self.values):
                writer.writerow(
                    [
                        format(om, ".17g"),
                        format(val.real, ".17g"),
                        format(val.imag, ".17g"),
                        pv1, pv2, self.m, b1, b2, self.window_kind,
                    ]
                )


def _window_weights(w: LagWindow) -> np.ndarray:
    return np.array([lag_window_value(w, h) for h in range(1, w.m + 1)])


def synthesize(rho: np.ndarray, rho_reflected: np.ndarray, w: LagWindow, grid: FrequencyGrid, diagonal: bool) -> np.ndarray:
    """Windowed Fourier synthesis from per-lag correlations.

    Diagonal points use 1 + 2 sum lambda rho cos; off-diagonal points get
    real part 1 + sum lambda (rho + rho_reflected) cos and imaginary part
    sum lambda (rho_reflected - rho) sin.
    """
    lam = _window_weights(w)
    h = np.arange(1, w.m + 1)
    ang = 2.0 * np.pi * np.outer(grid.omegas, h)
    cos_t = np.cos(ang)
    if diagonal:
        re = 1.0 + 2.0 * cos_t @ (lam * rho[: w.m])
        return re.astype(complex)
    sin_t = np.sin(ang)
    re = 1.0 + cos_t @ (lam * (rho[: w.m] + rho_reflected[: w.m]))
    im = sin_t @ (lam * (rho_reflected[: w.m] - rho[: w.m]))
    return re + 1j * im


def local_spectrum(acf: LocalAutocorrSet, w: LagWindow, grid: FrequencyGrid) -> SpectrumEstimate:
    """m-truncated local spectrum at the set's point."""
    if w.m > acf.max_lag:
        raise DataError(f"window m={w.m} exceeds available lags {acf.max_lag}")
    values = synthesize(acf.rho_at_v, acf.rho_at_v_reflected, w, grid, acf.point.is_diagonal)
    return SpectrumEstimate(
        grid=grid,
        values=values,
        point=acf.point,
        m=w.m,
        bandwidth=acf.bandwidth,
        window_kind=w.kind,
        label="local",
        autocorrs=acf,
    )


def sample_autocorr(z: NormalizedSeries, max_lag: int) -> np.ndarray:
    """Ordinary sample autocorrelation r(1..max_lag), biased divisor n."""
    x = z.values - np.mean(z.values)
    n = x.size
    denom = float(np.sum(x * x)) / n
    if denom == 0.0:
        raise DataError("constant series has no autocorrelation")
    return np.array([float(np.sum(x[h:] * x[:-h])) / n / denom for h in range(1, max_lag + 1)])


def global_spectrum(z: NormalizedSeries, w: LagWindow, grid: FrequencyGrid) -> SpectrumEstimate:
    """m-truncated ordinary spectrum of the normalized series."""
    if w.m > z.n - 2:
        raise DataError(f"window m={w.m} too large for series of length {z.n}")
    if w.m == 0:
        values = np.ones(len(grid), dtype=complex)
    else:
        r = sample_autocorr(z, w.m)
        values = synthesize(r, r, w, grid, diagonal=True)
    return SpectrumEstimate(
        grid=grid,
        values=values,
        point=None,
        m=w.m,
        bandwidth=None,
        window_kind=w.kind,
        label="global",
    )


def conjugate_reflect(s: SpectrumEstimate) -> SpectrumEstimate:
    """Spectrum at the reflected point: the complex conjugate per omega."""
    if s.point is None:
        raise DataError("global spectrum has no point to reflect")
    return SpectrumEstimate(
        grid=s.grid,
        values=np.conj(s.values),
        point=s.point.reflected(),
        m=s.m,
        bandwidth=s.bandwidth,
        window_kind=s.window_kind,
        label=s.label,
        autocorrs=s.autocorrs,
    )
