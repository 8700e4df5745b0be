"""Reference simulators: Gaussian white noise, a phase-randomized cosine,
the hidden local-trigonometric mixture, and an asymmetric power ARCH
recursion.  Every simulator is pure given (parameters, rng) and honors the
requested length exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DataError, Series


@dataclass(frozen=True)
class CosineModel:
    """Y_t = cos(2 pi alpha t + phi) + noise, phi uniform per replicate."""

    alpha: float = 0.302
    sigma: float = 0.75

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise DataError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        if self.sigma < 0.0:
            raise DataError(f"sigma must be >= 0, got {self.sigma}")


# The published mixture weights (0.05, 0.28, 0.33, 0.33) are rounded and sum
# to 0.99; normalize so the defaults satisfy the simplex requirement.
_TRIG_PROBS = tuple(p / 0.99 for p in (0.05, 0.28, 0.33, 0.33))


@dataclass(frozen=True)
class LocalTrigModel:
    """Mixture of r level-anchored cosines selected i.i.d. per time step.

    Component i emits L_i + A_i(t) cos(2 pi alpha_i t + phi_i) where the
    amplitude A_i(t) is drawn uniformly from the interval spanned by
    (A_i, A_alt_i) when the alternate bound is given, else held at A_i.
    Phases are drawn once per replicate.
    """

    levels: tuple = (-2.0, -1.0, 0.0, 1.0)
    amplitudes: tuple = (1.0, 0.5, 0.3, 0.5)
    amplitudes_alt: tuple | None = (0.5, 0.2, 0.2, 0.6)
    alphas: tuple = (0.267, 0.091, 0.431, 0.270)
    probs: tuple = _TRIG_PROBS

    def __post_init__(self):
        r = len(self.levels)
        if not (len(self.amplitudes) == len(self.alphas) == len(self.probs) == r):
            raise DataError("levels, amplitudes, alphas, probs must have equal length")
        if self.amplitudes_alt is not None and len(self.amplitudes_alt) != r:
            raise DataError("amplitudes_alt length mismatch")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise DataError(f"probabilities must sum to 1, got {sum(self.probs)}")
        if any(p < 0 for p in self.probs):
            raise DataError("probabilities must be nonnegative")

    @property
    def r(self) -> int:
        return len(self.levels)

    def amplitude_bounds(self, i: int):
        if self.amplitudes_alt is None:
            return self.amplitudes[i], self.amplitudes[i]
        lo = min(self.amplitudes[i], self.amplitudes_alt[i])
        hi = max(self.amplitudes[i], self.amplitudes_alt[i])
        return lo, hi


@dataclass(frozen=True)
class ApArchModel:
    """Asymmetric power ARCH recursion parameters.

    s_t^delta = alpha0 + sum_i alpha_i (|e_{t-i}| - gamma_i e_{t-i})^delta
                       + sum_j beta_j s_{t-j}^delta,
    emitted value e_t = s_t * (standard normal innovation).
    """

    alpha0: float = 0.02
    alpha: tuple = (0.10, 0.05)
    gamma: tuple = (0.25, 0.10)
    beta: tuple = (0.55, 0.17, 0.10)
    delta: float = 1.8

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise DataError(f"alpha0 must be > 0, got {self.alpha0}")
        if self.delta < 0:
            raise DataError(f"delta must be >= 0, got {self.delta}")
        if len(self.alpha) != len(self.gamma):
            raise DataError("alpha and gamma must have equal length")
        if any(a < 0 for a in self.alpha):
            raise DataError("alpha coefficients must be >= 0")
        if any(not -1 < g < 1 for g in self.gamma):
            raise DataError("gamma coefficients must lie in (-1, 1)")
        if any(b < 0 for b in self.beta):
            raise DataError("beta coefficients must be >= 0")

    @property
    def order(self):
        return len(self.alpha), len(self.beta)


def simulate_gaussian_wn(n: int, rng: np.random.Generator) -> Series:
    """i.i.d. standard normal draws."""
    return Series(rng.standard_normal(n))


def simulate_cosine(model: CosineModel, n: int, rng: np.random.Generator, phase: float | None = None) -> Series:
    """One cosine replicate; the phase defaults to a fresh U(0, 2 pi) draw."""
    phi = rng.uniform(0.0, 2.0 * math.pi) if phase is None else phase
    t = np.arange(n)
    y = np.cos(2.0 * math.pi * model.alpha * t + phi)
    if model.sigma > 0:
        y = y + model.sigma * rng.standard_normal(n)
    return Series(y)


def simulate_local_trig(model: LocalTrigModel, n: int, rng: np.random.Generator) -> Series:
    """One mixture replicate: fresh phases, then per-t component selection."""
    phis = rng.uniform(0.0, 2.0 * math.pi, size=model.r)
    picks = rng.choice(model.r, size=n, p=np.asarray(model.probs, dtype=float))
    t = np.arange(n)
    y = np.empty(n)
    for i in range(model.r):
        sel = picks == i
        if not np.any(sel):
            continue
        lo, hi = model.amplitude_bounds(i)
        amp = rng.uniform(lo, hi, size=int(sel.sum())) if hi > lo else lo
        y[sel] = model.levels[i] + amp * np.cos(
            2.0 * math.pi * model.alphas[i] * t[sel] + phis[i]
        )
    return Series(y)


def simulate_aparch(
    model: ApArchModel,
    n: int,
    rng: np.random.Generator,
    burn_in: int = 1000,
    return_volatility: bool = False,
):
    """Run the apARCH recursion, discarding burn_in warm-up samples.

    The power variance starts at the unconditional heuristic
    alpha0 / (1 - sum beta) when sum beta < 1, else at alpha0; pre-sample
    innovations are zero.  With return_volatility the kept power-variance
    path s_t^delta comes back alongside the series.
    """
    if model.delta == 0:
        raise DataError("delta must be positive to invert the power recursion")
    p, q = model.order
    beta_sum = sum(model.beta)
    s_init = model.alpha0 / (1.0 - beta_sum) if beta_sum < 1.0 else model.alpha0
    total = burn_in + n
    e = rng.standard_normal(total)
    s_pow = np.empty(total)
    eps = np.empty(total)
    alpha = np.asarray(model.alpha)
    gamma = np.asarray(model.gamma)
    beta = np.asarray(model.beta)
    for t in range(total):
        acc = model.alpha0
        for i in range(p):
            if t - 1 - i >= 0:
                prev = eps[t - 1 - i]
                acc += alpha[i] * (abs(prev) - gamma[i] * prev) ** model.delta
        for j in range(q):
            acc += beta[j] * (s_pow[t - 1 - j] if t - 1 - j >= 0 else s_init)
        s_pow[t] = acc
        eps[t] = acc ** (1.0 / model.delta) * e[t]
    series = Series(eps[burn_in:])
    if return_volatility:
        return series, s_pow[burn_in:]
    return series
