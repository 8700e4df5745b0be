"""Local Gaussian fits: bivariate density family, score, kernel-weighted
likelihood, and the 5-parameter quasi-Newton optimizer.

The objective for pairs w_t = (z_{t+h}, z_t) at a point v is

    L(theta) = n^-1 sum_t K_b(w_t - v) log psi(w_t; theta)
               - integral K_b(w - v) psi(w; theta) dw,

with K_b the product-normal kernel and psi the bivariate Gaussian density
with parameters theta = (mu1, mu2, sigma1, sigma2, rho).  Both the second
term and the corresponding score integral have closed forms because a
product of two Gaussians is again (proportional to) a Gaussian; numeric
quadrature appears only in the test oracles.

Because log psi and the score are quadratic polynomials in w, the data
sums reduce to six kernel-weighted moments of the pairs.  Those moments
are computed once per (pairs, point, bandwidth) and every optimizer
iteration is O(1) afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Bandwidth, DataError, LaggedPairs, LocalPoint

LOG_2PI = math.log(2.0 * math.pi)

GRAD_TOL = 1e-6
MAX_ITER = 500


@dataclass(frozen=True)
class LocalParams:
    """The five parameters of the approximating bivariate Gaussian."""

    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    rho: float

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise DataError(f"sigmas must be positive, got ({self.sigma1}, {self.sigma2})")
        if not abs(self.rho) < 1:
            raise DataError(f"|rho| must be < 1, got {self.rho}")

    def as_array(self) -> np.ndarray:
        return np.array([self.mu1, self.mu2, self.sigma1, self.sigma2, self.rho])

    @staticmethod
    def from_array(a) -> "LocalParams":
        return LocalParams(float(a[0]), float(a[1]), float(a[2]), float(a[3]), float(a[4]))

    def swapped(self) -> "LocalParams":
        return LocalParams(self.mu2, self.mu1, self.sigma2, self.sigma1, self.rho)


@dataclass(frozen=True)
class KernelSpec:
    """Product-normal kernel with bandwidth b; integrates to one."""

    b: Bandwidth
    kind: str = "product-normal"

    def __post_init__(self):
        if self.kind != "product-normal":
            raise DataError(f"unsupported kernel kind {self.kind!r}")


@dataclass(frozen=True)
class LocalFit:
    """Result of one local Gaussian fit at (point, lag, bandwidth)."""

    theta: LocalParams
    point: LocalPoint
    lag: int
    bandwidth: Bandwidth
    converged: bool
    iterations: int
    neg_penalty: float
    grad_max: float
    tolerance: float = GRAD_TOL
    message: str = ""

    def to_json_dict(self) -> dict:
        return {
            "point": [self.point.v1, self.point.v2],
            "lag": self.lag,
            "b": [self.bandwidth.b1, self.bandwidth.b2],
            "theta": {
                "mu1": self.theta.mu1,
                "mu2": self.theta.mu2,
                "sigma1": self.theta.sigma1,
                "sigma2": self.theta.sigma2,
                "rho": self.theta.rho,
            },
            "converged": self.converged,
            "iterations": self.iterations,
        }


def psi(w, theta: LocalParams) -> float:
    """Bivariate Gaussian density at w = (w1, w2)."""
    z1 = (w[0] - theta.mu1) / theta.sigma1
    z2 = (w[1] - theta.mu2) / theta.sigma2
    om = 1.0 - theta.rho * theta.rho
    quad = (z1 * z1 - 2.0 * theta.rho * z1 * z2 + z2 * z2) / om
    norm = 2.0 * math.pi * theta.sigma1 * theta.sigma2 * math.sqrt(om)
    return math.exp(-0.5 * quad) / norm


def log_psi(w, theta: LocalParams) -> float:
    z1 = (w[0] - theta.mu1) / theta.sigma1
    z2 = (w[1] - theta.mu2) / theta.sigma2
    om = 1.0 - theta.rho * theta.rho
    quad = (z1 * z1 - 2.0 * theta.rho * z1 * z2 + z2 * z2) / om
    return -LOG_2PI - math.log(theta.sigma1) - math.log(theta.sigma2) - 0.5 * math.log(om) - 0.5 * quad


def _score_sums(w0, sz1, sz2, sz11, sz22, sz12, sigma1, sigma2, rho):
    """Score-weighted sums from z-monomial sums.

    w0 is the total weight and sz* are weighted sums of the standardized
    monomials z1, z2, z1^2, z2^2, z1*z2.  Works both for data sums and,
    with w0 = 1 and Gaussian moments, for expectations.
    """
    om = 1.0 - rho * rho
    g_mu1 = (sz1 - rho * sz2) / (sigma1 * om)
    g_mu2 = (sz2 - rho * sz1) / (sigma2 * om)
    g_s1 = ((sz11 - rho * sz12) / om - w0) / sigma1
    g_s2 = ((sz22 - rho * sz12) / om - w0) / sigma2
    g_rho = rho * w0 / om + (sz12 * (1.0 + rho * rho) - rho * (sz11 + sz22)) / (om * om)
    return np.array([g_mu1, g_mu2, g_s1, g_s2, g_rho])


def score(w, theta: LocalParams) -> np.ndarray:
    """Gradient of log psi in theta; quadratic polynomial in (w1, w2)."""
    z1 = (w[0] - theta.mu1) / theta.sigma1
    z2 = (w[1] - theta.mu2) / theta.sigma2
    return _score_sums(
        1.0, z1, z2, z1 * z1, z2 * z2, z1 * z2, theta.sigma1, theta.sigma2, theta.rho
    )


def kernel_psi_integral(v: LocalPoint, k: KernelSpec, theta: LocalParams) -> float:
    """Closed form of integral K_b(w - v) psi(w; theta) dw.

    The convolution of two Gaussians: the density of
    N(mu, Sigma_theta + diag(b1^2, b2^2)) evaluated at v.
    """
    c11 = theta.sigma1 * theta.sigma1 + k.b.b1 * k.b.b1
    c22 = theta.sigma2 * theta.sigma2 + k.b.b2 * k.b.b2
    c12 = theta.rho * theta.sigma1 * theta.sigma2
    det = c11 * c22 - c12 * c12
    d1 = v.v1 - theta.mu1
    d2 = v.v2 - theta.mu2
    quad = (c22 * d1 * d1 - 2.0 * c12 * d1 * d2 + c11 * d2 * d2) / det
    return math.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))


def kernel_score_psi_integral(v: LocalPoint, k: KernelSpec, theta: LocalParams) -> np.ndarray:
    """Closed form of integral K_b(w - v) u(w; theta) psi(w; theta) dw.

    K_b(. - v) psi(.; theta) is (mass) x a bivariate Gaussian N(m*, S*),
    so the integral is the mass times the expectation of the quadratic
    score polynomials under that Gaussian.
    """
    s1, s2, rho = theta.sigma1, theta.sigma2, theta.rho
    mass = kernel_psi_integral(v, k, theta)
    # C = Sigma + B; m* = mu + Sigma C^-1 (v - mu); S* = Sigma - Sigma C^-1 Sigma
    sig11 = s1 * s1
    sig22 = s2 * s2
    sig12 = rho * s1 * s2
    c11 = sig11 + k.b.b1 * k.b.b1
    c22 = sig22 + k.b.b2 * k.b.b2
    c12 = sig12
    det = c11 * c22 - c12 * c12
    i11, i22, i12 = c22 / det, c11 / det, -c12 / det
    d1 = v.v1 - theta.mu1
    d2 = v.v2 - theta.mu2
    # Sigma C^-1
    a11 = sig11 * i11 + sig12 * i12
    a12 = sig11 * i12 + sig12 * i22
    a21 = sig12 * i11 + sig22 * i12
    a22 = sig12 * i12 + sig22 * i22
    mstar1 = theta.mu1 + a11 * d1 + a12 * d2
    mstar2 = theta.mu2 + a21 * d1 + a22 * d2
    # S* = Sigma - (Sigma C^-1) Sigma
    sstar11 = sig11 - (a11 * sig11 + a12 * sig12)
    sstar22 = sig22 - (a21 * sig12 + a22 * sig22)
    sstar12 = sig12 - (a11 * sig12 + a12 * sig22)
    # moments of the standardized coordinates z_i = (w_i - mu_i) / sigma_i
    mz1 = (mstar1 - theta.mu1) / s1
    mz2 = (mstar2 - theta.mu2) / s2
    ez11 = sstar11 / sig11 + mz1 * mz1
    ez22 = sstar22 / sig22 + mz2 * mz2
    ez12 = sstar12 / (s1 * s2) + mz1 * mz2
    return mass * _score_sums(1.0, mz1, mz2, ez11, ez22, ez12, s1, s2, rho)


@dataclass(frozen=True)
class WeightedMoments:
    """Kernel-weighted moments of pairs, centered at the point v."""

    n: int
    v: LocalPoint
    kernel: KernelSpec
    m0: float
    m1: float
    m2: float
    m11: float
    m22: float
    m12: float

    @staticmethod
    def from_pairs(pairs: LaggedPairs, v: LocalPoint, k: KernelSpec) -> "WeightedMoments":
        b1, b2 = k.b.b1, k.b.b2
        u1 = pairs.lead - v.v1
        u2 = pairs.lagged - v.v2
        w = np.exp(-0.5 * ((u1 / b1) ** 2 + (u2 / b2) ** 2)) / (2.0 * math.pi * b1 * b2)
        return WeightedMoments(
            n=len(pairs),
            v=v,
            kernel=k,
            m0=float(np.sum(w)),
            m1=float(np.sum(w * u1)),
            m2=float(np.sum(w * u2)),
            m11=float(np.sum(w * u1 * u1)),
            m22=float(np.sum(w * u2 * u2)),
            m12=float(np.sum(w * u1 * u2)),
        )

    def weighted_correlation(self) -> float:
        """Kernel-weighted sample correlation of the pairs; 0 if undefined."""
        if self.m0 <= 0.0:
            return 0.0
        mean1 = self.m1 / self.m0
        mean2 = self.m2 / self.m0
        var1 = self.m11 / self.m0 - mean1 * mean1
        var2 = self.m22 / self.m0 - mean2 * mean2
        if var1 <= 0.0 or var2 <= 0.0:
            return 0.0
        cov = self.m12 / self.m0 - mean1 * mean2
        return cov / math.sqrt(var1 * var2)


def _z_sums(mom: WeightedMoments, theta_arr):
    mu1, mu2, s1, s2, _ = theta_arr
    d1 = mu1 - mom.v.v1
    d2 = mu2 - mom.v.v2
    a11 = mom.m11 - 2.0 * d1 * mom.m1 + d1 * d1 * mom.m0
    a22 = mom.m22 - 2.0 * d2 * mom.m2 + d2 * d2 * mom.m0
    a12 = mom.m12 - d1 * mom.m2 - d2 * mom.m1 + d1 * d2 * mom.m0
    sz1 = (mom.m1 - d1 * mom.m0) / s1
    sz2 = (mom.m2 - d2 * mom.m0) / s2
    return sz1, sz2, a11 / (s1 * s1), a22 / (s2 * s2), a12 / (s1 * s2)


def _loglik_from_moments(mom: WeightedMoments, theta_arr) -> float:
    mu1, mu2, s1, s2, rho = theta_arr
    om = 1.0 - rho * rho
    _, _, sz11, sz22, sz12 = _z_sums(mom, theta_arr)
    qbar = sz11 - 2.0 * rho * sz12 + sz22
    sum_klogpsi = (
        -mom.m0 * (LOG_2PI + math.log(s1) + math.log(s2) + 0.5 * math.log(om))
        - 0.5 * qbar / om
    )
    integral = kernel_psi_integral(mom.v, mom.kernel, LocalParams.from_array(theta_arr))
    return sum_klogpsi / mom.n - integral


def _grad_from_moments(mom: WeightedMoments, theta_arr) -> np.ndarray:
    _, _, s1, s2, rho = theta_arr
    sz1, sz2, sz11, sz22, sz12 = _z_sums(mom, theta_arr)
    data_part = _score_sums(mom.m0, sz1, sz2, sz11, sz22, sz12, s1, s2, rho)
    integral = kernel_score_psi_integral(mom.v, mom.kernel, LocalParams.from_array(theta_arr))
    return data_part / mom.n - integral


def local_loglik(pairs: LaggedPairs, v: LocalPoint, k: KernelSpec, theta: LocalParams) -> float:
    """Kernel-weighted local log-likelihood of theta for the pairs at v."""
    if len(pairs) == 0:
        raise DataError("no pairs")
    mom = WeightedMoments.from_pairs(pairs, v, k)
    return _loglik_from_moments(mom, theta.as_array())


def local_loglik_grad(pairs: LaggedPairs, v: LocalPoint, k: KernelSpec, theta: LocalParams) -> np.ndarray:
    """Analytic gradient of local_loglik in theta."""
    if len(pairs) == 0:
        raise DataError("no pairs")
    mom = WeightedMoments.from_pairs(pairs, v, k)
    return _grad_from_moments(mom, theta.as_array())


# --- unconstrained reparametrization -----------------------------------------
# eta = (mu1, mu2, log sigma1, log sigma2, atanh rho) keeps sigma > 0 and
# |rho| < 1 for every optimizer iterate.

_RHO_CAP = np.nextafter(1.0, 0.0)
_LOG_SIGMA_CAP = 300.0  # keeps exp() strictly inside (0, inf)


def _theta_from_eta(eta):
    rho = math.tanh(eta[4])
    if abs(rho) >= 1.0:
        rho = math.copysign(_RHO_CAP, rho)
    ls1 = min(max(eta[2], -_LOG_SIGMA_CAP), _LOG_SIGMA_CAP)
    ls2 = min(max(eta[3], -_LOG_SIGMA_CAP), _LOG_SIGMA_CAP)
    return np.array([eta[0], eta[1], math.exp(ls1), math.exp(ls2), rho])


def _eta_from_theta(theta_arr):
    return np.array(
        [
            theta_arr[0],
            theta_arr[1],
            math.log(theta_arr[2]),
            math.log(theta_arr[3]),
            math.atanh(theta_arr[4]),
        ]
    )


def _eta_jacobian(theta_arr):
    # d theta_i / d eta_i for the diagonal reparametrization
    return np.array([1.0, 1.0, theta_arr[2], theta_arr[3], 1.0 - theta_arr[4] ** 2])


def _canonical_swap(pairs: LaggedPairs, v: LocalPoint) -> bool:
    """Decide the canonical orientation so that fitting swapped data at the
    reflected point runs bit-identical arithmetic.  Off-diagonal points
    order by coordinates; diagonal points break the tie on the data."""
    if v.v1 < v.v2:
        return False
    if v.v1 > v.v2:
        return True
    diff = np.flatnonzero(pairs.lead != pairs.lagged)
    if diff.size == 0:
        return False
    i = diff[0]
    return bool(pairs.lead[i] > pairs.lagged[i])


def fit_local(
    pairs: LaggedPairs,
    v: LocalPoint,
    k: KernelSpec,
    init: LocalParams | None = None,
    trace: list | None = None,
) -> LocalFit:
    """Maximize the local log-likelihood over the five Gaussian parameters.

    Quasi-Newton (BFGS updates, backtracking line search) in unconstrained
    coordinates with the analytic gradient.  Convergence means the
    theta-space gradient max-norm dropped to GRAD_TOL within MAX_ITER
    accepted steps.  Never raises on numerical failure: the fit comes back
    with converged=False and a diagnostic message.

    If init is omitted the start is (0, 0, 1, 1, r_w) with r_w the
    kernel-weighted sample correlation of the pairs at v.

    Passing a list as `trace` records (theta, loglik) per accepted iterate.
    """
    if len(pairs) == 0:
        raise DataError("no pairs")

    if np.all(pairs.lead == pairs.lead[0]) and np.all(pairs.lagged == pairs.lagged[0]):
        theta0 = init if init is not None else LocalParams(0.0, 0.0, 1.0, 1.0, 0.0)
        return LocalFit(
            theta=theta0, point=v, lag=pairs.h, bandwidth=k.b,
            converged=False, iterations=0, neg_penalty=math.nan, grad_max=math.inf,
            message="degenerate pairs: likelihood unbounded in sigma",
        )

    swap = _canonical_swap(pairs, v)
    if swap:
        pairs_c, v_c = pairs.swapped(), v.reflected()
        k = KernelSpec(Bandwidth(k.b.b2, k.b.b1), k.kind)
        init_c = init.swapped() if init is not None else None
    else:
        pairs_c, v_c, init_c = pairs, v, init

    mom = WeightedMoments.from_pairs(pairs_c, v_c, k)
    if init_c is None:
        r_w = min(max(mom.weighted_correlation(), -0.95), 0.95)
        theta0 = np.array([0.0, 0.0, 1.0, 1.0, r_w])
    else:
        theta0 = init_c.as_array()

    theta_arr, value, grad_max, converged, iterations, message = _maximize(
        mom, theta0, trace=trace, unswap=swap
    )

    if swap:
        theta_arr = theta_arr[[1, 0, 3, 2, 4]]
    return LocalFit(
        theta=LocalParams.from_array(theta_arr),
        point=v,
        lag=pairs.h,
        bandwidth=Bandwidth(k.b.b2, k.b.b1) if swap else k.b,
        converged=converged,
        iterations=iterations,
        neg_penalty=value,
        grad_max=grad_max,
        message=message,
    )


def _maximize(mom: WeightedMoments, theta0, trace=None, unswap=False):
    """BFGS ascent on the moment-form objective.  Returns
    (theta, value, grad_max, converged, iterations, message).

    The search runs on the scale-normalized objective L * n / m0 (the
    kernel-weighted average log-likelihood scale) so that the gradient
    tolerance means the same thing for every bandwidth; convergence also
    requires the raw-objective gradient below tolerance, which is the
    recorded contract.
    """
    scale = mom.n / mom.m0 if mom.m0 > 0 else 1.0

    def passes(g_theta, gs_theta):
        return (
            float(np.max(np.abs(g_theta))) <= GRAD_TOL
            and float(np.max(np.abs(gs_theta))) <= GRAD_TOL
        )

    x = _eta_from_theta(theta0)
    theta = _theta_from_eta(x)
    f = _loglik_from_moments(mom, theta)
    if not math.isfinite(f):
        return theta, f, math.inf, False, 0, "non-finite likelihood at initial point"
    g_theta = _grad_from_moments(mom, theta)
    gs_theta = g_theta * scale
    g = gs_theta * _eta_jacobian(theta)

    h_inv = np.eye(5)
    iterations = 0
    message = ""
    if trace is not None:
        trace.append((theta[[1, 0, 3, 2, 4]] if unswap else theta.copy(), f))

    for _ in range(MAX_ITER):
        grad_max = float(np.max(np.abs(g_theta)))
        if passes(g_theta, gs_theta):
            return theta, f, grad_max, True, iterations, message

        d = h_inv @ g
        slope = float(d @ g)
        if slope <= 0.0 or not np.all(np.isfinite(d)):
            h_inv = np.eye(5)
            d = g.copy()
            slope = float(d @ g)
            if slope <= 0.0:
                return theta, f, grad_max, False, iterations, "zero gradient direction"

        alpha = 1.0
        accepted = False
        while alpha >= 1e-14:
            x_new = x + alpha * d
            theta_new = _theta_from_eta(x_new)
            f_new = _loglik_from_moments(mom, theta_new)
            if math.isfinite(f_new) and scale * f_new >= scale * f + 1e-4 * alpha * slope:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            return theta, f, grad_max, False, iterations, "line search failed"

        g_theta_new = _grad_from_moments(mom, theta_new)
        gs_theta_new = g_theta_new * scale
        g_new = gs_theta_new * _eta_jacobian(theta_new)
        if not np.all(np.isfinite(g_new)):
            return theta, f, grad_max, False, iterations, "non-finite gradient"

        s = x_new - x
        y = -(g_new - g)  # gradient change of the minimized objective
        sy = float(s @ y)
        if sy > 1e-10 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            rho_bfgs = 1.0 / sy
            hy = h_inv @ y
            shy = np.outer(s, hy)
            h_inv = (
                h_inv
                - rho_bfgs * (shy + shy.T)
                + (rho_bfgs * rho_bfgs * float(y @ hy) + rho_bfgs) * np.outer(s, s)
            )

        x, theta, f, g = x_new, theta_new, f_new, g_new
        g_theta, gs_theta = g_theta_new, gs_theta_new
        iterations += 1
        if trace is not None:
            trace.append((theta[[1, 0, 3, 2, 4]] if unswap else theta.copy(), f))

    grad_max = float(np.max(np.abs(g_theta)))
    converged = passes(g_theta, gs_theta)
    if not converged:
        message = f"no convergence in {MAX_ITER} iterations"
    return theta, f, grad_max, converged, iterations, message
