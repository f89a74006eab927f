"""Shadowed-Rician and Nakagami-m channel statistics and samplers.

The shadowed-Rician (SR) power-gain density is handled in the unified-series
form that covers both integer ("INT") and non-integer ("NINT") fading
severity m: a finite series of m terms when m is an integer, an infinite
series truncated at a configurable number of terms otherwise.  Series
coefficients are kept as logs; they are always nonnegative, which keeps every
downstream sum cancellation-free.

Samplers draw from the defining physical construction (Nakagami line-of-sight
amplitude plus circular complex Gaussian multipath) rather than from the
series, so the Monte Carlo path stays independent of the closed forms it is
used to validate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

INT = "INT"
NINT = "NINT"

_INTEGER_TOL = 1e-9


@dataclass(frozen=True)
class SRParams:
    """Shadowed-Rician fading parameters for one link class.

    m is the Nakagami severity of the line-of-sight amplitude, 2b the average
    multipath power and omega the average line-of-sight power.
    """

    m: float
    b: float
    omega: float

    def __post_init__(self) -> None:
        if self.m <= 0.0 or self.b <= 0.0 or self.omega < 0.0:
            raise ValueError(f"invalid SR parameters {self}")

    @property
    def alpha(self) -> float:
        two_b = 2.0 * self.b
        return (two_b * self.m / (two_b * self.m + self.omega)) ** self.m / two_b

    @property
    def beta(self) -> float:
        return 1.0 / (2.0 * self.b)

    @property
    def delta(self) -> float:
        two_b = 2.0 * self.b
        return self.omega / (two_b * (two_b * self.m + self.omega))

    @property
    def mean_gain(self) -> float:
        """E[|h|^2] = 2b + omega."""
        return 2.0 * self.b + self.omega

    def is_integer_m(self) -> bool:
        return abs(self.m - round(self.m)) < _INTEGER_TOL


@dataclass(frozen=True)
class NakagamiParams:
    """Nakagami-m fading: power gain is gamma with shape m and mean omega."""

    m: float
    omega: float

    def __post_init__(self) -> None:
        if self.m <= 0.0 or self.omega <= 0.0:
            raise ValueError(f"invalid Nakagami parameters {self}")

    def is_integer_m(self) -> bool:
        return abs(self.m - round(self.m)) < _INTEGER_TOL


@dataclass(frozen=True)
class SRUnifiedCoeffs:
    """Unified-series coefficients of the SR power-gain density.

    The density of |h|^2 is alpha * sum_k zeta(k) x^k e^(-beta_nu x), where
    the sum runs to varpi = m - 1 for integer m and is truncated to
    `truncation` terms otherwise.  zeta is stored as log values (all
    coefficients are nonnegative: for integer m the sign of (1-m)_k cancels
    against (-1)^k).
    """

    kind: str
    params: SRParams
    alpha: float
    beta_nu: float
    varpi: int | None      # highest series index for INT, None marks infinite
    truncation: int        # number of series terms actually carried
    log_zeta: np.ndarray = field(repr=False)

    @property
    def n_terms(self) -> int:
        return self.log_zeta.shape[0]


def sr_coeffs(p: SRParams, integer_mode: str, truncation: int = 50) -> SRUnifiedCoeffs:
    """Build the unified series coefficients for one SR parameter set.

    integer_mode selects the finite (INT) or infinite (NINT) representation;
    INT demands that p.m is a positive integer within 1e-9.
    """
    if truncation < 1:
        raise ValueError(f"truncation must be >= 1, got {truncation}")
    delta = p.delta
    log_delta = math.log(delta) if delta > 0.0 else -math.inf
    if integer_mode == INT:
        if not p.is_integer_m():
            raise ValueError(f"INT mode requires integer m, got m={p.m}")
        m = round(p.m)
        varpi = m - 1
        k = np.arange(varpi + 1, dtype=float)
        # (-1)^k (1-m)_k = (m-1)! / (m-1-k)!, nonnegative on 0..m-1
        log_zeta = (
            gammaln(m) - gammaln(m - k) + k * log_delta - 2.0 * gammaln(k + 1.0)
        )
        beta_nu = p.beta - delta
    elif integer_mode == NINT:
        varpi = None
        k = np.arange(truncation, dtype=float)
        log_zeta = (
            gammaln(p.m + k) - gammaln(p.m) + k * log_delta - 2.0 * gammaln(k + 1.0)
        )
        beta_nu = p.beta
    else:
        raise ValueError(f"integer_mode must be {INT!r} or {NINT!r}, got {integer_mode!r}")
    if beta_nu <= 0.0:
        raise ValueError(f"degenerate series rate beta_nu={beta_nu}")
    return SRUnifiedCoeffs(
        kind=integer_mode,
        params=p,
        alpha=p.alpha,
        beta_nu=beta_nu,
        varpi=varpi,
        truncation=truncation,
        log_zeta=np.asarray(log_zeta, dtype=float),
    )


def _logsumexp(a: np.ndarray, axis=None) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.squeeze(m, axis=axis) + np.log(np.sum(np.exp(a - m), axis=axis))
    return out


def sr_gain_pdf(c: SRUnifiedCoeffs, eta: float, x) -> np.ndarray:
    """Density of the power gain eta * |h|^2 at x >= 0."""
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("sr_gain_pdf requires x >= 0")
    k = np.arange(c.n_terms, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.where(x > 0.0, np.log(np.maximum(x, 1e-300)), -np.inf)
        log_terms = (
            c.log_zeta[np.newaxis, :]
            - (k[np.newaxis, :] + 1.0) * math.log(eta)
            + np.outer(log_x, k)
            - (c.beta_nu / eta) * x[:, np.newaxis]
        )
    # k = 0 column is finite even at x = 0
    log_terms[:, 0] = c.log_zeta[0] - math.log(eta) - (c.beta_nu / eta) * x
    out = c.alpha * np.exp(_logsumexp(log_terms, axis=1))
    return float(out[0]) if scalar else out


def sr_survival_coeff_logs(c: SRUnifiedCoeffs, eta: float) -> np.ndarray:
    """log A_p such that P[gain > x] = alpha * sum_p A_p x^p e^(-beta_nu x / eta).

    A_p = eta^(-p) / p! * sum_{k >= p} zeta(k) k! beta_nu^(p - k - 1); these are
    the survival-polynomial coefficients the outage bounds exponentiate.
    """
    n = c.n_terms
    k = np.arange(n, dtype=float)
    log_beta_nu = math.log(c.beta_nu)
    # inner[k] = log zeta(k) + log k!
    inner = c.log_zeta + gammaln(k + 1.0)
    out = np.empty(n)
    for p in range(n):
        tail = inner[p:] + (p - k[p:] - 1.0) * log_beta_nu
        out[p] = _logsumexp(tail) - gammaln(p + 1.0) - p * math.log(eta)
    return out


def sr_gain_cdf(c: SRUnifiedCoeffs, eta: float, x) -> np.ndarray:
    """CDF of the power gain eta * |h|^2 at x >= 0."""
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("sr_gain_cdf requires x >= 0")
    log_a = sr_survival_coeff_logs(c, eta)
    p = np.arange(c.n_terms, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.where(x > 0.0, np.log(np.maximum(x, 1e-300)), -np.inf)
        log_terms = (
            log_a[np.newaxis, :] + np.outer(log_x, p) - (c.beta_nu / eta) * x[:, np.newaxis]
        )
    log_terms[:, 0] = log_a[0] - (c.beta_nu / eta) * x
    surv = c.alpha * np.exp(_logsumexp(log_terms, axis=1))
    out = np.clip(1.0 - surv, 0.0, 1.0)
    return float(out[0]) if scalar else out


def nakagami_gain_pdf(p: NakagamiParams, eta: float, x) -> np.ndarray:
    """Density of eta * |h|^2 for Nakagami-m fading: gamma(m, omega*eta/m)."""
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("nakagami_gain_pdf requires x >= 0")
    rate = p.m / (p.omega * eta)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.where(x > 0.0, np.log(np.maximum(x, 1e-300)), -np.inf)
    log_pdf = p.m * math.log(rate) + (p.m - 1.0) * log_x - rate * x - gammaln(p.m)
    out = np.exp(log_pdf)
    if p.m == 1.0:
        out = np.where(x == 0.0, rate, out)
    return float(out[0]) if scalar else out


def nakagami_gain_cdf(p: NakagamiParams, eta: float, x) -> np.ndarray:
    """CDF of eta * |h|^2 for Nakagami-m fading."""
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise ValueError("nakagami_gain_cdf requires x >= 0")
    out = gammainc(p.m, p.m * x / (p.omega * eta))
    return float(out[0]) if scalar else np.asarray(out)


def sample_sr_gain(p: SRParams, eta: float, rng: np.random.Generator, size=None):
    """Draw eta * |h|^2 with h = xi e^(i phi) + w: Nakagami line-of-sight
    amplitude xi (severity m, mean-square omega), uniform phase, circular
    complex Gaussian multipath with per-component variance b."""
    xi = np.sqrt(rng.gamma(shape=p.m, scale=p.omega / p.m, size=size))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=size)
    re = xi * np.cos(phi) + rng.normal(0.0, math.sqrt(p.b), size=size)
    im = xi * np.sin(phi) + rng.normal(0.0, math.sqrt(p.b), size=size)
    return eta * (re * re + im * im)


def sample_nakagami_gain(p: NakagamiParams, eta: float, rng: np.random.Generator, size=None):
    """Draw eta * |h|^2 as a gamma variate with shape m and scale omega*eta/m."""
    return rng.gamma(shape=p.m, scale=p.omega * eta / p.m, size=size)
