"""Statistics of the hybrid interference hitting the IoT cluster.

The aggregate has two parts: the sum of M_s shadowed-Rician extra-terrestrial
interferer gains and the sum of M_t equal-power Nakagami-m terrestrial
interferer gains.  The SR sum is an M_s-fold convolution of unified-series
densities, which closes as a multi-index series; each multi-index carries a
nested Beta-function product.  The hybrid density then closes with a single
confluent-hypergeometric factor.

The multi-index enumeration grows as (truncation)^M_s and is capacity-capped.
For evaluation the enumeration is bucketed by the total series order, which
collapses the index set to at most M_s * truncation distinct powers of w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln

from .fading import (
    INT,
    NINT,
    NakagamiParams,
    SRParams,
    SRUnifiedCoeffs,
    _logsumexp,
    sample_nakagami_gain,
    sample_sr_gain,
    sr_coeffs,
)
from .specfun import log_beta, log_kummer_1f1_pos

FIXED_A = "FIXED_A"
SCALED_B = "SCALED_B"

MAX_MULTI_INDEX_COUNT = 1_000_000

# Below this magnitude the hybrid density's confluent factor is treated as 1
# (pure gamma limit); avoids a 0 * inf at the tuned-power degeneracy.
THETA_TILDE_EPS = 1e-12


class CapacityError(ValueError):
    """Multi-index enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class InterferenceConfig:
    """Counts, powers and fading of the extra-terrestrial (ETS) and
    terrestrial (TS) interferers.

    condition selects how interferer power relates to the main-network SNR:
    FIXED_A keeps eta_s / eta_t as given, SCALED_B replaces both with
    lam * eta at evaluation time.
    """

    ms: int
    mt_count: int
    sr: SRParams
    sr_mode: str
    nak: NakagamiParams
    eta_s: float
    eta_t: float
    condition: str = FIXED_A
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.ms < 0 or self.mt_count < 0:
            raise ValueError("interferer counts must be nonnegative")
        if self.eta_s <= 0.0 or self.eta_t <= 0.0:
            raise ValueError("interferer powers must be positive")
        if self.condition not in (FIXED_A, SCALED_B):
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.condition == SCALED_B and self.lam <= 0.0:
            raise ValueError("SCALED_B requires a positive scaling lam")
        if self.sr_mode not in (INT, NINT):
            raise ValueError(f"unknown SR mode {self.sr_mode!r}")

    def resolved(self, eta: float) -> "InterferenceConfig":
        """Pin interferer powers for one evaluation at main-network SNR eta."""
        if self.condition == SCALED_B:
            p = self.lam * eta
            return replace(self, eta_s=p, eta_t=p)
        return self

    @property
    def shape_t(self) -> float:
        """Gamma shape of the terrestrial sum."""
        return self.nak.m * self.mt_count

    def rate_t(self) -> float:
        """Gamma rate of the terrestrial sum at the configured eta_t."""
        return self.nak.m / (self.nak.omega * self.eta_t)

    def mean_wc(self) -> float:
        return self.ms * self.eta_s * self.sr.mean_gain + self.mt_count * self.eta_t * self.nak.omega


@dataclass(frozen=True)
class WsCoeffs:
    """Multi-index series of the extra-terrestrial interference sum.

    The density at the configured eta_s is
    sum over indices of Xi / eta_s^Lam * w^(Lam-1) e^(-theta w), with
    Lam = sum(i_k) + M_s.  Xi is the product of per-interferer series weights
    and the nested Beta factors; it is strictly positive, so only log values
    are stored.  lam_values / log_c_lam hold the power-bucketed form
    (eta-free: c_lam = sum of Xi over indices with that Lam).
    """

    ms: int
    sr_coeffs: SRUnifiedCoeffs
    indices: np.ndarray = field(repr=False)      # (N, ms) int
    log_xi: np.ndarray = field(repr=False)       # (N,)
    lam: np.ndarray = field(repr=False)           # (N,) int, sum(idx) + ms
    lam_values: np.ndarray = field(repr=False)    # unique Lam, ascending
    log_c_lam: np.ndarray = field(repr=False)     # bucketed log sum of Xi
    theta: float                                   # beta_nu / eta_s
    theta_tilde: float                             # theta - m_t/(omega_t eta_t)
    rho: float                                     # 1 - beta_nu omega_t / m_t

    @property
    def count(self) -> int:
        return self.indices.shape[0]


def ws_coeffs(cfg: InterferenceConfig, truncation: int = 50) -> WsCoeffs:
    """Enumerate the multi-index series of the SR interference sum.

    Indices run over [0, truncation) per interferer (the full [0, m-1] range
    in INT mode).  Raises CapacityError when the enumeration would exceed
    MAX_MULTI_INDEX_COUNT tuples.
    """
    if cfg.ms < 1:
        raise ValueError("ws_coeffs requires at least one extra-terrestrial interferer")
    c = sr_coeffs(cfg.sr, cfg.sr_mode, truncation)
    n_terms = c.n_terms
    count = n_terms**cfg.ms
    if count > MAX_MULTI_INDEX_COUNT:
        raise CapacityError(
            f"{n_terms}^{cfg.ms} = {count} multi-indices exceeds the cap "
            f"{MAX_MULTI_INDEX_COUNT}; lower the truncation or interferer count"
        )

    grids = np.meshgrid(*([np.arange(n_terms)] * cfg.ms), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)  # (N, ms)
    lam = idx.sum(axis=1) + cfg.ms

    log_xi = cfg.ms * math.log(c.alpha) + c.log_zeta[idx].sum(axis=1)
    # nested Beta product Phi(sum_{l<=j} i_l + j, i_{j+1} + 1), j = 1..ms-1
    if cfg.ms > 1:
        partial = np.cumsum(idx, axis=1)
        for j in range(1, cfg.ms):
            a = partial[:, j - 1] + j
            b = idx[:, j] + 1
            log_xi += gammaln(a) + gammaln(b) - gammaln(a + b)

    lam_values, inverse = np.unique(lam, return_inverse=True)
    log_c = np.full(lam_values.shape, -np.inf)
    for bucket in range(lam_values.size):
        sel = log_xi[inverse == bucket]
        if sel.size:
            log_c[bucket] = _logsumexp(sel)

    rate_t = cfg.rate_t()
    theta = c.beta_nu / cfg.eta_s
    return WsCoeffs(
        ms=cfg.ms,
        sr_coeffs=c,
        indices=idx,
        log_xi=log_xi,
        lam=lam,
        lam_values=lam_values,
        log_c_lam=log_c,
        theta=theta,
        theta_tilde=theta - rate_t,
        rho=1.0 - c.beta_nu * cfg.nak.omega / cfg.nak.m,
    )


def _eval_power_series(lam_values, log_coeff, w, rate) -> np.ndarray:
    """sum_L exp(log_coeff[L]) w^(L-1) e^(-rate w), vectorised over w."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.where(w > 0.0, np.log(np.maximum(w, 1e-300)), -np.inf)
        log_terms = (
            log_coeff[np.newaxis, :]
            + np.outer(log_w, lam_values - 1.0)
            - rate * w[:, np.newaxis]
        )
    if lam_values.size and lam_values[0] == 1:
        log_terms[:, 0] = log_coeff[0] - rate * w
    return np.exp(_logsumexp(log_terms, axis=1))


def ws_pdf(coeffs: WsCoeffs, eta_s: float, w) -> np.ndarray:
    """Density of the extra-terrestrial interference sum at w >= 0."""
    scalar = np.ndim(w) == 0
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w_arr < 0.0):
        raise ValueError("ws_pdf requires w >= 0")
    log_coeff = coeffs.log_c_lam - coeffs.lam_values * math.log(eta_s)
    theta = coeffs.sr_coeffs.beta_nu / eta_s
    out = _eval_power_series(coeffs.lam_values.astype(float), log_coeff, w_arr, theta)
    return float(out[0]) if scalar else out


def wt_pdf(cfg: InterferenceConfig, w) -> np.ndarray:
    """Density of the terrestrial interference sum: gamma with shape
    m_t * M_t and rate m_t / (omega_t eta_t)."""
    if cfg.mt_count < 1:
        raise ValueError("wt_pdf requires at least one terrestrial interferer")
    scalar = np.ndim(w) == 0
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w_arr < 0.0):
        raise ValueError("wt_pdf requires w >= 0")
    shape = cfg.shape_t
    rate = cfg.rate_t()
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.where(w_arr > 0.0, np.log(np.maximum(w_arr, 1e-300)), -np.inf)
    out = np.exp(shape * math.log(rate) + (shape - 1.0) * log_w - rate * w_arr - gammaln(shape))
    if shape == 1.0:
        out = np.where(w_arr == 0.0, rate, out)
    return float(out[0]) if scalar else out


def wc_pdf(cfg: InterferenceConfig, coeffs: WsCoeffs | None, w) -> np.ndarray:
    """Density of the hybrid interference sum W_s + W_t.

    Falls back to the single-population density when one count is zero.  The
    closed form couples each SR series order Lam with the terrestrial gamma
    through a Beta factor and a confluent-hypergeometric term; when the two
    populations' exponential rates coincide (theta_tilde ~ 0) the confluent
    factor degenerates to 1 and the density is a pure gamma shape.
    """
    scalar = np.ndim(w) == 0
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w_arr < 0.0):
        raise ValueError("wc_pdf requires w >= 0")
    if cfg.ms < 1 and cfg.mt_count < 1:
        raise ValueError("wc_pdf requires at least one interferer")
    if cfg.ms < 1:
        out = wt_pdf(cfg, w_arr)
        return float(out[0]) if scalar else out
    if coeffs is None:
        raise ValueError("wc_pdf requires the SR multi-index coefficients")
    if cfg.mt_count < 1:
        out = ws_pdf(coeffs, cfg.eta_s, w_arr)
        return float(out[0]) if scalar else out

    shape_t = cfg.shape_t
    rate_t = cfg.rate_t()
    theta = coeffs.sr_coeffs.beta_nu / cfg.eta_s
    theta_tilde = theta - rate_t
    lam = coeffs.lam_values.astype(float)
    log_coeff = (
        coeffs.log_c_lam
        - coeffs.lam_values * math.log(cfg.eta_s)
        + shape_t * math.log(rate_t)
        + np.array([log_beta(shape_t, L) for L in lam])
        - gammaln(shape_t)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.where(w_arr > 0.0, np.log(np.maximum(w_arr, 1e-300)), -np.inf)
    # power w^(Lam + shape_t - 1), exponential e^(-rate_t w), confluent factor
    log_terms = (
        log_coeff[np.newaxis, :]
        + np.outer(log_w, lam + shape_t - 1.0)
        - rate_t * w_arr[:, np.newaxis]
    )
    if abs(theta_tilde) > THETA_TILDE_EPS:
        for j, L in enumerate(lam):
            tau0 = L + shape_t
            if theta_tilde > 0.0:
                # negative confluent argument: transform to a positive series
                log_terms[:, j] += -theta_tilde * w_arr + log_kummer_1f1_pos(
                    shape_t, tau0, theta_tilde * w_arr
                )
            else:
                log_terms[:, j] += log_kummer_1f1_pos(L, tau0, -theta_tilde * w_arr)
    out = np.exp(_logsumexp(log_terms, axis=1))
    return float(out[0]) if scalar else out


def sample_wc(cfg: InterferenceConfig, rng: np.random.Generator, size=None):
    """Draw the hybrid interference sum: ms SR gains at eta_s plus mt_count
    Nakagami gains at eta_t."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    total = np.zeros(shape)
    for _ in range(cfg.ms):
        total = total + sample_sr_gain(cfg.sr, cfg.eta_s, rng, size=size)
    for _ in range(cfg.mt_count):
        total = total + sample_nakagami_gain(cfg.nak, cfg.eta_t, rng, size=size)
    return total if shape else float(total)
