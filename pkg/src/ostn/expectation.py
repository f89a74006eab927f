"""Interference-averaged moment kernels.

Every outage bound and asymptote in this package reduces, after multinomial
and partition expansions, to expectations of the form

    E[(W_c + 1)^d  e^(-c W_c)]

taken over the hybrid interference sum W_c.  For integer d the expectation
closes through a Gauss-hypergeometric kernel (binomial expansion of
(w+1)^d term by term against the hybrid density); for non-integer d it closes
through a Tricomi-U kernel after expanding the density's confluent factor as
a power series in the rate mismatch between the two interferer populations.

Both routes are implemented here on the power-bucketed multi-index series of
the extra-terrestrial sum, with results memoised per (exponent, rate) pair.
A third kernel gives the scaled-interferer-power limit in which the main SNR
cancels, used by the zero-diversity asymptotes.

All values are returned as logs; every sum that can alternate is accumulated
with compensated (exact) summation.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.special import gammaln

from .interference import InterferenceConfig, WsCoeffs
from .specfun import log_beta, log_gamma_u_grid

__all__ = ["HybridMoments", "SeriesConvergenceWarning", "log_binom"]


class SeriesConvergenceWarning(RuntimeWarning):
    """An infinite series hit its term cap before meeting the tail tolerance."""


def log_binom(n: float, k) -> np.ndarray:
    """log of the binomial coefficient, vectorised over k."""
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _log_2f1_shifted(a, c, z: float, q_max: int, max_terms: int = 200_000) -> np.ndarray:
    """log 2F1(a_i, c_i + q; c_i; z) for 0 <= z < 1 on a grid of q = 0..q_max.

    All parameters positive, all series terms positive.  Incremental
    log-sum-exp accumulation; the term count is unbounded by policy because
    the calling kernels legitimately need thousands of terms when the second
    parameter is large.
    """
    a = np.asarray(a, dtype=float)[:, None]
    c = np.asarray(c, dtype=float)[:, None]
    if not (0.0 <= z < 1.0):
        raise ValueError(f"argument must lie in [0, 1), got {z}")
    q = np.arange(q_max + 1, dtype=float)[None, :]
    b = c + q
    shape = np.broadcast_shapes(a.shape, b.shape)
    if z == 0.0:
        return np.zeros(shape)
    log_z = math.log(z)
    log_t = np.zeros(shape)
    run_max = np.zeros(shape)
    run_sum = np.ones(shape)
    k = 0
    while k < max_terms:
        for _ in range(32):
            log_t = log_t + (
                np.log(a + k) + np.log(b + k) - np.log(c + k) - math.log(k + 1.0) + log_z
            )
            new_max = np.maximum(run_max, log_t)
            run_sum = run_sum * np.exp(run_max - new_max) + np.exp(log_t - new_max)
            run_max = new_max
            k += 1
        ratio_down = (a + k) * (b + k) * z < (c + k) * (k + 1.0)
        if np.all(ratio_down) and np.all(log_t < run_max + math.log(1e-18)):
            break
    else:
        warnings.warn(
            "2F1 grid did not converge within the term cap",
            SeriesConvergenceWarning,
            stacklevel=2,
        )
    return run_max + np.log(run_sum)


class HybridMoments:
    """Moment kernels E[(W_c + 1)^d e^(-c W_c)] over the hybrid interference.

    Degenerate interferer counts collapse to the single-population gamma /
    series forms; with no interferers at all every moment is exactly 1.
    """

    def __init__(
        self,
        cfg: InterferenceConfig,
        coeffs: WsCoeffs | None,
        g_max: int = 4096,
        tail_tol: float = 1e-12,
    ):
        if cfg.ms >= 1 and coeffs is None:
            raise ValueError("extra-terrestrial interferers present but no coefficients given")
        self.cfg = cfg
        self.coeffs = coeffs if cfg.ms >= 1 else None
        self.g_max = g_max
        self.tail_tol = tail_tol
        self.shape_t = cfg.shape_t if cfg.mt_count >= 1 else 0.0
        self.rate_t = cfg.rate_t() if cfg.mt_count >= 1 else 0.0
        if self.coeffs is not None:
            c = self.coeffs
            self.lam = c.lam_values.astype(float)
            self.log_c_lam = c.log_c_lam - c.lam_values * math.log(cfg.eta_s)
            self.theta = c.sr_coeffs.beta_nu / cfg.eta_s
            self.theta_tilde = self.theta - self.rate_t
        self._int_cache: dict[tuple[int, float], float] = {}
        self._frac_cache: dict[tuple[float, float], float] = {}
        self._2f1_cache: dict[float, tuple[int, np.ndarray]] = {}

    # ----- integer-exponent kernel -------------------------------------

    def log_moment_int(self, d: int, c: float) -> float:
        """log E[(W_c + 1)^d e^(-c W_c)] for integer d >= 0."""
        if d < 0 or c < 0.0:
            raise ValueError(f"require d >= 0 and c >= 0, got d={d}, c={c}")
        key = (d, c)
        hit = self._int_cache.get(key)
        if hit is not None:
            return hit
        cfg = self.cfg
        if cfg.ms < 1 and cfg.mt_count < 1:
            out = 0.0
        elif cfg.ms < 1:
            out = self._log_moment_gamma_only(float(d), c)
        elif cfg.mt_count < 1:
            out = self._log_moment_sr_only_int(d, c)
        else:
            out = self._log_moment_hybrid_int(d, c)
        self._int_cache[key] = out
        return out

    def _log_moment_gamma_only(self, d: float, c: float) -> float:
        # binomial over q of E[w^q e^(-cw)] under gamma(shape_t, rate_t)
        q = np.arange(math.floor(d) + 1, dtype=float)
        logs = (
            log_binom(d, q)
            + self.shape_t * math.log(self.rate_t)
            + gammaln(self.shape_t + q)
            - gammaln(self.shape_t)
            - (self.shape_t + q) * math.log(c + self.rate_t)
        )
        return _lse(logs)

    def _log_moment_sr_only_int(self, d: int, c: float) -> float:
        q = np.arange(d + 1, dtype=float)
        rate = c + self.theta
        logs = (
            log_binom(float(d), q)[None, :]
            + self.log_c_lam[:, None]
            + gammaln(self.lam[:, None] + q[None, :])
            - (self.lam[:, None] + q[None, :]) * math.log(rate)
        )
        return _lse(logs)

    def _2f1_matrix(self, c: float, q_max: int) -> np.ndarray:
        """ln 2F1(Lam, tau(q); tau(0); -theta_tilde/(c + rate_t)) on q = 0..q_max."""
        cached = self._2f1_cache.get(c)
        if cached is not None and cached[0] >= q_max:
            return cached[1][:, : q_max + 1]
        z = -self.theta_tilde / (c + self.rate_t)
        tau0 = self.lam + self.shape_t
        if z >= 0.0:
            mat = _log_2f1_shifted(self.lam, tau0, z, q_max)
        else:
            # Pfaff on the first parameter keeps every series term positive
            w = z / (z - 1.0)
            mat = _log_2f1_shifted(np.full_like(self.lam, self.shape_t), tau0, w, q_max)
            q = np.arange(q_max + 1, dtype=float)[None, :]
            mat = mat - (tau0[:, None] + q) * math.log1p(-z)
        self._2f1_cache[c] = (q_max, mat)
        return mat

    def _log_moment_hybrid_int(self, d: int, c: float) -> float:
        rate = c + self.rate_t
        tau0 = self.lam + self.shape_t
        q = np.arange(d + 1, dtype=float)[None, :]
        tau_q = tau0[:, None] + q
        log_f21 = self._2f1_matrix(c, d)
        logs = (
            log_binom(float(d), q[0])[None, :]
            + self.log_c_lam[:, None]
            + self.shape_t * math.log(self.rate_t)
            + self._log_beta_vec()[:, None]
            - gammaln(self.shape_t)
            + gammaln(tau_q)
            - tau_q * math.log(rate)
            + log_f21
        )
        return _lse(logs)

    def _log_beta_vec(self) -> np.ndarray:
        return np.array([log_beta(self.shape_t, L) for L in self.lam])

    # ----- real-exponent kernel -----------------------------------------

    def log_moment_frac(self, d: float, c: float) -> float:
        """log E[(W_c + 1)^d e^(-c W_c)] for real d >= 0 via the U kernel."""
        if d < 0.0 or c < 0.0:
            raise ValueError(f"require d >= 0 and c >= 0, got d={d}, c={c}")
        key = (d, c)
        hit = self._frac_cache.get(key)
        if hit is not None:
            return hit
        cfg = self.cfg
        if cfg.ms < 1 and cfg.mt_count < 1:
            out = 0.0
        elif cfg.ms < 1:
            # gamma population: E = rate^shape / Gamma(shape) *
            #   integral w^(shape-1) (1+w)^d e^(-(c+rate) w)
            logs = log_gamma_u_grid(np.array([self.shape_t]), d, c + self.rate_t)
            out = float(logs[0]) + self.shape_t * math.log(self.rate_t) - gammaln(self.shape_t)
        elif cfg.mt_count < 1:
            logs = log_gamma_u_grid(self.lam, d, c + self.theta)
            out = _lse(self.log_c_lam + logs)
        else:
            out = self._log_moment_hybrid_frac(d, c)
        self._frac_cache[key] = out
        return out

    def _log_moment_hybrid_frac(self, d: float, c: float) -> float:
        """Power-series expansion of the density's confluent factor: the
        g-th term couples series order Lam + g to a Tricomi-U integral."""
        rate = c + self.rate_t
        tt = self.theta_tilde
        lam = self.lam
        tau0 = lam + self.shape_t
        base = (
            self.log_c_lam
            + self.shape_t * math.log(self.rate_t)
            + self._log_beta_vec()
            - gammaln(self.shape_t)
        )
        if abs(tt) < 1e-300:
            logs = base + log_gamma_u_grid(tau0, d, rate)
            return _lse(logs)

        log_abs_tt = math.log(abs(tt))
        block = 64
        # signed, shifted accumulation across g blocks
        run_max = -np.inf
        run_sum = 0.0
        g_lo = 0
        converged = False
        lam_min = float(lam[0])
        while g_lo < self.g_max:
            g = np.arange(g_lo, g_lo + block, dtype=float)
            # Gamma(tau(g)) U(tau(g), tau(g) + d + 1; rate) for every needed
            # first argument: tau(g) = Lam + shape_t + g over all (Lam, g)
            a_grid = np.arange(
                lam_min + g_lo, float(lam[-1]) + g_lo + block - 1 + 1e-9
            ) + self.shape_t
            log_gu = log_gamma_u_grid(a_grid, d, rate)
            # index of (Lam + g) within a_grid
            idx = (lam[:, None] - lam_min + (g[None, :] - g_lo)).astype(int)
            logs = (
                base[:, None]
                + gammaln(lam[:, None] + g[None, :])
                - gammaln(lam[:, None])
                + g[None, :] * log_abs_tt
                - gammaln(tau0[:, None] + g[None, :])
                + gammaln(tau0[:, None])
                - gammaln(g[None, :] + 1.0)
                + log_gu[idx]
            )
            if tt < 0.0:
                block_max = float(np.max(logs))
                new_max = max(run_max, block_max)
                run_sum = run_sum * math.exp(run_max - new_max) + float(
                    np.sum(np.exp(logs - new_max))
                )
                run_max = new_max
                tail = block_max
            else:
                signs = np.where((np.arange(g_lo, g_lo + block) % 2)[None, :] == 0, 1.0, -1.0)
                block_max = float(np.max(logs))
                new_max = max(run_max, block_max)
                run_sum = run_sum * math.exp(run_max - new_max) + float(
                    math.fsum((signs * np.exp(logs - new_max)).ravel())
                )
                run_max = new_max
                tail = block_max
            g_lo += block
            # stop once the freshest block is negligible against the total
            if run_sum > 0.0 and tail < run_max + math.log(run_sum) + math.log(self.tail_tol):
                converged = True
                break
        if not converged:
            warnings.warn(
                "confluent-factor series hit its term cap before converging",
                SeriesConvergenceWarning,
                stacklevel=2,
            )
        if run_sum <= 0.0:
            return -math.inf
        return run_max + math.log(run_sum)

    # ----- scaled-power limit kernel -------------------------------------

    def log_growth(self, x: float) -> float:
        """log of the eta-free limit kernel lim eta^(-x) E[(W_c+1)^x] under
        interferer power lam * eta; drives the zero-diversity asymptotes."""
        cfg = self.cfg
        if cfg.condition != "SCALED_B":
            raise ValueError("growth kernel only applies to scaled interferer power")
        lam_scale = cfg.lam
        if cfg.ms < 1 and cfg.mt_count < 1:
            return 0.0
        if cfg.ms < 1:
            return (
                x * math.log(lam_scale * cfg.nak.omega / cfg.nak.m)
                + gammaln(self.shape_t + x)
                - gammaln(self.shape_t)
            )
        beta_nu = self.coeffs.sr_coeffs.beta_nu
        log_c_raw = self.coeffs.log_c_lam
        if cfg.mt_count < 1:
            logs = (
                log_c_raw
                + gammaln(self.lam + x)
                - (self.lam + x) * math.log(beta_nu)
                + x * math.log(lam_scale)
            )
            return _lse(logs)
        ratio_t = cfg.nak.m / cfg.nak.omega
        rho = self.coeffs.rho
        tau0 = self.lam + self.shape_t
        if rho >= 0.0:
            log_f21 = self._log_2f1_real_shift(tau0, x, rho)
        else:
            w = rho / (rho - 1.0)
            log_f21 = self._log_2f1_real_shift_pfaff(tau0, x, w, rho)
        logs = (
            log_c_raw
            - (x + self.lam) * math.log(ratio_t)
            + self._log_beta_vec()
            - gammaln(self.shape_t)
            + x * math.log(lam_scale)
            + gammaln(tau0 + x)
            + log_f21
        )
        return _lse(logs)

    def _log_2f1_real_shift(self, tau0: np.ndarray, x: float, z: float) -> np.ndarray:
        """ln 2F1(Lam, tau0 + x; tau0; z) for one real shift x, 0 <= z < 1."""
        out = np.empty(tau0.shape)
        for i, (a, c0) in enumerate(zip(self.lam, tau0)):
            out[i] = _log_2f1_single(a, c0 + x, c0, z)
        return out

    def _log_2f1_real_shift_pfaff(self, tau0: np.ndarray, x: float, w: float, z: float) -> np.ndarray:
        out = np.empty(tau0.shape)
        for i, (a, c0) in enumerate(zip(self.lam, tau0)):
            out[i] = -(c0 + x) * math.log1p(-z) + _log_2f1_single(
                self.shape_t, c0 + x, c0, w
            )
        return out


def _log_2f1_single(a: float, b: float, c: float, z: float) -> float:
    return _log_2f1_direct(a, b, c, z)


def _log_2f1_direct(a: float, b: float, c: float, z: float, max_terms: int = 200_000) -> float:
    """Positive-term ascending series of 2F1(a,b;c;z), 0 <= z < 1, in logs."""
    if z == 0.0:
        return 0.0
    log_z = math.log(z)
    log_t = 0.0
    run_max = 0.0
    run_sum = 1.0
    for k in range(max_terms):
        log_t += math.log(a + k) + math.log(b + k) - math.log(c + k) - math.log(k + 1.0) + log_z
        if log_t > run_max:
            run_sum = run_sum * math.exp(run_max - log_t) + 1.0
            run_max = log_t
        else:
            run_sum += math.exp(log_t - run_max)
        if log_t < run_max + math.log(1e-18) and (a + k) * (b + k) * z < (c + k) * (k + 1.0):
            return run_max + math.log(run_sum)
    warnings.warn("2F1 series hit its term cap", SeriesConvergenceWarning, stacklevel=2)
    return run_max + math.log(run_sum)


def _lse(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=float).ravel()
    m = float(np.max(a))
    if not math.isfinite(m):
        return -math.inf
    return m + math.log(float(np.sum(np.exp(a - m))))
