"""Pure-numpy kernels for the per-unit bound and correction evaluations.

These are the hot inner loops of the sequential estimator, which re-runs
them over the whole accumulated batch at every step.  A Cython twin with
the same signatures lives in ``_kernels.pyx``; ``_backend`` picks one at
import time.

All kernels assume the homoskedastic Gaussian outcome family: tier and
survival probabilities are Gaussian CDF evaluations at the thresholds.
Inputs are 1-d float64 arrays over units (``mu0``/``mu1`` are conditional
outcome means under no treatment / treatment) plus the shared residual
scale ``sigma`` and the strictly increasing threshold vector.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr

__all__ = [
    "bound_terms",
    "bound_terms_smooth",
    "correction_terms",
    "correction_terms_smooth",
]

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def _tier_and_survival(mu0, mu1, sigma, thresholds):
    """Per-unit R_k(arm 0) and S_k(arm 1) for k = 1..K-1, shape (n, K-1)."""
    c = np.asarray(thresholds, dtype=np.float64)
    f0 = ndtr((c[None, :] - mu0[:, None]) / sigma)  # P(Y <= c_k | arm 0)
    f1 = ndtr((c[None, :] - mu1[:, None]) / sigma)
    r0 = np.diff(f0, axis=1, prepend=0.0)           # P(Y in I_k | arm 0)
    s1 = 1.0 - f1                                   # P(Y > c_k | arm 1)
    return r0, s1


def bound_terms(mu0, mu1, sigma, thresholds):
    """Per-unit Frechet sums: lower and upper integrands of the bounds.

    Returns ``(lam, ups)`` with
    ``lam_i = sum_k max(0, R_k0 + S_k1 - 1)`` and
    ``ups_i = sum_k min(R_k0, S_k1)``.
    """
    r0, s1 = _tier_and_survival(np.asarray(mu0, float), np.asarray(mu1, float),
                                sigma, thresholds)
    lam = np.maximum(0.0, r0 + s1 - 1.0).sum(axis=1)
    ups = np.minimum(r0, s1).sum(axis=1)
    return lam, ups


def _gelu(u, h):
    return u * ndtr(u / h)


def _gelu_grad(u, h):
    z = u / h
    return ndtr(z) + z * np.exp(-0.5 * z * z) / _SQRT_2PI


def bound_terms_smooth(mu0, mu1, sigma, thresholds, h):
    """Smooth-surrogate variant: max{0,u} -> u*Phi(u/h), min{a,b} -> a - GELU(a-b)."""
    r0, s1 = _tier_and_survival(np.asarray(mu0, float), np.asarray(mu1, float),
                                sigma, thresholds)
    lam = _gelu(r0 + s1 - 1.0, h).sum(axis=1)
    ups = (r0 - _gelu(r0 - s1, h)).sum(axis=1)
    return lam, ups


def _correction_parts(a, y, pi, mu0, mu1, sigma, thresholds):
    a = np.asarray(a, float)
    y = np.asarray(y, float)
    pi = np.asarray(pi, float)
    r0, s1 = _tier_and_survival(np.asarray(mu0, float), np.asarray(mu1, float),
                                sigma, thresholds)
    c = np.asarray(thresholds, dtype=np.float64)
    lo = np.concatenate(([-np.inf], c[:-1]))
    in_tier = (y[:, None] > lo[None, :]) & (y[:, None] <= c[None, :])
    above = y[:, None] > c[None, :]
    d_r = ((1.0 - a) / (1.0 - pi))[:, None] * (in_tier - r0)
    d_s = (a / pi)[:, None] * (above - s1)
    return r0, s1, d_r, d_s


def correction_terms(a, y, pi, mu0, mu1, sigma, thresholds):
    """Per-unit one-step corrections ``(d_lam, d_ups)`` with hard rules.

    ``d_lam_i = sum_k (D_k^R + D_k^S) 1[R_k0 + S_k1 - 1 > 0]`` and
    ``d_ups_i = sum_k [D_k^R - (D_k^R - D_k^S) 1[R_k0 - S_k1 > 0]]``.
    """
    r0, s1, d_r, d_s = _correction_parts(a, y, pi, mu0, mu1, sigma, thresholds)
    lam_rule = (r0 + s1 - 1.0) > 0.0
    ups_rule = (r0 - s1) > 0.0
    d_lam = ((d_r + d_s) * lam_rule).sum(axis=1)
    d_ups = (d_r - (d_r - d_s) * ups_rule).sum(axis=1)
    return d_lam, d_ups


def correction_terms_smooth(a, y, pi, mu0, mu1, sigma, thresholds, h):
    """Corrections with the hard rules replaced by the GELU derivative."""
    r0, s1, d_r, d_s = _correction_parts(a, y, pi, mu0, mu1, sigma, thresholds)
    lam_rule = _gelu_grad(r0 + s1 - 1.0, h)
    ups_rule = _gelu_grad(r0 - s1, h)
    d_lam = ((d_r + d_s) * lam_rule).sum(axis=1)
    d_ups = (d_r - (d_r - d_s) * ups_rule).sum(axis=1)
    return d_lam, d_ups
