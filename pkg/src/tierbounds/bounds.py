"""Identification layer: sharp Frechet bounds on tiered benefit and harm.

For a unit with covariates w in stratum x, each inner tier k contributes
``max{0, R_k(w,x,0) + S_k(w,x,1) - 1}`` to the lower bound and
``min{R_k(w,x,0), S_k(w,x,1)}`` to the upper bound; stratum-level bounds
average these contributions over the empirical covariate distribution of
the stratum.  Monotone (nonharmful-treatment) bounds and the harm
analogue (arm roles swapped) are also provided, together with the
individualized argmax/argmin rules that drive the correction layer.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from . import _backend
from .data import DataError, ObservationTable
from .nuisance import NuisancePair, TierPartition


@dataclass(frozen=True)
class UnitBoundContribution:
    """Per-unit, per-tier Frechet terms and their sums (arrays over units)."""

    lambda_terms: np.ndarray  # (n, K-1)
    upsilon_terms: np.ndarray  # (n, K-1)

    @property
    def lambda_i(self) -> np.ndarray:
        return self.lambda_terms.sum(axis=1)

    @property
    def upsilon_i(self) -> np.ndarray:
        return self.upsilon_terms.sum(axis=1)


@dataclass(frozen=True)
class RulePair:
    """Individualized strict-inequality indicator rules per unit and tier."""

    lam: np.ndarray  # (n, K-1) in {0, 1}
    ups: np.ndarray  # (n, K-1) in {0, 1}


@dataclass
class BoundsEstimate:
    stratum: int
    lower: float
    upper: float
    covariance: np.ndarray | None
    n_units: int
    method: str
    flags: list[str] = field(default_factory=list)

    @property
    def out_of_space(self) -> bool:
        return "out_of_space" in self.flags

    def projected(self) -> "BoundsEstimate":
        """Optional projection onto {0 <= lower <= upper <= 1}."""
        lo = min(max(self.lower, 0.0), 1.0)
        hi = min(max(self.upper, 0.0), 1.0)
        if lo > hi:
            mid = 0.5 * (lo + hi)
            lo = hi = mid
        return BoundsEstimate(self.stratum, lo, hi, self.covariance,
                              self.n_units, self.method,
                              flags=self.flags + ["projected"])

    def to_json(self) -> dict:
        return {
            "stratum": int(self.stratum),
            "method": self.method,
            "lower": self.lower,
            "upper": self.upper,
            "cov": None if self.covariance is None else self.covariance.tolist(),
            "n_units": self.n_units,
            "flags": self.flags,
        }


def _mu_pair(nuisance: NuisancePair, cols):
    out = nuisance.outcome
    return out.mean(cols, 0.0), out.mean(cols, 1.0), out.sigma


def _rs_matrices(nuisance: NuisancePair, cols, partition: TierPartition):
    """R_k(.,0) and S_k(.,1) for the K-1 inner tiers, shapes (n, K-1)."""
    mu0, mu1, sigma = _mu_pair(nuisance, cols)
    c = partition.as_array()
    f0 = ndtr((c[None, :] - mu0[:, None]) / sigma)
    f1 = ndtr((c[None, :] - mu1[:, None]) / sigma)
    return np.diff(f0, axis=1, prepend=0.0), 1.0 - f1


def unit_contributions(nuisance: NuisancePair, cols,
                       partition: TierPartition) -> UnitBoundContribution:
    r0, s1 = _rs_matrices(nuisance, cols, partition)
    return UnitBoundContribution(
        lambda_terms=np.maximum(0.0, r0 + s1 - 1.0),
        upsilon_terms=np.minimum(r0, s1),
    )


def rules(nuisance: NuisancePair, cols, partition: TierPartition) -> RulePair:
    """Strict-inequality rules; exact ties resolve to 0."""
    r0, s1 = _rs_matrices(nuisance, cols, partition)
    return RulePair(lam=((r0 + s1 - 1.0) > 0.0).astype(np.int8),
                    ups=((r0 - s1) > 0.0).astype(np.int8))


def _stratum_cols(data: ObservationTable, stratum: int):
    mask = data.x == stratum
    if not mask.any():
        raise DataError(f"stratum {stratum} has no units")
    return data.subset(mask).columns(), int(mask.sum())


def _estimate_from_units(lam_i, ups_i, stratum, method, flags=()):
    n = len(lam_i)
    cov = None
    if n >= 2:
        cov = np.cov(np.vstack([lam_i, ups_i]), ddof=1) / n
    lower = float(np.mean(lam_i))
    upper = float(np.mean(ups_i))
    flags = list(flags)
    if lower > upper or lower < 0.0 or upper > 1.0:
        flags.append("out_of_space")
    return BoundsEstimate(stratum=stratum, lower=lower, upper=upper,
                          covariance=cov, n_units=n, method=method, flags=flags)


def plugin_bounds(nuisance: NuisancePair, data: ObservationTable,
                  stratum: int, partition: TierPartition) -> BoundsEstimate:
    """Plug-in bounds: stratum average of the per-unit Frechet sums.

    The reported covariance is the scaled sample covariance of the
    uncorrected per-unit values; it quantifies sampling noise of the
    average but carries no first-order bias correction.
    """
    cols, _ = _stratum_cols(data, stratum)
    mu0, mu1, sigma = _mu_pair(nuisance, cols)
    lam_i, ups_i = _backend.bound_terms(mu0, mu1, sigma, partition.as_array())
    return _estimate_from_units(lam_i, ups_i, stratum, "plug-in")


def harm_bounds(nuisance: NuisancePair, data: ObservationTable,
                stratum: int, partition: TierPartition) -> BoundsEstimate:
    """Bounds on the probability of tiered harm: arm roles swapped."""
    cols, _ = _stratum_cols(data, stratum)
    mu0, mu1, sigma = _mu_pair(nuisance, cols)
    lam_i, ups_i = _backend.bound_terms(mu1, mu0, sigma, partition.as_array())
    return _estimate_from_units(lam_i, ups_i, stratum, "harm-plug-in")


def mono_bounds(nuisance: NuisancePair, data: ObservationTable,
                stratum: int, partition: TierPartition) -> BoundsEstimate:
    """Bounds under a monotone, nonharmful treatment (K >= 3 only).

    Per unit: S_1(W,x,1) - R_K(W,x,0) minus, for the interior tiers,
    min{R_k(.,0), R_k(.,1)} (lower) or max{0, R_k(.,0)+R_k(.,1)-1} (upper).
    """
    if partition.k < 3:
        raise ValueError(
            "monotone bounds need K >= 3; K = 2 is point identified")
    cols, _ = _stratum_cols(data, stratum)
    mu0, mu1, sigma = _mu_pair(nuisance, cols)
    c = partition.as_array()
    f0 = ndtr((c[None, :] - mu0[:, None]) / sigma)
    f1 = ndtr((c[None, :] - mu1[:, None]) / sigma)
    s1_first = 1.0 - f1[:, 0]
    rk_last0 = 1.0 - f0[:, -1]
    r0 = np.diff(f0, axis=1)  # interior tiers k = 2..K-1
    r1 = np.diff(f1, axis=1)
    base = s1_first - rk_last0
    lam_i = base - np.minimum(r0, r1).sum(axis=1)
    ups_i = base - np.maximum(0.0, r0 + r1 - 1.0).sum(axis=1)
    return _estimate_from_units(lam_i, ups_i, stratum, "mono-plug-in")


def ambiguity_set_mass(nuisance: NuisancePair, data: ObservationTable,
                       stratum: int, partition: TierPartition,
                       tol: float = 1e-6) -> float:
    """Fraction of stratum units within ``tol`` of an argmax/argmin tie.

    An empirical diagnostic for exceptionality of the law: a positive
    mass signals that the bounds functional may not be differentiable.
    """
    cols, _ = _stratum_cols(data, stratum)
    r0, s1 = _rs_matrices(nuisance, cols, partition)
    near_tie = (np.abs(r0 + s1 - 1.0) <= tol) | (np.abs(r0 - s1) <= tol)
    return float(np.mean(near_tie.any(axis=1)))
