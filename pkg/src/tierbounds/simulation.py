"""Synthetic data generator and independent ground-truth oracles.

The generator draws from a fixed structural model with a binary stratum,
a probit exposure mechanism and a homoskedastic Gaussian outcome whose
treatment effect vanishes on the subgroup ``w2 = 1`` (an "immune"
subgroup present with probability one half in each stratum, which makes
the law exceptional for the lower bound).  Both potential outcomes share
the same outcome noise, so benefit/harm probabilities are well defined
per unit and computable by the oracle.

Two independent oracles are provided for the tiered-benefit probability
and its bounds: Monte Carlo over the latent variables, and fixed-node
Gauss-Legendre quadrature over the covariates with closed-form Gaussian
tier probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.special import ndtr

from ._rng import substream
from .data import ObservationTable, PotentialOutcomes
from .nuisance import TierPartition


@dataclass(frozen=True)
class ScmParams:
    """Coefficient overrides for the data-generating model.

    Defaults reproduce the benchmark model:
      A = 1[0.5 (W1 + 2X - 1) + u_A > 0],            u_A ~ N(0, 1)
      Y = mu(W1, W2, X, A) + u_Y,                    u_Y ~ N(0, sigma^2)
      mu = -1 + 0.5 (W1 + X) + A (1 - W2) (W1 + X + 2)
    """

    sigma: float = 2.0
    prop_intercept: float = -0.5
    prop_w1: float = 0.5
    prop_x: float = 1.0
    base_intercept: float = -1.0
    base_slope: float = 0.5
    effect_scale: float = 1.0
    effect_offset: float = 2.0

    def mean(self, w1, w2, x, a):
        s = np.asarray(w1, float) + np.asarray(x, float)
        base = self.base_intercept + self.base_slope * s
        effect = (1.0 - np.asarray(w2, float)) * (self.effect_scale * s + self.effect_offset)
        return base + np.asarray(a, float) * effect

    def propensity_eta(self, w1, x):
        return (self.prop_intercept + self.prop_w1 * np.asarray(w1, float)
                + self.prop_x * np.asarray(x, float))


@dataclass(frozen=True)
class ScmPropensity:
    """Closed-form (true) propensity score; same interface as a fitted model."""

    params: ScmParams = ScmParams()
    clip: tuple[float, float] = (0.0, 1.0)

    def predict(self, cols):
        p = ndtr(self.params.propensity_eta(cols["w1"], cols["x"]))
        return np.clip(p, self.clip[0], self.clip[1])


@dataclass(frozen=True)
class ScmOutcome:
    """Closed-form (true) conditional outcome model."""

    params: ScmParams = ScmParams()

    @property
    def sigma(self) -> float:
        return self.params.sigma

    def mean(self, cols, a=None):
        if a is None:
            a = cols["a"]
        return self.params.mean(cols["w1"], cols["w2"], cols["x"], a)


def true_nuisance(params: ScmParams = ScmParams()):
    """The closed-form nuisance pair of the generator, for oracle tests."""
    from .nuisance import NuisancePair

    return NuisancePair(propensity=ScmPropensity(params), outcome=ScmOutcome(params))


def simulate(
    n: int,
    seed: int,
    params: ScmParams = ScmParams(),
) -> tuple[ObservationTable, PotentialOutcomes]:
    """Draw ``n`` i.i.d. units; potential outcomes are returned separately."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = substream(seed, "simulate")
    v = rng.uniform(-1.0, 1.0, n)
    w1 = rng.uniform(-1.0, 1.0, n)
    u_a = rng.normal(0.0, 1.0, n)
    u_y = rng.normal(0.0, params.sigma, n)
    x = (v > 0).astype(int)
    w2 = (v * v > 0.25).astype(int)
    a = (params.propensity_eta(w1, x) + u_a > 0).astype(int)
    y0 = params.mean(w1, w2, x, 0) + u_y
    y1 = params.mean(w1, w2, x, 1) + u_y
    y = np.where(a == 1, y1, y0)
    table = ObservationTable(
        w={"w1": w1, "w2": w2.astype(float)}, x=x, a=a, y=y)
    return table, PotentialOutcomes(y0=y0, y1=y1)


@dataclass(frozen=True)
class OracleResult:
    stratum: int
    pb_true: float
    ph_true: float
    lower_true: float
    upper_true: float
    mc_samples: int
    mc_std_error: float

    def to_json(self) -> dict:
        return {
            "stratum": self.stratum,
            "pb_true": self.pb_true,
            "ph_true": self.ph_true,
            "lower_true": self.lower_true,
            "upper_true": self.upper_true,
            "mc_samples": self.mc_samples,
            "mc_std_error": self.mc_std_error,
        }


def _bound_integrands(mu0, mu1, sigma, c):
    """Closed-form Frechet integrand sums given conditional means."""
    f0 = ndtr((c[None, :] - mu0[:, None]) / sigma)
    f1 = ndtr((c[None, :] - mu1[:, None]) / sigma)
    r0 = np.diff(f0, axis=1, prepend=0.0)
    s1 = 1.0 - f1
    lam = np.maximum(0.0, r0 + s1 - 1.0).sum(axis=1)
    ups = np.minimum(r0, s1).sum(axis=1)
    return lam, ups


def _shared_noise_pb_ph(mu0, mu1, sigma, c):
    """P(benefit) and P(harm) per unit, integrating the shared outcome noise.

    With both arms sharing u_Y, benefit at tier k is the event
    u in (c_{k-1} - mu0, c_k - mu0] intersected with (c_k - mu1, inf).
    """
    lo = np.concatenate(([-np.inf], c[:-1]))
    pb = np.zeros(len(mu0))
    ph = np.zeros(len(mu0))
    for k in range(len(c)):
        hi0 = ndtr((c[k] - mu0) / sigma)
        cut_b = ndtr(np.maximum(lo[k] - mu0, c[k] - mu1) / sigma)
        pb += np.maximum(0.0, hi0 - cut_b)
        hi1 = ndtr((c[k] - mu1) / sigma)
        cut_h = ndtr(np.maximum(c[k] - mu0, lo[k] - mu1) / sigma)
        ph += np.maximum(0.0, hi1 - cut_h)
    return pb, ph


def oracle_truth(
    stratum: int,
    partition: TierPartition,
    mc_samples: int = 10**6,
    seed: int = 0,
    method: str = "mc",
    params: ScmParams = ScmParams(),
    quadrature_nodes: int = 200,
) -> OracleResult:
    """Ground truth for PB, PH and the bounds in one stratum.

    ``method="mc"`` integrates over covariate draws (pb/ph use the exact
    shared-noise conditional probabilities, so the only Monte Carlo error
    comes from the covariate integral); ``method="quadrature"`` replaces
    the covariate integral by Gauss-Legendre nodes over w1 crossed with
    w2 in {0, 1}.
    """
    if stratum not in (0, 1):
        raise ValueError(f"unknown stratum {stratum}")
    c = partition.as_array()
    if method == "mc":
        if mc_samples < 10**4:
            raise ValueError("mc_samples must be >= 10^4")
        rng = substream(seed, "oracle", stratum)
        # v | X=x is uniform on a half interval; only w2 = 1[v^2 > .25] matters
        w2 = (rng.uniform(0.0, 1.0, mc_samples) > 0.5).astype(float)
        w1 = rng.uniform(-1.0, 1.0, mc_samples)
        weights = np.full(mc_samples, 1.0 / mc_samples)
    elif method == "quadrature":
        nodes, wq = np.polynomial.legendre.leggauss(quadrature_nodes)
        # w1 in [-1, 1] with density 1/2; w2 Bernoulli(1/2) in both strata
        w1 = np.concatenate([nodes, nodes])
        w2 = np.concatenate([np.zeros_like(nodes), np.ones_like(nodes)])
        weights = np.concatenate([wq, wq]) / 4.0
        mc_samples = 0
    else:
        raise ValueError(f"unknown oracle method {method!r}")

    mu0 = params.mean(w1, w2, stratum, 0)
    mu1 = params.mean(w1, w2, stratum, 1)
    pb_i, ph_i = _shared_noise_pb_ph(mu0, mu1, params.sigma, c)
    lam_i, ups_i = _bound_integrands(mu0, mu1, params.sigma, c)

    def avg(vals):
        return float(np.sum(weights * vals))

    if method == "mc":
        def se(vals):
            return float(np.std(vals) / np.sqrt(len(vals)))
        err = max(se(pb_i), se(ph_i), se(lam_i), se(ups_i))
    else:
        err = 0.0
    return OracleResult(
        stratum=stratum,
        pb_true=avg(pb_i), ph_true=avg(ph_i),
        lower_true=avg(lam_i), upper_true=avg(ups_i),
        mc_samples=mc_samples, mc_std_error=err,
    )


def immune_subgroup_check(w1: float, x: int,
                          params: ScmParams = ScmParams()) -> tuple[float, float]:
    """Conditional means of both arms on the w2 = 1 subgroup.

    They coincide exactly, which is what makes the generating law
    exceptional for the lower bound.
    """
    mu0 = float(params.mean(w1, 1.0, x, 0))
    mu1 = float(params.mean(w1, 1.0, x, 1))
    assert mu0 == mu1, "w2=1 subgroup must have a null treatment effect"
    return mu0, mu1


class InfeasibleMarginsError(ValueError):
    """No monotone cell matrix is consistent with the given margins."""


@dataclass(frozen=True)
class CounterfactualCellMatrix:
    """Joint cell probabilities q[a, b] = P(untreated tier a, treated tier b).

    Monotone (nonharmful) solutions have q[a, b] = 0 for b < a.
    """

    k: int
    q: np.ndarray

    @property
    def row_margins(self) -> np.ndarray:
        return self.q.sum(axis=1)

    @property
    def col_margins(self) -> np.ndarray:
        return self.q.sum(axis=0)

    @property
    def pb(self) -> float:
        return float(np.triu(self.q, 1).sum())

    @property
    def ph(self) -> float:
        return float(np.tril(self.q, -1).sum())

    def to_json(self) -> dict:
        return {"k": self.k, "q": self.q.tolist(), "pb": self.pb, "ph": self.ph}


def _validate_margins(m, k, name):
    m = np.asarray(m, dtype=float)
    if m.shape != (k,):
        raise ValueError(f"{name} must have length {k}")
    if (m < -1e-12).any() or abs(m.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} is not a probability vector")
    return np.clip(m, 0.0, None)


def nonidentifiability_witness(
    k: int,
    margins0,
    margins1,
) -> tuple[CounterfactualCellMatrix, CounterfactualCellMatrix, bool]:
    """Two monotone cell matrices with identical margins but different benefit.

    Solves two linear programs over the monotone polytope, minimizing and
    maximizing the off-diagonal (benefit) mass.  Returns the two extreme
    matrices plus a flag that is True when the solution is unique (the
    extremes coincide), which happens for degenerate margins.
    """
    if k <= 2:
        raise ValueError(
            "k <= 2 is uniquely solvable under monotonicity; no witness exists")
    m0 = _validate_margins(margins0, k, "margins0")
    m1 = _validate_margins(margins1, k, "margins1")
    idx = [(a, b) for a in range(k) for b in range(a, k)]
    nvar = len(idx)
    obj = np.array([1.0 if b > a else 0.0 for a, b in idx])
    a_eq = np.zeros((2 * k, nvar))
    for j, (a, b) in enumerate(idx):
        a_eq[a, j] = 1.0
        a_eq[k + b, j] = 1.0
    b_eq = np.concatenate([m0, m1])

    def solve(sign):
        res = linprog(sign * obj, A_eq=a_eq, b_eq=b_eq,
                      bounds=[(0.0, 1.0)] * nvar, method="highs")
        if res.status != 0:
            raise InfeasibleMarginsError(
                f"margins admit no monotone solution (LP status {res.status}: {res.message})")
        q = np.zeros((k, k))
        for j, (a, b) in enumerate(idx):
            q[a, b] = max(res.x[j], 0.0)
        return CounterfactualCellMatrix(k=k, q=q)

    lo = solve(+1.0)
    hi = solve(-1.0)
    unique = abs(hi.pb - lo.pb) < 1e-9
    return lo, hi, unique
