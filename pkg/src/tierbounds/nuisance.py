"""Nuisance models: propensity score and Gaussian conditional outcome.

Both models are linear in a configurable term basis over the observed
columns.  The propensity score is fit by iteratively reweighted least
squares (logit or probit link); the outcome mean by ordinary least
squares with a homoskedastic residual scale (MLE denominator n).

Threshold-survival S_k and tier-membership R_k probabilities are exposed
as closed-form Gaussian CDF evaluations, with the boundary conventions
S_0 = 1 and S_K = 0, so that R_k = S_{k-1} - S_k sums to one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, ndtr

from .data import DataError, ObservationTable


class FitError(ValueError):
    """Unfittable model (rank deficiency, degenerate exposure, ...)."""


@dataclass(frozen=True)
class TierPartition:
    """Strictly increasing thresholds c_1 < ... < c_{K-1} defining K tiers."""

    thresholds: tuple[float, ...]

    def __post_init__(self) -> None:
        c = np.asarray(self.thresholds, dtype=float)
        if c.size < 1:
            raise ValueError("at least one threshold is required")
        if not np.all(np.diff(c) > 0):
            raise ValueError(f"thresholds must be strictly increasing, got {self.thresholds}")
        object.__setattr__(self, "thresholds", tuple(float(v) for v in c))

    @property
    def k(self) -> int:
        return len(self.thresholds) + 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.thresholds, dtype=float)

    def tier_of(self, y: np.ndarray) -> np.ndarray:
        """0-based tier index; tier k is the interval (c_k, c_{k+1}]."""
        return np.searchsorted(self.as_array(), np.asarray(y, float), side="left")


@dataclass(frozen=True)
class Basis:
    """A feature map given by a list of product terms over column names.

    Terms are ``"1"`` for the intercept or ``"*"``-joined column names,
    e.g. ``["1", "w1", "x", "a*w2*x"]``.
    """

    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("empty basis")
        object.__setattr__(self, "terms", tuple(self.terms))

    def design(self, cols: dict[str, np.ndarray]) -> np.ndarray:
        n = len(next(iter(cols.values())))
        out = np.empty((n, len(self.terms)))
        for j, term in enumerate(self.terms):
            if term == "1":
                out[:, j] = 1.0
                continue
            col = np.ones(n)
            for factor in term.split("*"):
                if factor not in cols:
                    raise DataError(f"basis term {term!r} references unknown column {factor!r}")
                col = col * cols[factor]
            out[:, j] = col
        return out

    def to_json(self) -> list[str]:
        return list(self.terms)


def _check_rank(design: np.ndarray, terms: tuple[str, ...]) -> None:
    if design.shape[0] < design.shape[1]:
        raise FitError(
            f"{design.shape[0]} rows for {design.shape[1]} basis columns")
    _, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    tol = diag.max() * max(design.shape) * np.finfo(float).eps
    bad = [terms[j] for j in np.nonzero(diag <= tol)[0]]
    if bad:
        raise FitError(f"singular design matrix; collinear columns: {bad}")


@dataclass(frozen=True)
class PropensityModel:
    """Fitted propensity score pi(w, x) with numeric positivity clipping."""

    link: str
    basis: Basis
    coef: np.ndarray
    clip: tuple[float, float] = (0.01, 0.99)
    converged: bool = True
    n_iter: int = 0
    score_norm: float = 0.0

    def _eta(self, cols: dict[str, np.ndarray]) -> np.ndarray:
        return self.basis.design(cols) @ self.coef

    def predict(self, cols: dict[str, np.ndarray]) -> np.ndarray:
        p = _mean_fn(self.link)(self._eta(cols))
        return np.clip(p, self.clip[0], self.clip[1])

    def to_json(self) -> dict:
        return {
            "link": self.link,
            "basis": self.basis.to_json(),
            "coef": self.coef.tolist(),
            "clip": list(self.clip),
            "converged": self.converged,
            "n_iter": self.n_iter,
        }


@dataclass(frozen=True)
class OutcomeModel:
    """Gaussian outcome model: mean linear in the basis, scale ``sigma``."""

    basis: Basis
    coef: np.ndarray
    sigma: float
    degenerate: bool = False

    def mean(self, cols: dict[str, np.ndarray], a: float | np.ndarray | None = None) -> np.ndarray:
        if a is not None:
            cols = dict(cols)
            n = len(next(iter(cols.values())))
            cols["a"] = np.broadcast_to(np.asarray(a, float), (n,))
        return self.basis.design(cols) @ self.coef

    def to_json(self) -> dict:
        return {
            "basis": self.basis.to_json(),
            "coef": self.coef.tolist(),
            "sigma": self.sigma,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class NuisancePair:
    propensity: PropensityModel
    outcome: OutcomeModel


def _mean_fn(link: str):
    if link == "logit":
        return expit
    if link == "probit":
        return ndtr
    raise ValueError(f"unknown link {link!r} (expected 'logit' or 'probit')")


_NORM_PDF = lambda z: np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi)


def _irls_step(link: str, eta: np.ndarray, a: np.ndarray):
    """Score vector weights and working residuals for one Fisher-scoring step."""
    if link == "logit":
        p = expit(eta)
        w = p * (1 - p)
        resid = a - p
    else:
        p = ndtr(eta)
        phi = _NORM_PDF(eta)
        pq = np.clip(p * (1 - p), 1e-300, None)
        w = phi * phi / pq
        resid = (a - p) * phi / pq
    return p, w, resid


def _loglik(link: str, eta: np.ndarray, a: np.ndarray) -> float:
    p = np.clip(_mean_fn(link)(eta), 1e-12, 1 - 1e-12)
    return float(np.sum(a * np.log(p) + (1 - a) * np.log1p(-p)))


def _irls(
    design: np.ndarray,
    a: np.ndarray,
    link: str,
    init: np.ndarray | None = None,
    max_iter: int = 100,
    tol: float = 1e-10,
) -> tuple[np.ndarray, bool, int, float]:
    """Fisher-scoring IRLS with step halving on likelihood decrease.

    Returns ``(beta, converged, n_iter, score_norm)``.  The tolerance
    applies to the norm of the mean score (per-unit gradient), which
    keeps it scale-free in the sample size.  Perfect separation does not
    raise: the loop stops at ``max_iter`` with ``converged=False``.
    """
    n = design.shape[0]
    beta = np.zeros(design.shape[1]) if init is None else np.asarray(init, float).copy()
    ll = _loglik(link, design @ beta, a)
    score_norm = np.inf
    converged = False
    stalled = 0
    it = 0
    for it in range(1, max_iter + 1):
        eta = design @ beta
        _, w, resid = _irls_step(link, eta, a)
        score = design.T @ resid
        new_norm = float(np.linalg.norm(score)) / n
        stalled = stalled + 1 if new_norm >= score_norm else 0
        score_norm = min(score_norm, new_norm)
        if new_norm < tol:
            score_norm = new_norm
            converged = True
            break
        if stalled >= 5:  # floating-point floor; no further progress possible
            break
        h = design.T @ (w[:, None] * design)
        try:
            delta = np.linalg.solve(h, score)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(h, score, rcond=None)[0]
        step = 1.0
        for _ in range(30):
            cand = beta + step * delta
            ll_new = _loglik(link, design @ cand, a)
            if ll_new >= ll - 1e-14:
                break
            step *= 0.5
        beta = beta + step * delta
        ll = _loglik(link, design @ beta, a)
    return beta, converged, it, score_norm


def fit_propensity(
    data: ObservationTable,
    link: str = "logit",
    basis: Basis | None = None,
    clip: tuple[float, float] = (0.01, 0.99),
    init: np.ndarray | None = None,
    max_iter: int = 100,
    tol: float = 1e-10,
) -> PropensityModel:
    """Maximum-likelihood propensity fit (IRLS); supports warm starts."""
    if data.n == 0:
        raise DataError("empty data")
    if len(np.unique(data.a)) < 2:
        raise FitError("degenerate exposure: only one arm present in the data")
    basis = basis or Basis(("1", "w1", "x"))
    cols = {k: v for k, v in data.columns().items() if k != "a"}
    design = basis.design(cols)
    _check_rank(design, basis.terms)
    beta, converged, it, score_norm = _irls(
        design, data.a.astype(float), link, init, max_iter, tol)
    return PropensityModel(link=link, basis=basis, coef=beta, clip=clip,
                           converged=converged, n_iter=it, score_norm=score_norm)


def fit_outcome(
    data: ObservationTable,
    basis: Basis | None = None,
    init: np.ndarray | None = None,
) -> OutcomeModel:
    """Least-squares Gaussian outcome fit; sigma uses the MLE denominator n."""
    basis = basis or Basis(
        ("1", "a", "w1", "x", "a*w1", "a*x", "a*w2", "a*w2*w1", "a*w2*x"))
    design = basis.design(data.columns())
    _check_rank(design, basis.terms)
    coef, *_ = np.linalg.lstsq(design, data.y, rcond=None)
    resid = data.y - design @ coef
    sigma = float(np.sqrt(np.mean(resid * resid)))
    # a residual scale at the float rounding floor means the fit is exact
    scale = float(np.sqrt(max(np.mean(data.y * data.y), 1.0)))
    degenerate = sigma <= 1e-12 * scale
    if degenerate:
        sigma = 0.0
    return OutcomeModel(basis=basis, coef=coef, sigma=sigma,
                        degenerate=degenerate)


def survival(model: OutcomeModel, cols: dict[str, np.ndarray], a,
             partition: TierPartition) -> np.ndarray:
    """S_k(w, x, a) = P(Y > c_k | ...) for k = 1..K-1, shape (n, K-1)."""
    mu = model.mean(cols, a)
    c = partition.as_array()
    if model.sigma == 0.0:
        return (mu[:, None] > c[None, :]).astype(float)
    return 1.0 - ndtr((c[None, :] - mu[:, None]) / model.sigma)


def tier_probs(model: OutcomeModel, cols: dict[str, np.ndarray], a,
               partition: TierPartition) -> np.ndarray:
    """R_k = S_{k-1} - S_k with S_0 = 1, S_K = 0; shape (n, K)."""
    s = survival(model, cols, a, partition)
    ones = np.ones((s.shape[0], 1))
    zeros = np.zeros((s.shape[0], 1))
    return np.hstack([ones, s]) - np.hstack([s, zeros])
