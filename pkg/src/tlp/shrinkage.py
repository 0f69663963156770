"""Targeted and smooth local projections.

Variance inputs are on the ``sqrt(T)`` scale, i.e. ``sigma_lp[h]`` estimates
``T * Var(beta_lp[h])``. The risk criterion compares them against
``T * (beta_lp - beta_var)**2``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (
    InvalidSpec,
    IrfPath,
    Method,
    ShapeMismatch,
    SingularSystem,
    TooFewHorizons,
)
from .estimators import lp_moments

log = logging.getLogger(__name__)

DENOMINATOR_FLOOR = 1e-14


@dataclass(frozen=True)
class VarianceTriple:
    sigma_lp: np.ndarray
    sigma_var: np.ndarray
    sigma_cov: np.ndarray

    def __post_init__(self):
        arrs = [np.atleast_1d(np.asarray(a, dtype=float)) for a in (self.sigma_lp, self.sigma_var, self.sigma_cov)]
        if len({a.shape for a in arrs}) != 1:
            raise ShapeMismatch("variance triple components must share a shape")
        lp, var, cov = arrs
        if np.any(lp <= 0) or np.any(var <= 0):
            raise InvalidSpec("LP and VAR variances must be strictly positive")
        if np.any(np.abs(cov) > np.sqrt(lp * var) + 1e-9):
            raise InvalidSpec("covariance violates the Cauchy-Schwarz bound")
        object.__setattr__(self, "sigma_lp", lp)
        object.__setattr__(self, "sigma_var", var)
        object.__setattr__(self, "sigma_cov", cov)

    def __getitem__(self, h) -> "VarianceTriple":
        return VarianceTriple(self.sigma_lp[h], self.sigma_var[h], self.sigma_cov[h])

    def scaled(self, c: float) -> "VarianceTriple":
        return VarianceTriple(c * self.sigma_lp, c * self.sigma_var, c * self.sigma_cov)


@dataclass(frozen=True)
class TlpWeights:
    """Per-horizon weight on LP, with the equivalent ridge penalty.

    ``clipped`` marks horizons where the closed form fell outside ``[0, 1]``;
    ``degenerate`` marks a vanishing denominator (weight set to 1).
    """

    v: np.ndarray
    lambda_implied: np.ndarray
    clipped: np.ndarray = field(default=None)
    degenerate: np.ndarray = field(default=None)

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        if np.any(v < 0) or np.any(v > 1):
            raise InvalidSpec("TLP weights must lie in [0, 1]")
        object.__setattr__(self, "v", v)
        for name in ("clipped", "degenerate"):
            flag = getattr(self, name)
            object.__setattr__(self, name, np.zeros(v.shape, bool) if flag is None else np.asarray(flag, bool))

    @classmethod
    def from_weights(cls, v, xtx=None, clipped=None, degenerate=None) -> "TlpWeights":
        v = np.atleast_1d(np.asarray(v, dtype=float))
        xtx = np.ones_like(v) if xtx is None else np.broadcast_to(np.asarray(xtx, dtype=float), v.shape)
        lam = implied_lambda(v, xtx)
        return cls(v, lam, clipped, degenerate)


def implied_lambda(v, xtx):
    """Invert ``v = X'X / (X'X + lambda)``; ``inf`` where ``v == 0``."""
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lam = np.where(v > 0, xtx * (1.0 - v) / np.where(v > 0, v, 1.0), np.inf)
    return np.where(v >= 1, 0.0, lam)


def tlp_risk(v, delta, T, triple: VarianceTriple):
    """Feasible risk of the combination ``v * LP + (1 - v) * VAR``."""
    v = np.asarray(v, dtype=float)
    w = 1.0 - v
    variance = v**2 * triple.sigma_lp + w**2 * triple.sigma_var + 2.0 * v * w * triple.sigma_cov
    return T * w**2 * np.asarray(delta, dtype=float) ** 2 + 2.0 * variance


def _closed_form(bias_sq, triple: VarianceTriple):
    num = bias_sq + 2.0 * (triple.sigma_var - triple.sigma_cov)
    den = bias_sq + 2.0 * (triple.sigma_lp + triple.sigma_var - 2.0 * triple.sigma_cov)
    degenerate = np.abs(den) < DENOMINATOR_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(degenerate, 1.0, num / np.where(degenerate, 1.0, den))
    v = np.clip(raw, 0.0, 1.0)
    clipped = (raw != v) & ~degenerate
    if np.any(degenerate):
        log.debug("degenerate TLP denominator at %d horizon(s); falling back to LP", int(degenerate.sum()))
    return v, clipped, degenerate


def optimal_weights(delta, T, triple: VarianceTriple, xtx=None) -> TlpWeights:
    """Risk-minimising weights for every horizon (vectorised closed form)."""
    bias_sq = T * np.asarray(delta, dtype=float) ** 2
    v, clipped, degenerate = _closed_form(bias_sq, triple)
    return TlpWeights.from_weights(v, xtx, clipped, degenerate)


def optimal_weight(delta: float, T: float, triple: VarianceTriple) -> float:
    return float(optimal_weights(delta, T, triple).v.reshape(-1)[0])


def limit_weight(abias: float, triple: VarianceTriple) -> float:
    """Probability limit of the optimal weight given the asymptotic VAR bias."""
    v, _, _ = _closed_form(np.asarray(abias, dtype=float) ** 2, triple)
    return float(np.asarray(v).reshape(-1)[0])


def tlp_combine(lp: IrfPath, var: IrfPath, weights: TlpWeights) -> IrfPath:
    if lp.target != var.target:
        raise ShapeMismatch("LP and VAR paths target different responses")
    v = np.broadcast_to(weights.v, lp.beta.shape) if weights.v.size == 1 else weights.v
    if v.shape != lp.beta.shape:
        raise ShapeMismatch("weights do not match the number of horizons")
    beta = v * lp.beta + (1.0 - v) * var.beta
    # exact endpoints regardless of rounding in the blend
    beta = np.where(v == 1.0, lp.beta, np.where(v == 0.0, var.beta, beta))
    return IrfPath(Method.TLP, lp.target, beta)


def tlp_variance(weights: TlpWeights, triple: VarianceTriple) -> np.ndarray:
    v = weights.v
    w = 1.0 - v
    return v**2 * triple.sigma_lp + w**2 * triple.sigma_var + 2.0 * v * w * triple.sigma_cov


def uniform_ma_weight(M: float) -> float:
    if M < 0:
        raise InvalidSpec("misspecification norm must be non-negative")
    return M**2 / (M**2 + 1.0)


# ---------------------------------------------------------------------------
# Smooth local projections

def slp_build_penalty(H: int):
    """Second-difference matrix ``L`` ((H-2) x H) and ``P = L'L``."""
    if H < 3:
        raise TooFewHorizons(f"second differences need at least 3 horizons, got {H}")
    L = np.zeros((H - 2, H))
    rows = np.arange(H - 2)
    L[rows, rows] = 1.0
    L[rows, rows + 1] = -2.0
    L[rows, rows + 2] = 1.0
    return L, L.T @ L


@dataclass(frozen=True)
class SlpFit:
    lambda_tilde: float
    beta: IrfPath
    penalty_order: int = 2


def slp_solve(xtx, xty, lambda_tilde: float, P: np.ndarray | None = None) -> np.ndarray:
    """Solve ``(diag(X'X) + lambda P) beta = X'Y``; batched over leading axes."""
    xtx = np.asarray(xtx, dtype=float)
    xty = np.asarray(xty, dtype=float)
    H = xtx.shape[-1]
    if lambda_tilde < 0:
        raise InvalidSpec("smoothing parameter must be non-negative")
    if lambda_tilde == 0.0:
        return xty / xtx
    if P is None:
        _, P = slp_build_penalty(H)
    M = lambda_tilde * P + xtx[..., :, None] * np.eye(H)
    try:
        beta = np.linalg.solve(M, xty[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("SLP normal equations are singular") from exc
    if not np.all(np.isfinite(beta)):
        raise SingularSystem("SLP normal equations are singular")
    return beta


def slp_hat(xtx, lambda_tilde: float, P: np.ndarray | None = None) -> np.ndarray:
    """``psi = (X'X + lambda P)^{-1} X'X`` with ``X'X`` diagonal."""
    xtx = np.asarray(xtx, dtype=float)
    H = xtx.shape[-1]
    if lambda_tilde == 0.0:
        return np.broadcast_to(np.eye(H), xtx.shape + (H,)).copy()
    if P is None:
        _, P = slp_build_penalty(H)
    M = lambda_tilde * P + xtx[..., :, None] * np.eye(H)
    return np.linalg.solve(M, xtx[..., :, None] * np.eye(H))


def slp_sandwich(xtx, lambda_tilde: float, omega_diag) -> np.ndarray:
    """``psi Omega psi'`` for diagonal ``Omega``: the SLP covariance implied by LP variances."""
    psi = slp_hat(xtx, lambda_tilde)
    omega_diag = np.asarray(omega_diag, dtype=float)
    return np.einsum("...ab,...b,...cb->...ac", psi, omega_diag, psi)


def default_lambda_grid(xtx, n: int = 50) -> np.ndarray:
    """Zero plus ``n`` log-spaced points spanning 1e-4..1e4 times ``tr(X'X)``."""
    trace = float(np.sum(xtx))
    return np.concatenate([[0.0], np.logspace(-4, 4, n) * trace])


def slp_ure(lp_beta, xtx, xty, sigma_diag, T, lambda_tilde: float) -> float:
    """Unbiased risk estimate with identity weighting and diagonal LP covariance."""
    beta = slp_solve(xtx, xty, lambda_tilde)
    psi = slp_hat(xtx, lambda_tilde)
    dist = T * float(np.sum((beta - lp_beta) ** 2))
    return dist + 2.0 * float(np.sum(np.diagonal(psi) * sigma_diag))


def slp_select_lambda(lp: IrfPath, xtx, xty, Sigma_lp_diag, T, grid=None) -> float:
    """Grid minimiser of the unbiased risk estimate.

    ``Sigma_lp_diag`` is on the ``sqrt(T)`` scale. Ties resolve to the
    smallest smoothing parameter.
    """
    grid = default_lambda_grid(xtx) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InvalidSpec("empty smoothing grid")
    sigma = np.asarray(Sigma_lp_diag, dtype=float)
    risks = np.array([slp_ure(lp.beta, xtx, xty, sigma, T, lam) for lam in grid])
    best = np.flatnonzero(risks == risks.min())
    return float(grid[best[np.argmin(grid[best])]])


def estimate_slp(panel, target, p: int, lambda_tilde: float) -> IrfPath:
    target.check(panel.k)
    if target.n_horizons < 3:
        raise TooFewHorizons("SLP needs h_max >= 2")
    _, xtx, xty = lp_moments(panel.values[None], target.i, target.j, p, target.h_max)
    beta = slp_solve(xtx[0], xty[0], lambda_tilde)
    return IrfPath(Method.SLP, target, beta)


def fit_slp(panel, target, p: int, Sigma_lp_diag, grid=None) -> SlpFit:
    """Select the smoothing parameter by URE and return the smoothed path."""
    target.check(panel.k)
    beta_lp, xtx, xty = lp_moments(panel.values[None], target.i, target.j, p, target.h_max)
    lp = IrfPath(Method.LP, target, beta_lp[0])
    lam = slp_select_lambda(lp, xtx[0], xty[0], Sigma_lp_diag, panel.T, grid)
    return SlpFit(lam, IrfPath(Method.SLP, target, slp_solve(xtx[0], xty[0], lam)))
