"""Local projections with projected-out controls and recursive VAR responses.

Two routes compute the LP coefficient. :func:`build_projected` forms the
projected outcome and regressor explicitly through a QR factorisation of the
control matrix. The batched kernel :func:`lp_moments` instead solves the
partitioned normal equations of the full regression for every horizon at
once; by Frisch-Waugh-Lovell its first coefficient is the same number, and
``1 / [(Z'Z)^{-1}]_{00}`` is the projected ``X'X``. The bootstrap runs the
batched kernel on thousands of panels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DegenerateRegressor,
    IrfPath,
    Method,
    NotPositiveDefinite,
    SampleTooShort,
    ShockTarget,
    TimeSeriesPanel,
    unit_lower,
)


@dataclass(frozen=True)
class ProjectedRegression:
    Yh: np.ndarray
    X: np.ndarray
    XtX: float
    h: int
    p: int

    @property
    def beta(self) -> float:
        return float(self.X @ self.Yh / self.XtX)

    @property
    def XtY(self) -> float:
        return float(self.X @ self.Yh)


@dataclass(frozen=True)
class VarFit:
    """OLS VAR(q) with intercept.

    ``coefs[l]`` multiplies ``y_{t-l-1}``; ``A_hat`` is the companion matrix.
    ``initial`` keeps the first ``q`` observations of the fitted panel, which
    seed recursive bootstrap samples.
    """

    q: int
    coefs: np.ndarray
    intercept: np.ndarray
    Sigma_hat: np.ndarray
    Gamma_hat: np.ndarray
    residuals: np.ndarray
    initial: np.ndarray

    @property
    def k(self) -> int:
        return self.intercept.shape[0]

    @property
    def T(self) -> int:
        return self.residuals.shape[0] + self.q

    @property
    def A_hat(self) -> np.ndarray:
        return companion(self.coefs)


def companion(coefs: np.ndarray) -> np.ndarray:
    q, k, _ = coefs.shape
    top = np.concatenate(list(coefs), axis=1)
    if q == 1:
        return top
    lower = np.eye(k * (q - 1), k * q)
    return np.vstack([top, lower])


def _lag_stack(Y: np.ndarray, m: int, lags: int) -> np.ndarray:
    """Rows ``t = m..T-1`` of ``[y_{t-1}', ..., y_{t-lags}']`` for a batch ``(n, T, k)``."""
    T = Y.shape[1]
    if lags == 0:
        return Y[:, m:m, :].reshape(Y.shape[0], T - m, 0)
    return np.concatenate([Y[:, m - l:T - l, :] for l in range(1, lags + 1)], axis=2)


def _check_lp_sample(T: int, k: int, h: int, p: int) -> None:
    if T - h - p < k * p + 3:
        raise SampleTooShort(f"T={T} too short for LP with p={p} lags at horizon {h} (k={k})")


def build_projected(panel: TimeSeriesPanel, target: ShockTarget, h: int, p: int) -> ProjectedRegression:
    """Project the intercept and ``p`` lags of every variable out of outcome and shock.

    The controls hold no contemporaneous values, so the coefficient matches the
    recursively identified response only for a shock ordered first.
    """
    target.check(panel.k)
    T, k = panel.T, panel.k
    _check_lp_sample(T, k, h, p)
    Y = panel.values
    n_eff = T - h - p
    W = np.concatenate(
        [np.ones((n_eff, 1))] + [Y[p - l:T - h - l] for l in range(1, p + 1)], axis=1
    )
    Q, _ = np.linalg.qr(W)
    y_out = Y[p + h:T, target.i]
    x = Y[p:T - h, target.j]
    Yh = y_out - Q @ (Q.T @ y_out)
    X = x - Q @ (Q.T @ x)
    XtX = float(X @ X)
    if XtX <= 1e-12 * n_eff:
        raise DegenerateRegressor(f"projected shock regressor vanishes at horizon {h}")
    return ProjectedRegression(Yh=Yh, X=X, XtX=XtX, h=h, p=p)


def lp_moments(Y: np.ndarray, i: int, j: int, p: int, h_max: int):
    """Batched LP coefficients and projected moments.

    ``Y`` has shape ``(n, T, k)``; ``i`` and ``j`` are 0-based. Returns
    ``(beta, XtX, XtY)``, each ``(n, h_max + 1)``. Horizon ``h`` uses rows
    ``t = p..T-1-h``.
    """
    Y = np.asarray(Y, dtype=float)
    n, T, k = Y.shape
    _check_lp_sample(T, k, h_max, p)
    H = h_max + 1
    # centring is absorbed by the intercept and improves conditioning
    Yc = Y - Y.mean(axis=1, keepdims=True)
    N0 = T - p
    Z = np.concatenate(
        [Yc[:, p:, j:j + 1], np.ones((n, N0, 1)), _lag_stack(Yc, p, p)], axis=2
    )
    Zt = Z.transpose(0, 2, 1)
    t_idx = np.arange(N0)[:, None]
    h_idx = np.arange(H)[None, :]
    src = p + t_idx + h_idx
    Ysh = np.where(src < T, Yc[:, np.minimum(src, T - 1), i], 0.0)
    c = (Zt @ Ysh).transpose(0, 2, 1)

    # horizon h drops row N0 - h from the sample of horizon h - 1; track the
    # inverse Gram matrix through rank-one downdates
    Ginv = np.linalg.inv(Zt @ Z)
    beta = np.empty((n, H))
    inv00 = np.empty((n, H))
    beta[:, 0] = np.einsum("nd,nd->n", Ginv[:, 0, :], c[:, 0])
    inv00[:, 0] = Ginv[:, 0, 0]
    for h in range(1, H):
        z = Z[:, N0 - h, :]
        u = (Ginv @ z[:, :, None])[:, :, 0]
        denom = 1.0 - np.einsum("nd,nd->n", z, u)
        Ginv += u[:, :, None] * (u / denom[:, None])[:, None, :]
        beta[:, h] = np.einsum("nd,nd->n", Ginv[:, 0, :], c[:, h])
        inv00[:, h] = Ginv[:, 0, 0]
    XtX = 1.0 / inv00
    n_eff = (T - p - np.arange(H)).astype(float)
    if np.any(~np.isfinite(XtX)) or np.any(XtX <= 1e-12 * n_eff):
        raise DegenerateRegressor("projected shock regressor vanishes")
    return beta, XtX, beta * XtX


def estimate_lp(panel: TimeSeriesPanel, target: ShockTarget, p: int) -> IrfPath:
    target.check(panel.k)
    beta, _, _ = lp_moments(panel.values[None], target.i, target.j, p, target.h_max)
    return IrfPath(Method.LP, target, beta[0])


def var_fit_batch(Y: np.ndarray, q: int):
    """Batched OLS VAR(q) with intercept.

    Returns ``(coefs, intercept, Sigma, Gamma, resid)`` with shapes
    ``(n, q, k, k)``, ``(n, k)``, ``(n, k, k)``, ``(n, k, k)``, ``(n, T-q, k)``.
    ``Sigma`` divides by ``T - q``; ``Gamma`` is the unit-diagonal Cholesky factor.
    """
    Y = np.asarray(Y, dtype=float)
    n, T, k = Y.shape
    if q < 1:
        raise SampleTooShort("VAR needs at least one lag")
    if T - q < k * q + 3:
        raise SampleTooShort(f"T={T} too short for a VAR({q}) in k={k} variables")
    mu = Y.mean(axis=1, keepdims=True)
    Yc = Y - mu
    X = np.concatenate([np.ones((n, T - q, 1)), _lag_stack(Yc, q, q)], axis=2)
    target = Yc[:, q:, :]
    Xt = X.transpose(0, 2, 1)
    XtX = Xt @ X
    Xty = Xt @ target
    B = np.linalg.solve(XtX, Xty)
    resid = target - X @ B
    coefs = B[:, 1:, :].reshape(n, q, k, k).transpose(0, 1, 3, 2)
    # undo the centring: c = (I - sum_l A_l) mu + b0
    intercept = B[:, 0, :] + mu[:, 0, :] - np.einsum("nlab,nb->na", coefs, mu[:, 0, :])
    Sigma = resid.transpose(0, 2, 1) @ resid / (T - q)
    Sigma = 0.5 * (Sigma + Sigma.transpose(0, 2, 1))
    try:
        C = np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("VAR residual covariance is not positive definite") from exc
    diag = np.diagonal(C, axis1=1, axis2=2)
    if np.any(diag <= 1e-6 * np.sqrt(np.diagonal(Sigma, axis1=1, axis2=2).max(axis=1, keepdims=True))):
        raise NotPositiveDefinite("VAR residual covariance is numerically singular")
    return coefs, intercept, Sigma, unit_lower(C), resid


def fit_var(panel: TimeSeriesPanel, q: int) -> VarFit:
    coefs, intercept, Sigma, Gamma, resid = var_fit_batch(panel.values[None], q)
    return VarFit(
        q=q,
        coefs=coefs[0],
        intercept=intercept[0],
        Sigma_hat=Sigma[0],
        Gamma_hat=Gamma[0],
        residuals=resid[0],
        initial=panel.values[:q].copy(),
    )


def var_irf_batch(coefs: np.ndarray, Gamma: np.ndarray, i: int, j: int, h_max: int) -> np.ndarray:
    """Responses of variable ``i`` to shock ``j`` by iterating the VAR recursion.

    Equivalent to ``J_i' A^h Embed(Gamma) J_j`` for the companion matrix ``A``,
    without forming matrix powers.
    """
    n, q, k, _ = coefs.shape
    hist = np.zeros((n, q, k))
    hist[:, 0, :] = Gamma[:, :, j]
    out = np.empty((n, h_max + 1))
    out[:, 0] = hist[:, 0, i]
    for h in range(1, h_max + 1):
        new = np.einsum("nlab,nlb->na", coefs, hist)
        hist = np.concatenate([new[:, None, :], hist[:, :-1, :]], axis=1)
        out[:, h] = new[:, i]
    return out


def var_irf(fit: VarFit, target: ShockTarget) -> IrfPath:
    target.check(fit.k)
    beta = var_irf_batch(fit.coefs[None], fit.Gamma_hat[None], target.i, target.j, target.h_max)
    return IrfPath(Method.VAR, target, beta[0])


def estimate_var(panel: TimeSeriesPanel, target: ShockTarget, q: int) -> IrfPath:
    return var_irf(fit_var(panel, q), target)
