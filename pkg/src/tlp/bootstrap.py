"""Mean symmetric double bootstrap (MSDB) for LP, VAR, SLP and TLP responses.

First-level samples are rebuilt recursively from the VAR(q) fit of the data
with moving-block resampled residuals; the original sample is replication
``b1 = 0`` here (the first one). Every first-level sample is itself refit and
resampled ``B2`` times to estimate the variance of each estimator and the
LP/VAR covariance. Bootstrap t-statistics are studentised with those
variances, centred at the bootstrap mean, and turned into symmetric bands.

Random streams are keyed as ``(1, b1, attempt)`` for first-level draws and
``(2, b1, b2, attempt)`` for second-level draws under the caller's stream.
Variances stored in the ensemble are variances of the estimates themselves
(not multiplied by ``T``).
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ExplosiveFit,
    InvalidBlockLength,
    InvalidSpec,
    IrfPath,
    Method,
    ReplicationFailure,
    RngStream,
    ShockTarget,
    TimeSeriesPanel,
    TlpError,
    TooFewReplications,
    ZeroVariance,
)
from .estimators import VarFit, fit_var, lp_moments, var_fit_batch, var_irf_batch
from .shrinkage import (
    VarianceTriple,
    default_lambda_grid,
    optimal_weights,
    slp_sandwich,
    slp_select_lambda,
    slp_solve,
)

log = logging.getLogger(__name__)

EXPLOSION_BOUND = 1e12
ZERO_VARIANCE = 1e-14


class Centering(str, enum.Enum):
    BOOTSTRAP_MEAN = "bootstrap-mean"
    PSEUDO_TRUTH = "pseudo-truth"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BootstrapConfig:
    B1: int = 200
    B2: int = 100
    alpha: float = 0.10
    centering: Centering = Centering.BOOTSTRAP_MEAN
    p: int = 10
    q: int = 8
    master_seed: int = 0
    block_length: int | None = None
    per_b1_weights: bool = False
    min_valid_t: int = 20
    max_retries: int = 5
    lambda_grid_size: int = 50
    chunk: int = 8

    def __post_init__(self):
        object.__setattr__(self, "centering", Centering(self.centering))
        if self.B1 < 2 or self.B2 < 2:
            raise InvalidSpec("B1 and B2 must both be at least 2")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidSpec("alpha must lie in (0, 1)")
        if self.p < 0 or self.q < 1:
            raise InvalidSpec("need p >= 0 LP lags and q >= 1 VAR lags")
        if self.block_length is not None and self.block_length < 1:
            raise InvalidSpec("block_length must be positive")
        if self.max_retries < 0 or self.chunk < 1 or self.min_valid_t < 1:
            raise InvalidSpec("max_retries, chunk and min_valid_t must be positive")

    def block_length_for(self, T: int) -> int:
        ell = self.block_length if self.block_length is not None else math.ceil(T ** (1.0 / 3.0) - 1e-9)
        if not 1 <= ell <= T:
            raise InvalidBlockLength(f"block length {ell} outside [1, {T}]")
        return ell


# ---------------------------------------------------------------------------
# Resampling primitives

def _slot_means(residuals: np.ndarray, ell: int) -> np.ndarray:
    """Mean of the residuals that can occupy each within-block position."""
    T_r = residuals.shape[-2]
    n_starts = T_r - ell + 1
    csum = np.concatenate(
        [np.zeros(residuals.shape[:-2] + (1, residuals.shape[-1])), np.cumsum(residuals, axis=-2)], axis=-2
    )
    s = np.arange(ell)
    return (csum[..., s + n_starts, :] - csum[..., s, :]) / n_starts


def _mbb_index(gen: np.random.Generator, T_r: int, ell: int) -> np.ndarray:
    n_blocks = -(-T_r // ell)
    starts = gen.integers(0, T_r - ell + 1, size=n_blocks)
    return (starts[:, None] + np.arange(ell)[None, :]).reshape(-1)[:T_r]


def block_resample_residuals(residuals, block_length: int, rng: RngStream, center: bool = True) -> np.ndarray:
    """Moving-block resample of residual rows with position-wise recentring."""
    residuals = np.asarray(residuals, dtype=float)
    T_r = residuals.shape[0]
    if not 1 <= block_length <= T_r:
        raise InvalidBlockLength(f"block length {block_length} outside [1, {T_r}]")
    idx = _mbb_index(rng.generator(), T_r, block_length)
    out = residuals[idx]
    if center:
        pos = np.arange(T_r) % block_length
        out = out - _slot_means(residuals, block_length)[pos]
    return out


def _rebuild_batch(coefs, intercept, initial, U):
    """Run the fitted recursion over a batch; returns panels and an ok mask."""
    n, q, k, _ = coefs.shape
    T = U.shape[1] + q
    Y = np.empty((n, T, k))
    Y[:, :q] = initial
    # stacked [A_q ... A_1] against the window y_{t-q..t-1}
    stacked = coefs[:, ::-1].transpose(0, 1, 3, 2).reshape(n, q * k, k)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(q, T):
            window = Y[:, t - q:t, :].reshape(n, 1, q * k)
            Y[:, t] = (window @ stacked)[:, 0] + intercept + U[:, t - q]
    ok = np.all(np.isfinite(Y), axis=(1, 2)) & (np.abs(np.nan_to_num(Y, nan=np.inf)).max(axis=(1, 2)) <= EXPLOSION_BOUND)
    return Y, ok


def rebuild_recursive(fit: VarFit, resampled_u) -> TimeSeriesPanel:
    """Recursive bootstrap sample from the fitted intercept and lag matrices."""
    U = np.asarray(resampled_u, dtype=float)
    if U.shape != (fit.T - fit.q, fit.k):
        raise InvalidSpec(f"resampled residuals must be {(fit.T - fit.q, fit.k)}, got {U.shape}")
    Y, ok = _rebuild_batch(fit.coefs[None], fit.intercept[None], fit.initial[None], U[None])
    if not ok[0]:
        raise ExplosiveFit("bootstrap path exceeded the explosion bound")
    return TimeSeriesPanel(Y[0])


# ---------------------------------------------------------------------------
# Batched estimation with per-panel failure handling

def _estimate(Y, target: ShockTarget, p: int, q: int, need_fit: bool):
    """LP moments and VAR responses for a batch; failed panels are flagged."""
    i, j, h_max = target.i, target.j, target.h_max
    try:
        lp_beta, xtx, xty = lp_moments(Y, i, j, p, h_max)
        coefs, intercept, _, gamma, resid = var_fit_batch(Y, q)
        var_beta = var_irf_batch(coefs, gamma, i, j, h_max)
        ok = np.all(np.isfinite(lp_beta), axis=1) & np.all(np.isfinite(var_beta), axis=1)
        out = dict(lp=lp_beta, xtx=xtx, xty=xty, var=var_beta)
        if need_fit:
            out.update(coefs=coefs, intercept=intercept, resid=resid)
        return out, ok
    except (TlpError, np.linalg.LinAlgError):
        if Y.shape[0] == 1:
            return None, np.zeros(1, bool)
    parts = [_estimate(Y[m:m + 1], target, p, q, need_fit) for m in range(Y.shape[0])]
    ok = np.array([bool(o[0]) for _, o in parts])
    template = next((res for res, o in parts if o[0]), None)
    if template is None:
        return None, ok
    out = {}
    for key, val in template.items():
        arr = np.full((Y.shape[0],) + val.shape[1:], np.nan)
        for m, (res, o) in enumerate(parts):
            if o[0]:
                arr[m] = res[key][0]
        out[key] = arr
    return out, ok


def _draw_batch(streams, resid, coefs, intercept, initial, ell, center=True):
    """Resample residuals and rebuild one panel per stream."""
    n = len(streams)
    T_r = resid.shape[-2]
    idx = np.stack([_mbb_index(s.generator(), T_r, ell) for s in streams])
    rows = np.arange(n)[:, None] if resid.ndim == 3 else None
    U = resid[rows, idx] if rows is not None else resid[idx]
    if center:
        pos = np.arange(T_r) % ell
        U = U - _slot_means(resid, ell)[..., pos, :]
    return _rebuild_batch(coefs, intercept, initial, U)


# ---------------------------------------------------------------------------
# Ensemble and intervals

@dataclass(frozen=True)
class BootstrapEnsemble:
    """First-level draws, second-level variances and derived bands.

    Arrays indexed ``[b1, h]`` put the original sample at ``b1 = 0``.
    ``sigma_first`` holds variances of the estimates; ``tlp_weights_first``
    holds the weight on LP used for each replication.
    """

    target: ShockTarget
    config: BootstrapConfig
    T: int
    methods: tuple
    beta_first: dict
    sigma_first: dict
    cov_first: np.ndarray
    tlp_weights_first: np.ndarray
    lambda_tilde: float
    pseudo_truth: np.ndarray
    bar_beta: dict
    tcrit: dict
    bands: dict
    redraws: int = 0
    flags: dict = field(default_factory=dict)

    def point(self, method) -> np.ndarray:
        return self.beta_first[Method(method)][0]

    def irf(self, method) -> IrfPath:
        return IrfPath(Method(method), self.target, self.point(method))

    def t_values(self, method, centering=None) -> np.ndarray:
        centering = self.config.centering if centering is None else centering
        return t_statistics(self, method, centering)

    def bands_for(self, centering) -> dict:
        return {m: _bands(self, m, Centering(centering)) for m in self.methods}

    def lengths(self, method) -> np.ndarray:
        b = self.bands[Method(method)]
        return b[:, 1] - b[:, 0]


def t_statistics(ensemble: BootstrapEnsemble, method, centering=Centering.BOOTSTRAP_MEAN) -> np.ndarray:
    """Studentised first-level statistics ``[b1, h]``; NaN where the variance vanishes."""
    method = Method(method)
    beta = ensemble.beta_first[method]
    sigma = ensemble.sigma_first[method]
    centre = ensemble.bar_beta[method] if Centering(centering) is Centering.BOOTSTRAP_MEAN else ensemble.pseudo_truth
    return studentize(beta, sigma, centre)


def studentize(beta, sigma, centre) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    valid = sigma >= ZERO_VARIANCE
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (beta - centre) / np.sqrt(np.where(valid, sigma, 1.0))
    return np.where(valid, t, np.nan)


def symmetric_critical_value(t_values, alpha: float, min_valid: int = 20) -> float:
    t = np.asarray(t_values, dtype=float)
    t = np.abs(t[np.isfinite(t)])
    if t.size < min_valid:
        raise TooFewReplications(f"{t.size} valid t-statistics, need {min_valid}")
    return float(np.quantile(t, 1.0 - alpha))


def symmetric_interval(point: float, t_values, sigma_1: float, alpha: float, min_valid: int = 20):
    """``point +/- q_{1-alpha}(|t|) * sqrt(sigma_1)``."""
    if not sigma_1 >= ZERO_VARIANCE:
        raise ZeroVariance("original-sample variance vanishes")
    half = symmetric_critical_value(t_values, alpha, min_valid) * math.sqrt(sigma_1)
    return point - half, point + half


def _bands(ens: BootstrapEnsemble, method: Method, centering: Centering) -> np.ndarray:
    """Symmetric bands; pseudo-truth centring relocates them by the bootstrap bias.

    The critical value always comes from the mean-centred statistics, so the
    two centring rules yield bands of identical length that differ only in
    location: under pseudo-truth centring the band sits at
    ``point - (bar_beta - pseudo_truth)``.
    """
    point = ens.point(method)
    sigma_1 = ens.sigma_first[method][0]
    tcrit = ens.tcrit[method]
    shift = 0.0 if centering is Centering.BOOTSTRAP_MEAN else ens.bar_beta[method] - ens.pseudo_truth
    centre = point - shift
    half = tcrit * np.sqrt(np.where(sigma_1 >= ZERO_VARIANCE, sigma_1, np.where(tcrit == 0.0, 0.0, np.nan)))
    return np.stack([centre - half, centre + half], axis=1)


# ---------------------------------------------------------------------------
# The double bootstrap

def _second_level(Ys, fits, streams_for, target, cfg, ell):
    """Variances and LP/VAR covariance from B2 redraws of each first-level fit."""
    n1 = len(Ys)
    B2 = cfg.B2
    coefs = np.repeat(fits["coefs"], B2, axis=0)
    intercept = np.repeat(fits["intercept"], B2, axis=0)
    initial = np.repeat(np.stack([Y[: cfg.q] for Y in Ys]), B2, axis=0)
    resid = np.repeat(fits["resid"], B2, axis=0)
    streams = [streams_for(a, b2, 0) for a in range(n1) for b2 in range(B2)]
    Y2, ok = _draw_batch(streams, resid, coefs, intercept, initial, ell)
    est, ok_est = _estimate(np.where(ok[:, None, None], Y2, 0.0), target, cfg.p, cfg.q, need_fit=False)
    lp = est["lp"] if est is not None else np.full((len(streams), target.n_horizons), np.nan)
    var = est["var"] if est is not None else np.full_like(lp, np.nan)
    ok &= ok_est
    redraws = 0
    for m in np.flatnonzero(~ok):
        a, b2 = divmod(int(m), B2)
        for attempt in range(1, cfg.max_retries + 1):
            redraws += 1
            Yr, okr = _draw_batch([streams_for(a, b2, attempt)], resid[m:m + 1], coefs[m:m + 1],
                                  intercept[m:m + 1], initial[m:m + 1], ell)
            if okr[0]:
                er, oke = _estimate(Yr, target, cfg.p, cfg.q, need_fit=False)
                if oke[0]:
                    lp[m], var[m] = er["lp"][0], er["var"][0]
                    break
        else:
            raise ReplicationFailure(f"second-level draw {b2} of replication {a} failed {cfg.max_retries} redraws")
    H = target.n_horizons
    lp = lp.reshape(n1, B2, H)
    var = var.reshape(n1, B2, H)
    s_lp = lp.var(axis=1, ddof=1)
    s_var = var.var(axis=1, ddof=1)
    s_cov = ((lp - lp.mean(axis=1, keepdims=True)) * (var - var.mean(axis=1, keepdims=True))).sum(axis=1) / (B2 - 1)
    return s_lp, s_var, s_cov, redraws


def run_msdb(panel: TimeSeriesPanel, target: ShockTarget, config: BootstrapConfig,
             rng: RngStream | None = None) -> BootstrapEnsemble:
    """Run the double bootstrap on ``panel`` for the response in ``target``."""
    cfg = config
    target.check(panel.k)
    rng = RngStream(cfg.master_seed) if rng is None else rng
    T, H = panel.T, target.n_horizons
    ell = cfg.block_length_for(T)
    if ell > T - cfg.q:
        raise InvalidBlockLength(f"block length {ell} exceeds the {T - cfg.q} VAR residuals")

    Y0 = panel.values[None]
    est0, ok0 = _estimate(Y0, target, cfg.p, cfg.q, need_fit=True)
    if not ok0[0]:
        # surface the underlying error on the original sample
        fit_var(panel, cfg.q)
        lp_moments(Y0, target.i, target.j, cfg.p, target.h_max)
        raise ReplicationFailure("estimation failed on the original sample")
    fit0 = {key: est0[key] for key in ("coefs", "intercept", "resid")}

    # first level: b1 = 0 is the data, b1 >= 1 are recursive MBB samples
    first = {key: np.empty((cfg.B1,) + est0[key].shape[1:]) for key in est0}
    for key in est0:
        first[key][0] = est0[key][0]
    panels = np.empty((cfg.B1, T, panel.k))
    panels[0] = panel.values
    redraws = 0
    pending = list(range(1, cfg.B1))
    attempt = {b1: 0 for b1 in pending}
    while pending:
        streams = [rng.child(1, b1, attempt[b1]) for b1 in pending]
        n = len(pending)
        Yb, ok = _draw_batch(streams, fit0["resid"][0], np.repeat(fit0["coefs"], n, axis=0),
                             np.repeat(fit0["intercept"], n, axis=0), np.repeat(Y0[:, : cfg.q], n, axis=0), ell)
        est, ok_est = _estimate(np.where(ok[:, None, None], Yb, 0.0), target, cfg.p, cfg.q, need_fit=True)
        ok &= ok_est
        retry = []
        for m, b1 in enumerate(pending):
            if ok[m]:
                panels[b1] = Yb[m]
                for key in first:
                    first[key][b1] = est[key][m]
            else:
                attempt[b1] += 1
                redraws += 1
                if attempt[b1] > cfg.max_retries:
                    raise ReplicationFailure(f"first-level replication {b1} failed {cfg.max_retries} redraws")
                retry.append(b1)
        pending = retry

    s_lp = np.empty((cfg.B1, H))
    s_var = np.empty((cfg.B1, H))
    s_cov = np.empty((cfg.B1, H))
    for start in range(0, cfg.B1, cfg.chunk):
        block = list(range(start, min(start + cfg.chunk, cfg.B1)))
        fits = {key: first[key][block] for key in ("coefs", "intercept", "resid")}
        a_lp, a_var, a_cov, nr = _second_level(
            [panels[b1] for b1 in block], fits,
            lambda a, b2, att, block=block: rng.child(2, block[a], b2, att),
            target, cfg, ell,
        )
        s_lp[block], s_var[block], s_cov[block] = a_lp, a_var, a_cov
        redraws += nr

    beta = {Method.LP: first["lp"], Method.VAR: first["var"]}
    sigma = {Method.LP: s_lp, Method.VAR: s_var}
    flags = {}

    # SLP: smoothing parameter chosen once on the data, variance by sandwich
    lam = float("nan")
    if H >= 3:
        lp0 = IrfPath(Method.LP, target, first["lp"][0])
        grid = default_lambda_grid(first["xtx"][0], cfg.lambda_grid_size)
        lam = slp_select_lambda(lp0, first["xtx"][0], first["xty"][0], T * s_lp[0], T, grid)
        beta[Method.SLP] = slp_solve(first["xtx"], first["xty"], lam)
        cov_slp = slp_sandwich(first["xtx"], lam, s_lp)
        sigma[Method.SLP] = np.diagonal(cov_slp, axis1=-2, axis2=-1).copy()

    # TLP: weights from the across-replication average triple, per-b1 variance
    delta = first["lp"] - first["var"]
    if cfg.per_b1_weights:
        triple = _safe_triple(T * s_lp, T * s_var, T * s_cov)
    else:
        triple = _safe_triple(T * s_lp.mean(axis=0), T * s_var.mean(axis=0), T * s_cov.mean(axis=0))
    weights = optimal_weights(delta, T, triple)
    v = weights.v
    flags["tlp_clipped"] = weights.clipped
    flags["tlp_degenerate"] = weights.degenerate
    beta[Method.TLP] = v * first["lp"] + (1.0 - v) * first["var"]
    sigma[Method.TLP] = v**2 * s_lp + (1.0 - v) ** 2 * s_var + 2.0 * v * (1.0 - v) * s_cov

    methods = tuple(m for m in (Method.LP, Method.VAR, Method.SLP, Method.TLP) if m in beta)
    bar = {m: beta[m].mean(axis=0) for m in methods}
    min_valid = min(cfg.min_valid_t, cfg.B1)
    if cfg.B1 < cfg.min_valid_t:
        log.warning("B1=%d is below %d; critical values rest on very few draws", cfg.B1, cfg.min_valid_t)
    tcrit = {}
    for m in methods:
        t = studentize(beta[m], sigma[m], bar[m])
        # a horizon where the estimator never varies (e.g. a unit impact) gets a zero-width band
        constant = np.all(sigma[m] < ZERO_VARIANCE, axis=0)
        flags[f"{m.value.lower()}_zero_variance"] = constant
        tcrit[m] = np.array([
            0.0 if constant[h] else symmetric_critical_value(t[:, h], cfg.alpha, min_valid) for h in range(H)
        ])

    ens = BootstrapEnsemble(
        target=target,
        config=cfg,
        T=T,
        methods=methods,
        beta_first=beta,
        sigma_first=sigma,
        cov_first=s_cov,
        tlp_weights_first=v,
        lambda_tilde=lam,
        pseudo_truth=first["var"][0].copy(),
        bar_beta=bar,
        tcrit=tcrit,
        bands={},
        redraws=redraws,
        flags=flags,
    )
    ens.bands.update(ens.bands_for(cfg.centering))
    return ens


def _safe_triple(lp, var, cov) -> VarianceTriple:
    tiny = np.finfo(float).tiny
    lp = np.maximum(lp, tiny)
    var = np.maximum(var, tiny)
    bound = np.sqrt(lp * var)
    return VarianceTriple(lp, var, np.clip(cov, -bound, bound))
