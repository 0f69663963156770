import numpy as np
import pytest

from oracles import grid_min_risk, stacked_ridge
from tlp.core import InvalidSpec, IrfPath, Method, RngStream, ShapeMismatch, ShockTarget, TooFewHorizons
from tlp.dgp import simulate, varma1_100
from tlp.estimators import build_projected, estimate_lp, lp_moments
from tlp.shrinkage import (
    TlpWeights,
    VarianceTriple,
    default_lambda_grid,
    estimate_slp,
    fit_slp,
    implied_lambda,
    limit_weight,
    optimal_weight,
    optimal_weights,
    slp_build_penalty,
    slp_hat,
    slp_sandwich,
    slp_select_lambda,
    slp_solve,
    slp_ure,
    tlp_combine,
    tlp_risk,
    tlp_variance,
    uniform_ma_weight,
)

T1 = ShockTarget(2, 1, 4)


def path(method, values, target=T1):
    return IrfPath(method, target, values)


def test_risk_examples():
    tri = VarianceTriple(4.0, 1.0, 1.0)
    assert tlp_risk(1.0, 0.3, 200, tri) == pytest.approx(8.0)
    assert tlp_risk(0.0, 0.3, 200, tri) == pytest.approx(200 * 0.09 + 2.0)
    assert tlp_risk(0.5, 0.1, 200, tri) == pytest.approx(4.0)


def test_weight_examples():
    assert optimal_weight(0.0, 200, VarianceTriple(3.0, 1.0, 1.0)) == 0.0
    assert optimal_weight(0.4, 200, VarianceTriple(2.0, 2.0, 2.0)) == 1.0
    v = optimal_weight(0.2, 200, VarianceTriple(6.0, 2.0, 2.0))
    assert v == pytest.approx(0.5)
    grid, risk = grid_min_risk(0.2, 200, 6.0, 2.0, 2.0)
    assert tlp_risk(v, 0.2, 200, VarianceTriple(6.0, 2.0, 2.0)) <= risk.min() + 1e-9


def test_weight_clipping_and_degenerate_flags():
    w = optimal_weights([0.0, 0.0], 100, VarianceTriple([4.0, 1.0], [1.0, 1.0], [1.5, 1.0]))
    # first horizon: cov above var pushes the closed form below zero
    assert w.v[0] == 0.0 and w.clipped[0]
    # second horizon: every entry equal, zero delta, zero denominator
    assert w.v[1] == 1.0 and w.degenerate[1] and not w.clipped[1]


def test_weights_type():
    w = TlpWeights.from_weights([0.0, 0.5, 1.0], xtx=[10.0, 10.0, 10.0])
    assert np.isinf(w.lambda_implied[0])
    assert w.lambda_implied[1] == pytest.approx(10.0)
    assert w.lambda_implied[2] == 0.0
    with pytest.raises(InvalidSpec):
        TlpWeights.from_weights([1.2])
    np.testing.assert_allclose(implied_lambda(0.25, 8.0), 24.0)


def test_triple_validation():
    with pytest.raises(InvalidSpec):
        VarianceTriple(1.0, 1.0, 1.5)
    with pytest.raises(InvalidSpec):
        VarianceTriple(0.0, 1.0, 0.0)
    with pytest.raises(ShapeMismatch):
        VarianceTriple([1.0, 2.0], [1.0], [0.0])


def test_combine_limits_and_arithmetic(rng):
    lp = path("LP", rng.normal(size=5))
    var = path("VAR", rng.normal(size=5))
    assert np.array_equal(tlp_combine(lp, var, TlpWeights.from_weights(np.ones(5))).beta, lp.beta)
    assert np.array_equal(tlp_combine(lp, var, TlpWeights.from_weights(np.zeros(5))).beta, var.beta)
    mixed = tlp_combine(path("LP", [2.0] * 5), path("VAR", [1.0] * 5), TlpWeights.from_weights(np.full(5, 0.25)))
    np.testing.assert_allclose(mixed.beta, 1.25)
    assert mixed.method is Method.TLP
    with pytest.raises(ShapeMismatch):
        tlp_combine(lp, path("VAR", np.zeros(4), ShockTarget(2, 1, 3)), TlpWeights.from_weights(np.ones(5)))


def test_tlp_variance_examples():
    tri = VarianceTriple(4.0, 1.0, 1.0)
    assert tlp_variance(TlpWeights.from_weights(1.0), tri)[0] == 4.0
    assert tlp_variance(TlpWeights.from_weights(0.0), tri)[0] == 1.0
    assert tlp_variance(TlpWeights.from_weights(0.5), tri)[0] == pytest.approx(1.75)


def test_limit_weight():
    assert limit_weight(0.0, VarianceTriple(3.0, 1.0, 1.0)) == 0.0
    assert limit_weight(1e8, VarianceTriple(3.0, 1.0, 0.5)) == pytest.approx(1.0, abs=1e-12)


def test_uniform_ma_weight():
    assert uniform_ma_weight(0.0) == 0.0
    assert uniform_ma_weight(1.0) == 0.5
    assert uniform_ma_weight(3.0) == pytest.approx(0.9)
    with pytest.raises(InvalidSpec):
        uniform_ma_weight(-1.0)


def test_penalty():
    L, P = slp_build_penalty(3)
    np.testing.assert_array_equal(L, [[1, -2, 1]])
    np.testing.assert_array_equal(P, [[1, -2, 1], [-2, 4, -2], [1, -2, 1]])
    L, P = slp_build_penalty(5)
    h = np.arange(5.0)
    np.testing.assert_allclose(L @ (3.0 - 0.7 * h), 0.0, atol=1e-14)
    np.testing.assert_array_equal(P, P.T)
    assert np.all(np.triu(P, 3) == 0) and np.all(P.sum(axis=1) == 0)
    with pytest.raises(TooFewHorizons):
        slp_build_penalty(2)


@pytest.fixture(scope="module")
def panel():
    return simulate(varma1_100(), 200, RngStream(31))


def test_slp_zero_penalty_is_lp(panel):
    t = ShockTarget(2, 1, 20)
    np.testing.assert_allclose(estimate_slp(panel, t, 10, 0.0).beta, estimate_lp(panel, t, 10).beta,
                               rtol=0, atol=1e-10)


def test_slp_huge_penalty_is_linear(panel):
    t = ShockTarget(2, 1, 20)
    beta = estimate_slp(panel, t, 10, 1e12).beta
    L, _ = slp_build_penalty(21)
    assert np.abs(L @ beta).max() < 1e-4 * np.abs(beta).max()


def test_slp_matches_stacked_ridge(panel):
    t = ShockTarget(2, 1, 20)
    prs = [build_projected(panel, t, h, 10) for h in range(21)]
    _, P = slp_build_penalty(21)
    for lam in (5.0, 300.0, 2e4):
        ref = stacked_ridge([pr.X for pr in prs], [pr.Yh for pr in prs], lam, P)
        np.testing.assert_allclose(estimate_slp(panel, t, 10, lam).beta, ref, rtol=1e-8, atol=1e-10)


def test_slp_sandwich_and_hat():
    xtx = np.array([10.0, 20.0, 30.0, 40.0])
    psi = slp_hat(xtx, 7.0)
    _, P = slp_build_penalty(4)
    np.testing.assert_allclose(psi, np.linalg.solve(np.diag(xtx) + 7.0 * P, np.diag(xtx)))
    omega = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(slp_sandwich(xtx, 7.0, omega), psi @ np.diag(omega) @ psi.T, rtol=1e-12)
    np.testing.assert_allclose(slp_sandwich(xtx, 0.0, omega), np.diag(omega))


def test_ure_selection(panel):
    t = ShockTarget(2, 1, 20)
    beta, xtx, xty = lp_moments(panel.values[None], 1, 0, 10, 20)
    lp = IrfPath("LP", t, beta[0])
    sigma = np.linspace(0.5, 5.0, 21)
    # grid {0}: zero distance, risk 2 tr(Sigma)
    assert slp_select_lambda(lp, xtx[0], xty[0], sigma, 200, [0.0]) == 0.0
    assert slp_ure(lp.beta, xtx[0], xty[0], sigma, 200, 0.0) == pytest.approx(2 * sigma.sum())
    # zero variance leaves nothing to gain from smoothing
    assert slp_select_lambda(lp, xtx[0], xty[0], np.zeros(21), 200) == 0.0
    grid = default_lambda_grid(xtx[0])
    lam = slp_select_lambda(lp, xtx[0], xty[0], sigma, 200, grid)
    risks = [slp_ure(lp.beta, xtx[0], xty[0], sigma, 200, g) for g in grid]
    assert lam in grid and slp_ure(lp.beta, xtx[0], xty[0], sigma, 200, lam) == min(risks)
    assert grid.size == 51 and grid[0] == 0.0
    assert grid[1] == pytest.approx(1e-4 * xtx[0].sum()) and grid[-1] == pytest.approx(1e4 * xtx[0].sum())
    fit = fit_slp(panel, t, 10, sigma, grid)
    assert fit.lambda_tilde == lam and fit.penalty_order == 2


def test_slp_solve_batches():
    xtx = np.array([[10.0, 12.0, 9.0], [5.0, 6.0, 7.0]])
    xty = np.array([[1.0, 2.0, 3.0], [3.0, 2.0, 1.0]])
    both = slp_solve(xtx, xty, 4.0)
    for r in range(2):
        np.testing.assert_allclose(both[r], slp_solve(xtx[r], xty[r], 4.0))
    with pytest.raises(InvalidSpec):
        slp_solve(xtx, xty, -1.0)
