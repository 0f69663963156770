"""Local-to-VARMA data generating processes and their ground-truth responses.

The process is ``y_t = A y_{t-1} + Gamma (eps_t + eta * sum_l alpha_l eps_{t-l})``
with ``eta = mis_scale * T**mis_power``. Shocks are i.i.d. standard normal or
independent GARCH(1,1) per component.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import (
    InvalidSpec,
    IrfPath,
    Method,
    RngStream,
    ShockTarget,
    TimeSeriesPanel,
    lyapunov_solve,
    selector,
    spectral_radius,
)


class InnovationLaw(str, enum.Enum):
    GAUSSIAN_IID = "gaussian"
    GARCH11 = "garch11"


@dataclass(frozen=True)
class GarchParams:
    omega: float
    alpha: float
    beta: float

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)


@dataclass(frozen=True)
class DgpSpec:
    A: np.ndarray
    Gamma: np.ndarray
    ma_coeffs: tuple = ()
    mis_scale: float = 0.0
    mis_power: float = 0.0
    innovation_law: InnovationLaw = InnovationLaw.GAUSSIAN_IID
    garch_params: GarchParams | None = None
    burn_in: int = 500
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        G = np.atleast_2d(np.array(self.Gamma, dtype=float))
        k = A.shape[0]
        if A.shape != (k, k) or G.shape != (k, k):
            raise InvalidSpec("A and Gamma must be k x k")
        ma = tuple(np.atleast_2d(np.array(m, dtype=float)) for m in self.ma_coeffs)
        if any(m.shape != (k, k) for m in ma):
            raise InvalidSpec("every MA coefficient must be k x k")
        for arr in (A, G, *ma):
            if not np.all(np.isfinite(arr)):
                raise InvalidSpec("DGP matrices must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Gamma", G)
        object.__setattr__(self, "ma_coeffs", ma)
        object.__setattr__(self, "innovation_law", InnovationLaw(self.innovation_law))
        self.validate()

    def validate(self) -> None:
        if spectral_radius(self.A) >= 1.0:
            raise InvalidSpec("spectral radius of A must be below 1")
        if np.any(np.triu(self.Gamma, 1) != 0.0):
            raise InvalidSpec("Gamma must be lower triangular")
        if np.any(np.diag(self.Gamma) != 1.0):
            raise InvalidSpec("Gamma diagonal must be 1")
        if self.mis_scale < 0:
            raise InvalidSpec("mis_scale must be non-negative")
        if self.burn_in < 1:
            raise InvalidSpec("burn_in must be positive")
        if self.innovation_law is InnovationLaw.GARCH11:
            g = self.garch_params
            if g is None:
                raise InvalidSpec("GARCH innovations need garch_params")
            if not g.omega > 0:
                raise InvalidSpec("GARCH omega must be positive")
            if g.alpha < 0 or g.beta < 0:
                raise InvalidSpec("GARCH alpha and beta must be non-negative")
            if not g.alpha + g.beta < 1:
                raise InvalidSpec("GARCH alpha + beta must be below 1 (finite unconditional variance)")
        elif self.garch_params is not None:
            raise InvalidSpec("garch_params given for Gaussian innovations")

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def n_ma(self) -> int:
        return len(self.ma_coeffs)

    def eta(self, T: int) -> float:
        """Misspecification scale at sample size ``T``."""
        return float(self.mis_scale * float(T) ** self.mis_power)

    def shock_variances(self) -> np.ndarray:
        if self.innovation_law is InnovationLaw.GARCH11:
            return np.full(self.k, self.garch_params.unconditional_variance)
        return np.ones(self.k)


def _draw_shocks(spec: DgpSpec, n: int, gen: np.random.Generator) -> np.ndarray:
    z = gen.standard_normal((n, spec.k))
    if spec.innovation_law is InnovationLaw.GAUSSIAN_IID:
        return z
    g = spec.garch_params
    eps = np.empty_like(z)
    # start at the unconditional variance to skip the initial transient
    sigma2 = np.full(spec.k, g.unconditional_variance)
    for t in range(n):
        eps[t] = np.sqrt(sigma2) * z[t]
        sigma2 = g.omega + g.alpha * eps[t] ** 2 + g.beta * sigma2
    return eps


def simulate(spec: DgpSpec, T: int, rng: RngStream) -> TimeSeriesPanel:
    """Draw a ``T x k`` panel; the first ``burn_in`` simulated periods are dropped."""
    if T < 1:
        raise InvalidSpec("T must be positive")
    spec.validate()
    L = spec.n_ma
    n = spec.burn_in + T
    eps = _draw_shocks(spec, n + L, rng.generator())
    shocks = eps[L:].copy()
    eta = spec.eta(T)
    if L and eta != 0.0:
        # row t of eps[L - l : L - l + n] is eps_{t-l}
        for l, alpha in enumerate(spec.ma_coeffs, start=1):
            shocks += eta * eps[L - l:L - l + n] @ alpha.T
    u = shocks @ spec.Gamma.T
    y = np.empty((n, spec.k))
    prev = np.zeros(spec.k)
    A_T = spec.A.T
    for t in range(n):
        prev = prev @ A_T + u[t]
        y[t] = prev
    return TimeSeriesPanel(y[spec.burn_in:])


def true_irf(spec: DgpSpec, target: ShockTarget, T: int) -> IrfPath:
    """Population response of ``y_i`` to a unit shock ``j`` at the scale implied by ``T``."""
    target.check(spec.k)
    eta = spec.eta(T)
    A, G = spec.A, spec.Gamma
    powers = [np.eye(spec.k)]
    for _ in range(target.h_max):
        powers.append(powers[-1] @ A)
    ei, ej = selector(spec.k, target.i), selector(spec.k, target.j)
    beta = np.empty(target.n_horizons)
    for h in range(target.n_horizons):
        M = powers[h] @ G
        for l in range(1, min(h, spec.n_ma) + 1):
            M = M + eta * powers[h - l] @ G @ spec.ma_coeffs[l - 1]
        beta[h] = ei @ M @ ej
    return IrfPath(Method.VAR, target, beta)


def theoretical_abias(spec: DgpSpec, target: ShockTarget) -> np.ndarray:
    """First-order asymptotic bias of the recursive VAR(1) response, per horizon.

    Returned for the unscaled MA polynomial: the finite-sample bias is
    approximately ``eta * abias``. Shock variances enter through ``D``
    (identity for Gaussian shocks, the unconditional GARCH variance otherwise).
    """
    target.check(spec.k)
    k = spec.k
    A, G = spec.A, spec.Gamma
    D = np.diag(spec.shock_variances())
    S = lyapunov_solve(A, G @ D @ G.T)
    S_inv = np.linalg.inv(S)
    ei, ej = selector(k, target.i), selector(k, target.j)
    Gj = G[:, target.j]

    powers = [np.eye(k)]
    for _ in range(max(target.h_max, spec.n_ma)):
        powers.append(powers[-1] @ A)

    # sum_l alpha_l D Gamma' (A')^{l-1}
    tail = np.zeros((k, k))
    for l, alpha in enumerate(spec.ma_coeffs, start=1):
        tail += alpha @ D @ G.T @ powers[l - 1].T
    tail = G @ tail

    out = np.zeros(target.n_horizons)
    for h in range(1, target.n_horizons):
        psi = np.zeros((k, k))
        direct = 0.0
        for l in range(1, h + 1):
            psi += np.outer(powers[h - l] @ Gj, ei @ powers[l - 1])
            if l <= spec.n_ma:
                direct += ei @ powers[h - l] @ G @ spec.ma_coeffs[l - 1] @ ej
        out[h] = np.trace(S_inv @ psi @ tail) - direct
    return out


# ---------------------------------------------------------------------------
# Designs used in the simulation study

VARMA11_A = np.array([[0.7, 0.1], [0.4, 0.6]])
# Gamma is the inverse of the lower-triangular impact inverse reported for each design
VARMA11_GAMMA = np.array([[1.0, 0.0], [-0.5, 1.0]])
VARMA1100_A = np.array([[0.2, 0.0], [-0.764, 0.985]])
VARMA1100_GAMMA = np.array([[1.0, 0.0], [1.07, 1.0]])
# Stand-in MA polynomial for the 100-lag design: alpha_l = 0.9**l * MIS_MATRIX.
MIS_MATRIX = np.array([[0.2, 0.1], [-0.1, 0.3]])
MIS_DECAY = 0.9
GARCH_DEFAULT = GarchParams(omega=0.05, alpha=0.10, beta=0.85)


def geometric_ma(matrix, decay: float, lags: int) -> tuple:
    matrix = np.asarray(matrix, dtype=float)
    return tuple(decay**l * matrix for l in range(1, lags + 1))


def varma11(mis_scale: float = 1.0, burn_in: int = 500) -> DgpSpec:
    return DgpSpec(
        A=VARMA11_A,
        Gamma=VARMA11_GAMMA,
        ma_coeffs=(np.eye(2),),
        mis_scale=mis_scale,
        mis_power=-0.5,
        burn_in=burn_in,
        name="varma11",
    )


def varma1_100(mis_scale: float = 1.0, garch: GarchParams | None = None, burn_in: int = 500) -> DgpSpec:
    return DgpSpec(
        A=VARMA1100_A,
        Gamma=VARMA1100_GAMMA,
        ma_coeffs=geometric_ma(MIS_MATRIX, MIS_DECAY, 100),
        mis_scale=mis_scale,
        mis_power=-0.5,
        innovation_law=InnovationLaw.GARCH11 if garch else InnovationLaw.GAUSSIAN_IID,
        garch_params=garch,
        burn_in=burn_in,
        name="varma1-100" if garch is None else "varma1-100-garch",
    )


PRESETS = {
    "varma11": lambda: varma11(),
    "varma1-100": lambda: varma1_100(),
    "varma1-100-large-mis": lambda: varma1_100(mis_scale=2.0),
    "varma1-100-garch": lambda: varma1_100(garch=GARCH_DEFAULT),
}


def preset(name: str) -> DgpSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise InvalidSpec(f"unknown DGP preset {name!r}; known: {sorted(PRESETS)}") from None
