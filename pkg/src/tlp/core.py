"""Shared types, error classes and small linear-algebra helpers.

Matrices are dense row-major numpy arrays throughout the package. Time runs
along axis 0 of a panel; a batch of panels stacks along a leading axis.
Variable indices in :class:`ShockTarget` are 1-based, like the notation in
the literature; everything else is 0-based.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class TlpError(Exception):
    """Base class for all errors raised by the package."""


class NonStationary(TlpError):
    pass


class NoConvergence(TlpError):
    pass


class NotPositiveDefinite(TlpError):
    pass


class InvalidSpec(TlpError):
    pass


class SampleTooShort(TlpError):
    pass


class DegenerateRegressor(TlpError):
    pass


class ShapeMismatch(TlpError):
    pass


class TooFewHorizons(TlpError):
    pass


class SingularSystem(TlpError):
    pass


class InvalidBlockLength(TlpError):
    pass


class ExplosiveFit(TlpError):
    pass


class ReplicationFailure(TlpError):
    pass


class ZeroVariance(TlpError):
    pass


class TooFewReplications(TlpError):
    pass


class Method(str, enum.Enum):
    LP = "LP"
    VAR = "VAR"
    SLP = "SLP"
    TLP = "TLP"

    def __str__(self) -> str:
        return self.value


ALL_METHODS = (Method.LP, Method.VAR, Method.SLP, Method.TLP)


@dataclass(frozen=True)
class TimeSeriesPanel:
    """A ``T x k`` block of observations, time along rows."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ShapeMismatch(f"panel must be a non-empty T x k matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidSpec("panel contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ShockTarget:
    """Response variable ``i``, shock ``j`` (both 1-based) and the last horizon."""

    response: int
    shock: int
    h_max: int

    def __post_init__(self):
        if self.response < 1 or self.shock < 1:
            raise InvalidSpec("response and shock indices are 1-based")
        if self.h_max < 0:
            raise InvalidSpec("h_max must be non-negative")

    def check(self, k: int) -> None:
        if self.response > k or self.shock > k:
            raise InvalidSpec(f"target ({self.response}, {self.shock}) out of range for k={k}")

    @property
    def i(self) -> int:
        return self.response - 1

    @property
    def j(self) -> int:
        return self.shock - 1

    @property
    def n_horizons(self) -> int:
        return self.h_max + 1


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by ``(master_seed, *path)``.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys, so
    a stream's output depends only on its key and never on the order in which
    streams are created or on which worker consumes them.
    """

    master_seed: int
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.master_seed < 0 or self.master_seed >= 2**64:
            raise InvalidSpec("master_seed must fit in an unsigned 64-bit integer")
        if any(p < 0 for p in self.path):
            raise InvalidSpec("stream ids must be non-negative")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    @property
    def stream_id(self) -> int:
        return self.path[-1] if self.path else 0

    def child(self, *ids: int) -> "RngStream":
        return RngStream(self.master_seed, self.path + tuple(ids))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class IrfPath:
    method: Method
    target: ShockTarget
    beta: np.ndarray

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float).reshape(-1)
        if beta.shape[0] != self.target.n_horizons:
            raise ShapeMismatch(
                f"IRF has {beta.shape[0]} horizons, target expects {self.target.n_horizons}"
            )
        if not np.all(np.isfinite(beta)):
            raise InvalidSpec("IRF contains non-finite entries")
        beta.setflags(write=False)
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "beta", beta)

    @property
    def h_max(self) -> int:
        return self.target.h_max


def spectral_radius(A: np.ndarray) -> float:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def lyapunov_solve(A, Q, rtol: float = 1e-10, max_doublings: int = 60) -> np.ndarray:
    """Solve ``S = A S A' + Q`` for a stable ``A``.

    Uses the doubling form of the series ``sum_m A^m Q (A')^m``: after ``n``
    steps the partial sum covers ``2**n`` terms.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if A.shape != Q.shape or A.shape[0] != A.shape[1]:
        raise ShapeMismatch("A and Q must be square matrices of equal size")
    if spectral_radius(A) >= 1.0 - 1e-8:
        raise NonStationary(f"spectral radius {spectral_radius(A):.6g} is not below one")
    Q = 0.5 * (Q + Q.T)
    S = Q.copy()
    Ak = A.copy()
    scale = max(np.linalg.norm(Q), np.finfo(float).tiny)
    for _ in range(max_doublings):
        S = S + Ak @ S @ Ak.T
        Ak = Ak @ Ak
        resid = np.linalg.norm(S - A @ S @ A.T - Q)
        if resid <= rtol * max(np.linalg.norm(S), scale):
            return 0.5 * (S + S.T)
    raise NoConvergence("Lyapunov doubling did not reach the residual tolerance")


def cholesky_lower(sigma) -> np.ndarray:
    """Lower Cholesky factor with a relative pivot check."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    n = sigma.shape[0]
    if sigma.shape != (n, n):
        raise ShapeMismatch("covariance must be square")
    if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-12 * np.abs(sigma).max(initial=0.0)):
        raise NotPositiveDefinite("matrix is not symmetric")
    tol = 1e-12 * max(np.max(np.diag(sigma)), 0.0)
    C = np.zeros_like(sigma)
    for c in range(n):
        pivot = sigma[c, c] - C[c, :c] @ C[c, :c]
        if pivot <= tol or not np.isfinite(pivot):
            raise NotPositiveDefinite(f"pivot {pivot:.3g} at position {c} is not positive")
        C[c, c] = np.sqrt(pivot)
        C[c + 1:, c] = (sigma[c + 1:, c] - C[c + 1:, :c] @ C[c, :c]) / C[c, c]
    return C


def unit_lower(C: np.ndarray) -> np.ndarray:
    """Rescale columns of a lower-triangular factor to a unit diagonal."""
    return C / np.diagonal(C, axis1=-2, axis2=-1)[..., None, :]


def selector(k: int, index: int) -> np.ndarray:
    e = np.zeros(k)
    e[index] = 1.0
    return e
