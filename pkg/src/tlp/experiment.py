"""Monte Carlo coverage experiments.

Each replication ``r`` simulates a panel from stream ``(master_seed, r, 0)``
and bootstraps it on stream ``(master_seed, r, 1)``. Replications are
independent, so they can be spread over worker processes; results are
reduced in replication order, which makes the metrics independent of the
number of workers.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bootstrap import BootstrapConfig, Centering, run_msdb
from .core import (
    ALL_METHODS,
    InvalidSpec,
    Method,
    ReplicationFailure,
    RngStream,
    ShockTarget,
    TlpError,
)
from .dgp import DgpSpec, simulate, true_irf

log = logging.getLogger(__name__)

MAX_FAILURE_SHARE = 0.02


@dataclass(frozen=True)
class ExperimentDesign:
    dgp: DgpSpec
    T: int
    n_reps: int
    bootstrap: BootstrapConfig
    target: ShockTarget = ShockTarget(2, 1, 20)
    methods: tuple = ALL_METHODS
    master_seed: int = 0
    name: str = "experiment"

    def __post_init__(self):
        methods = tuple(Method(m) for m in self.methods)
        if not methods:
            raise InvalidSpec("methods must be non-empty")
        if len(set(methods)) != len(methods):
            raise InvalidSpec("methods must not repeat")
        if Method.SLP in methods and self.target.n_horizons < 3:
            raise InvalidSpec("SLP needs h_max >= 2")
        if self.n_reps < 1:
            raise InvalidSpec("n_reps must be at least 1")
        if self.T < 2:
            raise InvalidSpec("T must be at least 2")
        self.target.check(self.dgp.k)
        object.__setattr__(self, "methods", methods)
        # one seed governs the whole run
        object.__setattr__(self, "bootstrap", replace(self.bootstrap, master_seed=self.master_seed))

    @property
    def p(self) -> int:
        return self.bootstrap.p

    @property
    def q(self) -> int:
        return self.bootstrap.q

    def with_seed(self, seed: int) -> "ExperimentDesign":
        return replace(self, master_seed=seed)


@dataclass(frozen=True)
class MetricsTable:
    """Per-method, per-horizon summary over the surviving replications.

    ``sd`` uses the population divisor so that ``rmse**2 == bias**2 + sd**2``.
    """

    methods: tuple
    horizons: np.ndarray
    coverage: dict
    avg_length: dict
    bias: dict
    sd: dict
    rmse: dict
    n_effective: int
    nominal: float = 0.90
    centering: Centering = Centering.BOOTSTRAP_MEAN

    def rows(self):
        for m in self.methods:
            for idx, h in enumerate(self.horizons):
                yield (
                    str(m),
                    int(h),
                    float(self.coverage[m][idx]),
                    float(self.avg_length[m][idx]),
                    float(self.bias[m][idx]),
                    float(self.sd[m][idx]),
                    float(self.rmse[m][idx]),
                    int(self.n_effective),
                )

    def metric(self, name: str) -> dict:
        return {"coverage": self.coverage, "length": self.avg_length, "bias": self.bias,
                "sd": self.sd, "rmse": self.rmse}[name]


@dataclass
class Replication:
    """What one replication contributes; the ensemble itself is discarded."""

    index: int
    ok: bool
    points: dict = field(default_factory=dict)
    bands: dict = field(default_factory=dict)
    tlp_weights: np.ndarray | None = None
    lambda_tilde: float = float("nan")
    redraws: int = 0
    error: str = ""


def run_replication(design: ExperimentDesign, r: int) -> Replication:
    stream = RngStream(design.master_seed, (r,))
    try:
        panel = simulate(design.dgp, design.T, stream.child(0))
        ens = run_msdb(panel, design.target, design.bootstrap, stream.child(1))
    except TlpError as exc:
        log.warning("replication %d failed: %s", r, exc)
        return Replication(r, False, error=f"{type(exc).__name__}: {exc}")
    points = {m: ens.point(m).copy() for m in design.methods}
    bands = {c: {m: b for m, b in ens.bands_for(c).items() if m in design.methods} for c in Centering}
    return Replication(
        r, True, points, bands,
        tlp_weights=ens.tlp_weights_first[0].copy(),
        lambda_tilde=ens.lambda_tilde,
        redraws=ens.redraws,
    )


def _run_chunk(args):
    design, reps = args
    return [run_replication(design, r) for r in reps]


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("TLP_WORKERS")
        workers = int(env) if env else 1
    if workers < 1:
        raise InvalidSpec("workers must be positive")
    return workers


def run_replications(design: ExperimentDesign, workers: int | None = None) -> list:
    """All replications of ``design``, ordered by index."""
    workers = resolve_workers(workers)
    indices = list(range(design.n_reps))
    if workers == 1 or design.n_reps == 1:
        results = [run_replication(design, r) for r in indices]
    else:
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [rep for part in pool.map(_run_chunk, [(design, c) for c in chunks if c]) for rep in part]
        results.sort(key=lambda rep: rep.index)
    failed = [rep for rep in results if not rep.ok]
    if len(failed) > MAX_FAILURE_SHARE * design.n_reps:
        raise ReplicationFailure(
            f"{len(failed)} of {design.n_reps} replications failed; first: {failed[0].error}"
        )
    return results


def summarize(design: ExperimentDesign, results: list, centering=Centering.BOOTSTRAP_MEAN) -> MetricsTable:
    """Reduce replications (in index order) into a :class:`MetricsTable`."""
    centering = Centering(centering)
    truth = true_irf(design.dgp, design.target, design.T).beta
    good = [rep for rep in results if rep.ok]
    if not good:
        raise ReplicationFailure("no replication survived")
    cov, length, bias, sd, rmse = {}, {}, {}, {}, {}
    for m in design.methods:
        pts = np.stack([rep.points[m] for rep in good])
        bands = np.stack([rep.bands[centering][m] for rep in good])
        inside = (bands[:, :, 0] <= truth) & (truth <= bands[:, :, 1])
        err = pts - truth
        cov[m] = inside.mean(axis=0)
        length[m] = (bands[:, :, 1] - bands[:, :, 0]).mean(axis=0)
        bias[m] = err.mean(axis=0)
        sd[m] = err.std(axis=0)
        rmse[m] = np.sqrt(np.mean(err**2, axis=0))
    return MetricsTable(
        methods=design.methods,
        horizons=np.arange(design.target.n_horizons),
        coverage=cov,
        avg_length=length,
        bias=bias,
        sd=sd,
        rmse=rmse,
        n_effective=len(good),
        nominal=1.0 - design.bootstrap.alpha,
        centering=centering,
    )


def run_experiment(design: ExperimentDesign, workers: int | None = None) -> MetricsTable:
    results = run_replications(design, workers)
    return summarize(design, results, design.bootstrap.centering)


def compare_centering(design: ExperimentDesign, workers: int | None = None):
    """Metrics under both centring rules from the very same replications.

    Returns ``(bootstrap_mean_table, pseudo_truth_table)``.
    """
    results = run_replications(design, workers)
    return (
        summarize(design, results, Centering.BOOTSTRAP_MEAN),
        summarize(design, results, Centering.PSEUDO_TRUTH),
    )
