"""Targeted local projections, smooth local projections and double-bootstrap bands."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ALL_METHODS,
    IrfPath,
    Method,
    RngStream,
    ShockTarget,
    TimeSeriesPanel,
    TlpError,
)
from .dgp import DgpSpec, preset, simulate, theoretical_abias, true_irf  # noqa: E402
from .estimators import estimate_lp, estimate_var, fit_var, var_irf  # noqa: E402
from .shrinkage import optimal_weights, tlp_combine, estimate_slp, fit_slp  # noqa: E402
from .bootstrap import BootstrapConfig, Centering, run_msdb  # noqa: E402
from .experiment import ExperimentDesign, compare_centering, run_experiment  # noqa: E402
