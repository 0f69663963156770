"""Point estimates of one impulse response from four estimators.

Simulates a single VARMA(1,100) panel and prints the LP, VAR, TLP and SLP
responses of variable 2 to the first recursive shock.

    python demos/01_point_estimates.py
"""

from tlp import RngStream, ShockTarget, estimate_lp, fit_var, preset, simulate, var_irf
from tlp.bootstrap import BootstrapConfig, run_msdb
from tlp.core import Method

spec = preset("varma1-100")
T = 200
target = ShockTarget(2, 1, 12)
panel = simulate(spec, T, RngStream(7))

lp = estimate_lp(panel, target, p=10)
var = var_irf(fit_var(panel, q=8), target)
print("h    LP       VAR")
for h in range(target.n_horizons):
    print(f"{h:2d}  {lp.beta[h]: .3f}  {var.beta[h]: .3f}")

# TLP weights and the SLP penalty are chosen from bootstrap variances,
# so a small ensemble is enough to see the combined estimators.
ens = run_msdb(panel, target, BootstrapConfig(B1=30, B2=10), RngStream(7, (1,)))
print("\nh    TLP      SLP      weight on LP")
for h in range(target.n_horizons):
    print(f"{h:2d}  {ens.point(Method.TLP)[h]: .3f}  {ens.point(Method.SLP)[h]: .3f}  "
          f"{ens.tlp_weights_first[0][h]:.2f}")
print(f"\nSLP penalty: {ens.lambda_tilde:.3g}")
