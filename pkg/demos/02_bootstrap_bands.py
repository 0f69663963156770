"""Double-bootstrap bands under both centring rules.

Band lengths agree across the two rules; only their location moves.

    python demos/02_bootstrap_bands.py
"""
import numpy as np

from tlp import RngStream, ShockTarget, preset, simulate
from tlp.bootstrap import BootstrapConfig, Centering, run_msdb
from tlp.core import Method
from tlp.dgp import true_irf

spec = preset("varma1-100")
T = 200
target = ShockTarget(2, 1, 10)
panel = simulate(spec, T, RngStream(3))
ens = run_msdb(panel, target, BootstrapConfig(B1=60, B2=25), RngStream(3, (1,)))
truth = true_irf(spec, target, T).beta

for centering in Centering:
    bands = ens.bands_for(centering)
    print(f"\n{centering}")
    print("h   truth    " + "  ".join(f"{str(m):>17s}" for m in (Method.LP, Method.VAR, Method.TLP)))
    for h in range(target.n_horizons):
        cells = [f"[{bands[m][h, 0]: .2f},{bands[m][h, 1]: .2f}]" for m in (Method.LP, Method.VAR, Method.TLP)]
        print(f"{h:2d} {truth[h]: .3f}   " + "  ".join(f"{c:>17s}" for c in cells))

diff = np.abs(np.diff(ens.bands_for(Centering.BOOTSTRAP_MEAN)[Method.VAR], axis=1)
              - np.diff(ens.bands_for(Centering.PSEUDO_TRUTH)[Method.VAR], axis=1)).max()
print(f"\nlargest VAR band length difference between centrings: {diff:.1e}")
