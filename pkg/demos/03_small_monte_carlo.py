"""A small coverage experiment, run through the library API.

Twenty replications of the VARMA(1,1) design with a reduced bootstrap; the
shipped configs run the full-size version through ``tlp montecarlo``.

    python demos/03_small_monte_carlo.py
"""
from dataclasses import replace

from tlp.cli import parse_config, shipped_config
from tlp.experiment import run_experiment

design = parse_config(shipped_config("varma11"))
design = replace(design, n_reps=20, bootstrap=replace(design.bootstrap, B1=30, B2=10))
table = run_experiment(design)

print(f"{table.n_effective} replications, nominal coverage {table.nominal:.2f}")
print("method  h  coverage  length   bias")
for method, h, cov, length, bias, *_ in table.rows():
    if h % 5 == 0:
        print(f"{method:6s} {h:2d}   {cov:.2f}    {length:.3f}  {bias: .3f}")
