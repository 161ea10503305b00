"""
Sweeping a scenario file
========================

Scenario files name the engines and a swept parameter.  The same runner
backs the ``crqueue sweep`` command; here we drive it from Python and print
the class-2 delay as the class-1 load grows.
"""

import sys

from crqueue import cross_validate, load_scenario, run_scenario, scenario_path
from crqueue.experiments import column, write_csv

s = load_scenario(scenario_path("fig8"))
rows = run_scenario(s)
for lam, approx, chain in zip(column(rows, "lambda1", "analytic"),
                              column(rows, "mean_wait2", "analytic"),
                              column(rows, "mean_wait2", "ctmc")):
    print(f"lambda1={lam:>5.0f}  approx E[Tq2]={approx:.3e}  chain={chain:.3e}")

# cross-validation compares the closed form and the chain point by point
report = cross_validate(s, rows=rows)
print(report.lines()[-1])

# the CSV written by the CLI
write_csv(rows[:2], sys.stdout)
