"""Two-class preemptive priority queue with impatient high-priority packets
served over an interference-limited cognitive-radio link.

Three engines evaluate the same model:

* :mod:`crqueue.analytic` -- closed-form class-1 birth-death law and the
  class-2 approximation;
* :mod:`crqueue.ctmc` -- stationary law of the full two-dimensional chain;
* :mod:`crqueue.desim` -- discrete-event simulation with batch-means CIs.

:mod:`crqueue.experiments` drives parameter sweeps from scenario files.
"""

from importlib import resources

from .analytic import (Class1Metrics, Class2Metrics, SteadyState, class1_metrics,
                       class1_steady_state, class2_approx, renege_rate)
from .channel import (ServiceTimeLaw, expected_transmission_time, max_transmit_power,
                      outage_probability, sample_service_time, service_time_cdf,
                      service_time_pdf, transmission_time, truncated_mean)
from .ctmc import (balance_residual, build_ctmc, ctmc_metrics, marginal_class1, solve_auto,
                   solve_stationary)
from .desim import SimConfig, SimResult, run_sim, summarize
from .experiments import cross_validate, load_scenario, parse_scenario, run_scenario
from .params import (ChannelParams, PatienceSpec, SystemParams, check_qos, db_to_linear,
                     validate_stability)

__version__ = "0.1.0"


def scenario_path(name: str):
    """Path of a bundled scenario file, e.g. ``scenario_path("fig6")``."""
    return resources.files(__package__) / "scenarios" / f"{name}.scn"
