"""Distributionally robust shortest paths with auxiliary information.

Instances, policies and configurations are plain dicts in the same JSON layout the
command-line tool reads and writes.
"""

import json

from ._drspp import DrsppError, beta_params, hoeffding_epsilon
from . import _drspp

__all__ = [
    "DrsppError",
    "beta_params",
    "example1_instance",
    "experiment",
    "generate",
    "hoeffding_epsilon",
    "solve",
]


def example1_instance():
    return json.loads(_drspp.example1_instance())


def generate(**config):
    """Generate an instance; keyword names follow the config block, e.g. h=3, r=3, seed=7."""
    return json.loads(_drspp.generate(json.dumps(config)))


def solve(instance, mode="dynamic", num_aux=None, time_limit=None, force_general=False):
    """Solve an instance dict. mode is "static", "maxmin" or "dynamic"."""
    out = _drspp.solve(json.dumps(instance), mode, num_aux, time_limit, force_general)
    return json.loads(out)


def experiment(grid, reps, seed, workers=0, record_times=True):
    """Run a grid and return (csv_text, records) with one dict per instance evaluation."""
    csv_text, lines = _drspp.experiment(json.dumps(grid), reps, seed, workers, record_times)
    records = [json.loads(line) for line in lines.splitlines() if line]
    return csv_text, records
