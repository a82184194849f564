#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

"""
Long-running checks against full-size reference runs. Skipped unless
``TEST_SENSORIMOTOR_REFERENCE`` is set in the environment.
"""

import os
from unittest import SkipTest

from sensorimotor.dataset import Dataset
from sensorimotor.explore import ExploreConfig, run_exploration
from sensorimotor.sim import Arena, RobotParams, SensorModel

REFERENCE_ACTIONS = 50000
REFERENCE_SEED = 7

_runs = {}


class MemorySink(object):
    def __init__(self):
        self.records = []

    def write(self, record):
        self.records.append(record)

    def flush(self):
        pass


def get_reference_run(noise=False):
    """ The seed-7 reference dataset, simulated once per process. """
    if noise not in _runs:
        config = ExploreConfig(
            n_actions=REFERENCE_ACTIONS, seed=REFERENCE_SEED, noise_enabled=noise
        )
        sink = MemorySink()
        run_exploration(config, Arena(), RobotParams(), SensorModel(), sink)
        _runs[noise] = Dataset.from_records(sink.records)
    return _runs[noise]


def setup():
    if not os.environ.get("TEST_SENSORIMOTOR_REFERENCE"):
        raise SkipTest("set TEST_SENSORIMOTOR_REFERENCE=1 to run the reference checks")
