#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import shutil
import tempfile
from os.path import join
from unittest import TestCase, SkipTest  # noqa: F401

import numpy as np

from sensorimotor.dataset import SENSOR_COUNT, Dataset, LogRecord


def make_records(ends, sensors=None, yaw=0.0, starts=None, stuck=None):
    """
    Log records ending at ``ends``. Each record starts where the previous one
    ended unless ``starts`` is given. ``sensors`` defaults to readings that
    are a linear function of the end position.
    """
    ends = np.asarray(ends, dtype=float).reshape(-1, 2)
    n = len(ends)
    if sensors is None:
        sensors = identity_sensors(ends)
    sensors = np.asarray(sensors, dtype=float)
    if starts is None:
        starts = np.vstack(([[0.0, 0.0]], ends[:-1])) if n else np.empty((0, 2))
    yaws = np.broadcast_to(np.asarray(yaw, dtype=float), (n,))
    records = []
    for i in range(n):
        (x0, y0), (x1, y1) = starts[i], ends[i]
        records.append(
            LogRecord(
                i,
                0.5,
                -0.5,
                x0,
                y0,
                x1,
                y1,
                x1 - x0,
                y1 - y0,
                float(yaws[i]),
                tuple(sensors[i]),
                bool(stuck[i]) if stuck is not None else False,
            )
        )
    return records


def make_dataset(ends, sensors=None, yaw=0.0, starts=None, stuck=None):
    return Dataset.from_records(make_records(ends, sensors, yaw, starts, stuck))


def identity_sensors(ends, count=SENSOR_COUNT):
    """ Readings that repeat ``(x, y)`` across the sensor columns. """
    ends = np.asarray(ends, dtype=float).reshape(-1, 2)
    return np.tile(ends, count // 2)


def identity_dataset(n=2000, seed=0, yaw=0.0):
    """
    Records scattered over the arena whose sensors read their own position.
    ``y`` clusters around 0 with both extremes present, so after min-max
    scaling ``x`` has the larger variance and the principal plane keeps the
    axes in order.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(-4.5, 4.5, n)
    y = np.clip(rng.normal(0.0, 0.5, n), -2.0, 2.0)
    y[:2] = (-2.0, 2.0)
    return make_dataset(np.column_stack((x, y)), yaw=yaw)


class SensorimotorTestCase(TestCase):
    """ Test case with a scratch directory removed after every test. """

    def setUp(self):
        super(SensorimotorTestCase, self).setUp()
        self.tmpdir = tempfile.mkdtemp(prefix="sensorimotor-test-")

    def tearDown(self):
        shutil.rmtree(self.tmpdir, ignore_errors=True)
        super(SensorimotorTestCase, self).tearDown()

    def path(self, *parts):
        return join(self.tmpdir, *parts)

    def read_text(self, *parts):
        with open(self.path(*parts), "r", encoding="utf-8") as f:
            return f.read()

    def assertArrayAlmostEqual(self, expected, actual, decimal=9):
        np.testing.assert_array_almost_equal(expected, actual, decimal=decimal)
