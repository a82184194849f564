#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

from collections import namedtuple

import numpy as np

from ..exceptions import ImproperlyConfigured, InvalidInputError
from ..utils import TWO_PI, require_finite

# slack allowed for ray origins sitting on a wall after rounding
BOUNDARY_TOL = 1e-9


def default_lookup_table(max_range=15.0, rows=11, peak=1000.0):
    """
    Quadratic-decay response ``v(d) = peak * (1 - d / max_range) ** 2``
    sampled at ``rows`` equispaced distances from 0 to ``max_range``.
    """
    distances = np.linspace(0.0, max_range, rows)
    values = peak * (1.0 - distances / max_range) ** 2
    return tuple(zip(distances.tolist(), values.tolist()))


SensorFrame = namedtuple("SensorFrame", "values yaw")
SensorFrame.__doc__ = """
One reading of all distance sensors (``values``, dimensionless) plus the
compass yaw in radians.
"""


class SensorModel(object):
    """
    Ring of distance sensors on the body perimeter with a piecewise-linear
    lookup-table response.

    :arg count: number of sensors, sensor ``i`` faces ``2 * pi * i / count``
        in the body frame (default 16)
    :arg mount_radius: distance of the sensors from the body center, i.e. the
        body radius (default 0.25)
    :arg lookup_table: ``(distance, value)`` rows, distances strictly
        increasing from 0 to ``max_range``; defaults to
        :func:`default_lookup_table`
    :arg tolerance: multiplicative noise half-width (default 0.1)
    :arg max_range: last distance of the table in meters (default 15.0)
    """

    def __init__(
        self, count=16, mount_radius=0.25, lookup_table=None, tolerance=0.1, max_range=15.0
    ):
        if int(count) != count or count < 1:
            raise ImproperlyConfigured("count must be a positive integer, got %r" % count)
        if not tolerance >= 0:
            raise ImproperlyConfigured("tolerance must be >= 0, got %r" % tolerance)
        if not max_range > 0:
            raise ImproperlyConfigured("max_range must be > 0, got %r" % max_range)
        if not mount_radius >= 0:
            raise ImproperlyConfigured("mount_radius must be >= 0, got %r" % mount_radius)
        if lookup_table is None:
            lookup_table = default_lookup_table(max_range)

        table = np.asarray(lookup_table, dtype=float)
        if table.ndim != 2 or table.shape[1] != 2 or len(table) < 2:
            raise ImproperlyConfigured("lookup_table needs at least two (distance, value) rows")
        distances, values = table[:, 0], table[:, 1]
        if not np.all(np.isfinite(table)):
            raise ImproperlyConfigured("lookup_table must be finite")
        if distances[0] != 0 or not np.all(np.diff(distances) > 0):
            raise ImproperlyConfigured(
                "lookup_table distances must start at 0 and strictly increase"
            )
        if not np.isclose(distances[-1], max_range):
            raise ImproperlyConfigured(
                "last lookup_table row must sit at max_range %r" % max_range
            )

        self.count = int(count)
        self.mount_radius = float(mount_radius)
        self.tolerance = float(tolerance)
        self.max_range = float(max_range)
        self.distances = distances
        self.values = values
        self.mount_angles = TWO_PI * np.arange(self.count) / self.count

    def __repr__(self):
        return "<SensorModel: %d sensors, tolerance %g>" % (self.count, self.tolerance)

    @property
    def lookup_table(self):
        return tuple(zip(self.distances.tolist(), self.values.tolist()))

    @property
    def max_value(self):
        return float(self.values.max())

    def as_dict(self):
        return {
            "count": self.count,
            "mount_radius": self.mount_radius,
            "lookup_table": [list(row) for row in self.lookup_table],
            "tolerance": self.tolerance,
            "max_range": self.max_range,
        }


def _ray_distances(ox, oy, angles, half):
    """
    Vectorized wall intersection for rays starting inside (or on) the square
    ``[-half, half]^2``.
    """
    dx, dy = np.cos(angles), np.sin(angles)
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = np.where(dx > 0, (half - ox) / dx, np.where(dx < 0, (-half - ox) / dx, np.inf))
        ty = np.where(dy > 0, (half - oy) / dy, np.where(dy < 0, (-half - oy) / dy, np.inf))
    return np.maximum(np.minimum(tx, ty), 0.0)


def cast_ray(origin, angle, arena):
    """
    Euclidean distance from ``origin`` to the first wall hit by a ray heading
    ``angle`` radians. Origins on the wall itself are accepted and see 0 when
    facing out.
    """
    ox, oy = origin
    require_finite("ray", ox, oy, angle)
    if abs(ox) > arena.half + BOUNDARY_TOL or abs(oy) > arena.half + BOUNDARY_TOL:
        raise InvalidInputError("ray origin %r lies outside %r" % (origin, arena))
    return float(_ray_distances(ox, oy, np.float64(angle), arena.half))


def response_curve(distance, model):
    """
    Sensor value for a true ``distance`` (scalar or array): linear
    interpolation of the lookup table, clamped to the last row beyond
    ``max_range``.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(np.isnan(d)) or np.any(d < 0):
        raise InvalidInputError("distance must be >= 0, got %r" % (distance,))
    result = np.interp(d, model.distances, model.values)
    return float(result) if result.ndim == 0 else result


def read_sensors(pose, arena, model, noise_enabled=False, rng=None):
    """
    Take one :class:`SensorFrame` at ``pose``.

    Each ray starts on the body perimeter at the sensor's mount angle and
    points radially outward. With ``noise_enabled`` every value is scaled by
    ``1 + u``, ``u ~ Uniform(-tolerance, tolerance)``, drawn from ``rng`` in
    sensor order, even when the tolerance is 0. The yaw is the noiseless heading.
    """
    require_finite("pose", pose.x, pose.y, pose.theta)
    angles = pose.theta + model.mount_angles
    ox = pose.x + model.mount_radius * np.cos(angles)
    oy = pose.y + model.mount_radius * np.sin(angles)
    if np.any(np.abs(ox) > arena.half + BOUNDARY_TOL) or np.any(
        np.abs(oy) > arena.half + BOUNDARY_TOL
    ):
        raise InvalidInputError("sensor ring at %r crosses a wall of %r" % (pose, arena))

    values = response_curve(_ray_distances(ox, oy, angles, arena.half), model)
    values = np.atleast_1d(values)
    if noise_enabled:
        if rng is None:
            raise InvalidInputError("noise_enabled needs a seeded rng")
        values = values * (1.0 + rng.uniform(-model.tolerance, model.tolerance, model.count))
    return SensorFrame(values, pose.theta)
