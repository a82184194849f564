#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

from collections import namedtuple

import numpy as np

from ..exceptions import ImproperlyConfigured, InvalidInputError
from ..utils import wrap_angle

# wall order used everywhere a wall label is needed
WALLS = ("N", "E", "S", "W")


class Pose(namedtuple("Pose", "x y theta")):
    """
    Planar position (meters) and heading (radians, wrapped into ``(-pi, pi]``)
    of the robot's body center.
    """

    __slots__ = ()

    @classmethod
    def make(cls, x, y, theta):
        return cls(float(x), float(y), float(wrap_angle(theta)))

    def as_dict(self):
        return {"x": self.x, "y": self.y, "theta": self.theta}


class Arena(object):
    """
    Axis-aligned square world centered at the origin.

    :arg side: length of a wall in meters (default 10.0)
    """

    def __init__(self, side=10.0):
        if not side > 0 or not np.isfinite(side):
            raise ImproperlyConfigured("Arena side must be > 0, got %r" % (side,))
        self.side = float(side)
        self.half = self.side / 2.0

    def __repr__(self):
        return "<Arena: %gm x %gm>" % (self.side, self.side)

    def __eq__(self, other):
        return isinstance(other, Arena) and other.side == self.side

    def __hash__(self):
        return hash(("Arena", self.side))

    @property
    def walls(self):
        """
        The four walls as ``((x0, y0), (x1, y1))`` segments, in N, E, S, W
        order.
        """
        h = self.half
        return (
            ((-h, h), (h, h)),
            ((h, h), (h, -h)),
            ((h, -h), (-h, -h)),
            ((-h, -h), (-h, h)),
        )

    def contains(self, x, y, margin=0.0, tol=1e-9):
        """
        ``True`` when ``(x, y)`` lies inside the arena shrunk by ``margin``
        (closed, with ``tol`` slack for rounding).
        """
        limit = self.half - margin + tol
        return bool(np.all(np.abs(x) <= limit) and np.all(np.abs(y) <= limit))

    def clamp(self, x, y, margin):
        """
        Project ``(x, y)`` onto the closest point of the arena shrunk by
        ``margin``.
        """
        limit = self.half - margin
        return min(max(x, -limit), limit), min(max(y, -limit), limit)

    def wall_distances(self, points):
        """
        Distance of every point to each wall, an ``N x 4`` array in
        :data:`WALLS` order.
        """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        x, y = points[:, 0], points[:, 1]
        h = self.half
        return np.column_stack((h - y, h - x, y + h, x + h))

    def as_dict(self):
        return {"side": self.side}


class RobotParams(object):
    """
    Body and drive constants of the robot.

    :arg body_radius: radius of the cylindrical body in meters (default 0.25)
    :arg wheel_separation: distance between the wheels in meters (default 0.4)
    :arg max_speed: maximum ground speed of each wheel in m/s (default 2.0)
    :arg dt: integration step in seconds (default 0.05)
    """

    def __init__(self, body_radius=0.25, wheel_separation=0.4, max_speed=2.0, dt=0.05):
        for name, value in (
            ("body_radius", body_radius),
            ("wheel_separation", wheel_separation),
            ("max_speed", max_speed),
            ("dt", dt),
        ):
            if not np.isfinite(value) or not value > 0:
                raise ImproperlyConfigured("%s must be > 0, got %r" % (name, value))
        self.body_radius = float(body_radius)
        self.wheel_separation = float(wheel_separation)
        self.max_speed = float(max_speed)
        self.dt = float(dt)

    def __repr__(self):
        return "<RobotParams: %r>" % (self.as_dict(),)

    def substeps(self, duration):
        """
        Number of ``dt`` steps in ``duration``. ``duration`` has to be an
        exact multiple of ``dt``.
        """
        n = int(round(duration / self.dt))
        if n < 1 or abs(n * self.dt - duration) > 1e-9 * max(1.0, duration):
            raise ImproperlyConfigured(
                "duration %r is not a multiple of dt %r" % (duration, self.dt)
            )
        return n

    def check_pose(self, pose, arena):
        if not arena.contains(pose.x, pose.y, margin=self.body_radius):
            raise InvalidInputError(
                "pose %r is closer than %g m to a wall" % (pose, self.body_radius)
            )

    def as_dict(self):
        return {
            "body_radius": self.body_radius,
            "wheel_separation": self.wheel_separation,
            "max_speed": self.max_speed,
            "dt": self.dt,
        }
