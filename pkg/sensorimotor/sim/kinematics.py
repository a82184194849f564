#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import math

from ..exceptions import InvalidInputError
from ..utils import require_finite, wrap_angle
from .arena import Pose

# below this turn rate the straight-line limit of the arc is used
STRAIGHT_EPSILON = 1e-9


def _arc(x, y, theta, v, omega, dt):
    if abs(omega) < STRAIGHT_EPSILON:
        return x + v * dt * math.cos(theta), y + v * dt * math.sin(theta), theta
    radius = v / omega
    theta1 = theta + omega * dt
    return (
        x + radius * (math.sin(theta1) - math.sin(theta)),
        y - radius * (math.cos(theta1) - math.cos(theta)),
        theta1,
    )


def _step(x, y, theta, v, omega, dt, arena, radius):
    x, y, theta = _arc(x, y, theta, v, omega, dt)
    # collision: project the body center back into the legal square
    x, y = arena.clamp(x, y, radius)
    return x, y, wrap_angle(theta)


def integrate_pose(pose, v_left, v_right, dt, params, arena):
    """
    Advance ``pose`` by ``dt`` seconds of constant wheel speeds using the
    exact differential-drive arc. The body center is then projected back
    into the arena (heading kept) if the arc would bring it closer than
    ``params.body_radius`` to a wall.

    :arg pose: current :class:`~sensorimotor.sim.Pose`
    :arg v_left: left wheel ground speed (m/s)
    :arg v_right: right wheel ground speed (m/s)
    :arg dt: duration in seconds
    :arg params: :class:`~sensorimotor.sim.RobotParams`
    :arg arena: :class:`~sensorimotor.sim.Arena`
    """
    require_finite("pose", pose.x, pose.y, pose.theta)
    require_finite("wheel speed", v_left, v_right)
    require_finite("dt", dt)
    if not dt > 0:
        raise InvalidInputError("dt must be > 0, got %r" % (dt,))
    limit = params.max_speed * (1 + 1e-12)
    if abs(v_left) > limit or abs(v_right) > limit:
        raise InvalidInputError(
            "wheel speeds (%r, %r) exceed max_speed %r"
            % (v_left, v_right, params.max_speed)
        )
    params.check_pose(pose, arena)

    v = (v_left + v_right) / 2.0
    omega = (v_right - v_left) / params.wheel_separation
    return Pose(
        *_step(pose.x, pose.y, pose.theta, v, omega, dt, arena, params.body_radius)
    )


def drive(pose, v_left, v_right, duration, params, arena):
    """
    Hold a wheel command for ``duration`` seconds, integrating in
    ``params.dt`` substeps so that wall contact is resolved along the way.
    """
    steps = params.substeps(duration)
    v = (v_left + v_right) / 2.0
    omega = (v_right - v_left) / params.wheel_separation
    x, y, theta = pose
    for _ in range(steps):
        x, y, theta = _step(x, y, theta, v, omega, params.dt, arena, params.body_radius)
    return Pose(x, y, theta)
