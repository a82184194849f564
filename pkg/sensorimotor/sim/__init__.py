#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

from .arena import WALLS, Arena, Pose, RobotParams
from .kinematics import drive, integrate_pose
from .sensors import (
    SensorFrame,
    SensorModel,
    cast_ray,
    default_lookup_table,
    read_sensors,
    response_curve,
)

__all__ = [
    "WALLS",
    "Arena",
    "Pose",
    "RobotParams",
    "drive",
    "integrate_pose",
    "SensorFrame",
    "SensorModel",
    "cast_ray",
    "default_lookup_table",
    "read_sensors",
    "response_curve",
]
