#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

# flake8: noqa
from __future__ import absolute_import

VERSION = (0, 1, 0)
__version__ = VERSION
__versionstr__ = ".".join(map(str, VERSION))

import logging

logger = logging.getLogger("sensorimotor")
logger.addHandler(logging.NullHandler())

from .sim import Arena, Pose, RobotParams, SensorModel, drive, read_sensors
from .explore import ExploreConfig, run_exploration, resume
from .dataset import Dataset, GridSpec, LogWriter, read_log, write_log
from .config import Settings
from .serializer import JSONSerializer
from .exceptions import *
