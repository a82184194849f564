#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

"""
Run configuration: every tunable with its default, loadable from a
line-oriented ``key = value`` file::

    # arena run used for the figures
    side = 10.0
    seed = 7
    noise = off
"""

import logging

from .dataset import GridSpec
from .exceptions import ImproperlyConfigured
from .explore import MAX_SEED, ExploreConfig
from .sim import Arena, RobotParams, SensorModel

logger = logging.getLogger("sensorimotor.config")

_TRUE = ("on", "true", "1", "yes")
_FALSE = ("off", "false", "0", "no")


def _boolean(value):
    if isinstance(value, bool):
        return value
    value = str(value).strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError("expected one of %s" % "/".join(_TRUE + _FALSE))


def _count(value):
    number = float(value)
    if number != int(number):
        raise ValueError("expected an integer")
    return int(number)


def _seed(value):
    seed = int(str(value).strip())
    if not 0 <= seed < MAX_SEED:
        raise ValueError("expected an unsigned 64-bit integer")
    return seed


# key -> (parser, default)
DEFAULTS = {
    "side": (float, 10.0),
    "body_radius": (float, 0.25),
    "wheel_separation": (float, 0.4),
    "max_speed": (float, 2.0),
    "dt": (float, 0.05),
    "action_duration": (float, 5.0),
    "stuck_threshold": (float, 0.01),
    "sensor_count": (_count, 16),
    "tolerance": (float, 0.1),
    "max_range": (float, 15.0),
    "noise": (_boolean, False),
    "seed": (_seed, None),
    "n_actions": (_count, 0),
    "checkpoint_every": (_count, 1000),
    "resolution": (_count, 50),
}


class Settings(object):
    """
    Resolved configuration. Unset keys keep their defaults; ``seed`` has
    none and must come from a file or the command line before an exploration
    config can be built.

    Values are accessible as attributes (``settings.max_speed``).
    """

    def __init__(self, **values):
        self._values = dict((key, default) for key, (_, default) in DEFAULTS.items())
        self.update(values)

    def __repr__(self):
        return "<Settings: %r>" % (self.as_dict(),)

    def __getattr__(self, name):
        try:
            return self.__dict__["_values"][name]
        except KeyError:
            raise AttributeError(name)

    def __eq__(self, other):
        return isinstance(other, Settings) and self._values == other._values

    def update(self, values, source="argument"):
        """ Set ``values`` (``None`` values are ignored), validating each. """
        for key, value in values.items():
            if value is None:
                continue
            self._values[key] = self._parse(key, value, source)
        return self

    @staticmethod
    def _parse(key, value, source):
        if key not in DEFAULTS:
            raise ImproperlyConfigured("%s: unknown key %r" % (source, key))
        parser = DEFAULTS[key][0]
        try:
            return parser(value)
        except (TypeError, ValueError) as e:
            raise ImproperlyConfigured("%s: bad value %r for %s (%s)" % (source, value, key, e))

    @classmethod
    def from_file(cls, path):
        """
        Parse a ``key = value`` file. Blank lines and ``#`` comments are
        skipped; unknown or repeated keys and unparsable values raise
        :class:`~sensorimotor.ImproperlyConfigured` naming the line.
        """
        settings = cls()
        seen = set()
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                where = "%s line %d" % (path, number)
                key, sep, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if not sep or not key or not value:
                    raise ImproperlyConfigured("%s: expected 'key = value', got %r" % (where, line))
                if key in seen:
                    raise ImproperlyConfigured("%s: duplicate key %r" % (where, key))
                seen.add(key)
                settings._values[key] = cls._parse(key, value, where)
        logger.debug("Loaded %d settings from %s", len(seen), path)
        return settings

    def as_dict(self):
        return dict(self._values)

    def arena(self):
        return Arena(self.side)

    def robot_params(self):
        return RobotParams(self.body_radius, self.wheel_separation, self.max_speed, self.dt)

    def sensor_model(self):
        return SensorModel(
            self.sensor_count,
            mount_radius=self.body_radius,
            tolerance=self.tolerance,
            max_range=self.max_range,
        )

    def explore_config(self):
        if self.seed is None:
            raise ImproperlyConfigured("no seed configured")
        return ExploreConfig(
            n_actions=self.n_actions,
            action_duration=self.action_duration,
            max_speed=self.max_speed,
            stuck_threshold=self.stuck_threshold,
            noise_enabled=self.noise,
            seed=self.seed,
            checkpoint_every=self.checkpoint_every,
        )

    def grid_spec(self):
        return GridSpec(self.resolution, self.side)
