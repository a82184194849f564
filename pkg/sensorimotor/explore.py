#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import logging
import math
import os
from collections import namedtuple

import numpy as np

from .dataset import LogRecord, read_checkpoint, read_log, write_checkpoint
from .exceptions import CorruptCheckpointError, ImproperlyConfigured, InvalidInputError
from .sim import Pose, drive, read_sensors
from .utils import content_digest

logger = logging.getLogger("sensorimotor.explore")

# create the sensorimotor.trace logger, but only set propagate to False if the
# logger hasn't already been configured
_tracer_already_configured = "sensorimotor.trace" in logging.Logger.manager.loggerDict
tracer = logging.getLogger("sensorimotor.trace")
if not _tracer_already_configured:
    tracer.propagate = False

MAX_SEED = 2 ** 64

RunSummary = namedtuple("RunSummary", "actions stuck")


class ExploreConfig(object):
    """
    Parameters of a random-walk data collection run.

    :arg n_actions: total number of actions the run should reach
    :arg action_duration: seconds each wheel command is held (default 5.0)
    :arg max_speed: wheel commands are drawn from ``[-max_speed, max_speed]``
        (default 2.0)
    :arg stuck_threshold: an action moving the robot less than this many
        meters is flagged stuck (default 0.01)
    :arg noise_enabled: apply the sensor tolerance noise
    :arg seed: 64-bit seed of the run's single random stream
    :arg checkpoint_every: actions between checkpoints (default 1000)
    """

    def __init__(
        self,
        n_actions=0,
        action_duration=5.0,
        max_speed=2.0,
        stuck_threshold=0.01,
        noise_enabled=False,
        seed=None,
        checkpoint_every=1000,
    ):
        if seed is None or int(seed) != seed or not 0 <= seed < MAX_SEED:
            raise ImproperlyConfigured("seed must be an unsigned 64-bit integer, got %r" % (seed,))
        if int(n_actions) != n_actions or n_actions < 0:
            raise ImproperlyConfigured("n_actions must be >= 0, got %r" % (n_actions,))
        if not action_duration > 0:
            raise ImproperlyConfigured("action_duration must be > 0, got %r" % (action_duration,))
        if not max_speed >= 0:
            raise ImproperlyConfigured("max_speed must be >= 0, got %r" % (max_speed,))
        if not stuck_threshold >= 0:
            raise ImproperlyConfigured("stuck_threshold must be >= 0, got %r" % (stuck_threshold,))
        if int(checkpoint_every) != checkpoint_every or checkpoint_every < 1:
            raise ImproperlyConfigured("checkpoint_every must be >= 1, got %r" % (checkpoint_every,))

        self.n_actions = int(n_actions)
        self.action_duration = float(action_duration)
        self.max_speed = float(max_speed)
        self.stuck_threshold = float(stuck_threshold)
        self.noise_enabled = bool(noise_enabled)
        self.seed = int(seed)
        self.checkpoint_every = int(checkpoint_every)

    def __repr__(self):
        return "<ExploreConfig: %r>" % (self.as_dict(),)

    def as_dict(self):
        return {
            "n_actions": self.n_actions,
            "action_duration": self.action_duration,
            "max_speed": self.max_speed,
            "stuck_threshold": self.stuck_threshold,
            "noise_enabled": self.noise_enabled,
            "seed": self.seed,
            "checkpoint_every": self.checkpoint_every,
        }


def config_digest(config, arena, params, model):
    """
    Content hash of everything that shapes the log byte stream. ``n_actions``
    and ``checkpoint_every`` are left out so a run can be extended by
    resuming it with a larger ``n_actions``.
    """
    explore = config.as_dict()
    del explore["n_actions"], explore["checkpoint_every"]
    return content_digest(
        {
            "explore": explore,
            "arena": arena.as_dict(),
            "robot": params.as_dict(),
            "sensors": model.as_dict(),
        }
    )


class Checkpoint(namedtuple("Checkpoint", "actions_completed rng_state last_pose config_digest")):
    """
    Everything needed to continue a run: how far it got, the generator state,
    the robot pose and the digest of the configuration that produced it.
    """

    __slots__ = ()

    def as_dict(self):
        return {
            "actions_completed": self.actions_completed,
            "rng_state": self.rng_state,
            "last_pose": self.last_pose.as_dict(),
            "config_digest": self.config_digest,
        }

    @classmethod
    def from_dict(cls, data):
        pose = data["last_pose"]
        return cls(
            int(data["actions_completed"]),
            data["rng_state"],
            Pose(float(pose["x"]), float(pose["y"]), float(pose["theta"])),
            data["config_digest"],
        )


def load_checkpoint(path):
    return Checkpoint.from_dict(read_checkpoint(path))


def save_checkpoint(path, checkpoint):
    write_checkpoint(path, checkpoint.as_dict())


def make_rng(seed):
    """ The run's random stream: numpy's PCG64 generator seeded with ``seed``. """
    return np.random.Generator(np.random.PCG64(seed))


def restore_rng(state):
    bit_generator = np.random.PCG64()
    try:
        bit_generator.state = state
    except (TypeError, ValueError, KeyError) as e:
        raise CorruptCheckpointError("rng_state", "cannot restore generator", e)
    return np.random.Generator(bit_generator)


def sample_action(rng, max_speed):
    """
    Draw ``(v_left, v_right)`` independently from
    ``Uniform(-max_speed, max_speed)``, left first.
    """
    if not max_speed >= 0:
        raise InvalidInputError("max_speed must be >= 0, got %r" % (max_speed,))
    v_left = rng.uniform(-max_speed, max_speed) + 0.0
    v_right = rng.uniform(-max_speed, max_speed) + 0.0
    return float(v_left), float(v_right)


def detect_stuck(start, end, threshold):
    """ ``True`` iff the robot moved strictly less than ``threshold`` meters. """
    if not threshold >= 0:
        raise InvalidInputError("threshold must be >= 0, got %r" % (threshold,))
    return math.hypot(end[0] - start[0], end[1] - start[1]) < threshold


class Explorer(object):
    """
    Drives one random-walk run into a log sink.

    :arg config: :class:`ExploreConfig`
    :arg arena: :class:`~sensorimotor.sim.Arena`
    :arg params: :class:`~sensorimotor.sim.RobotParams`
    :arg model: :class:`~sensorimotor.sim.SensorModel`
    :arg log_sink: :class:`~sensorimotor.dataset.LogWriter` (anything with
        ``write(record)`` and ``flush()``)
    :arg checkpoint_path: where to keep the checkpoint, ``None`` to skip
        checkpointing
    """

    def __init__(self, config, arena, params, model, log_sink, checkpoint_path=None):
        if config.max_speed > params.max_speed:
            raise ImproperlyConfigured(
                "exploration max_speed %r exceeds the robot's %r"
                % (config.max_speed, params.max_speed)
            )
        # fails early if action_duration is not a multiple of dt
        params.substeps(config.action_duration)
        self.config = config
        self.arena = arena
        self.params = params
        self.model = model
        self.sink = log_sink
        self.checkpoint_path = checkpoint_path
        self.digest = config_digest(config, arena, params, model)

    def step(self, index, pose, rng):
        """ Perform action number ``index`` from ``pose``; returns the record. """
        config = self.config
        v_left, v_right = sample_action(rng, config.max_speed)
        end = drive(pose, v_left, v_right, config.action_duration, self.params, self.arena)
        frame = read_sensors(end, self.arena, self.model, config.noise_enabled, rng)
        return LogRecord(
            index,
            v_left,
            v_right,
            pose.x,
            pose.y,
            end.x,
            end.y,
            end.x - pose.x,
            end.y - pose.y,
            frame.yaw,
            tuple(float(v) for v in frame.values),
            detect_stuck(pose, end, config.stuck_threshold),
        )

    def checkpoint(self, completed, rng, pose):
        self.sink.flush()
        if self.checkpoint_path is not None:
            save_checkpoint(
                self.checkpoint_path,
                Checkpoint(completed, rng.bit_generator.state, pose, self.digest),
            )

    def run(self, start, pose, rng, stuck=0):
        """
        Perform actions ``start .. n_actions - 1``. ``stuck`` is the number of
        stuck records already in the log.
        """
        every = self.config.checkpoint_every
        for index in range(start, self.config.n_actions):
            record = self.step(index, pose, rng)
            self.sink.write(record)
            stuck += record.stuck
            pose = Pose(record.x1, record.y1, record.yaw)
            tracer.debug(
                "#%d v=(%.3f, %.3f) (%.3f, %.3f) -> (%.3f, %.3f) yaw=%.3f stuck=%d",
                index,
                record.v_left,
                record.v_right,
                record.x0,
                record.y0,
                record.x1,
                record.y1,
                record.yaw,
                record.stuck,
            )
            if (index + 1) % every == 0:
                self.checkpoint(index + 1, rng, pose)

        done = max(start, self.config.n_actions)
        self.checkpoint(done, rng, pose)
        logger.info("Exploration finished: %d actions, %d stuck", done, stuck)
        return RunSummary(done, stuck)


def run_exploration(config, arena, params, model, log_sink, checkpoint_path=None):
    """
    Fresh random-walk run from the arena center, heading 0.

    Every action samples a wheel command, holds it for
    ``config.action_duration`` seconds, reads the sensors once at the end and
    appends a :class:`~sensorimotor.dataset.LogRecord` to ``log_sink``. The
    sink is flushed and a checkpoint written every ``checkpoint_every``
    actions and at the end.

    :returns: :class:`RunSummary` ``(actions, stuck)``
    """
    explorer = Explorer(config, arena, params, model, log_sink, checkpoint_path)
    logger.info("Starting exploration of %d actions (seed %d)", config.n_actions, config.seed)
    return explorer.run(0, Pose(0.0, 0.0, 0.0), make_rng(config.seed))


def resume(checkpoint, config, arena, params, model, log_sink, checkpoint_path=None):
    """
    Continue an interrupted run. ``log_sink`` must append to the log the
    checkpoint was taken against; that log has to hold exactly
    ``checkpoint.actions_completed`` records. The finished log is identical to
    the one an uninterrupted run would have written.
    """
    explorer = Explorer(config, arena, params, model, log_sink, checkpoint_path)
    if checkpoint.config_digest != explorer.digest:
        raise CorruptCheckpointError(
            "config_digest", "checkpoint was written by a different configuration"
        )

    path = getattr(log_sink, "path", None)
    stuck = 0
    if path is not None and os.path.exists(path):
        existing = read_log(path, model.count)
        if len(existing) != checkpoint.actions_completed:
            raise CorruptCheckpointError(
                "actions_completed",
                "log %s has %d records, checkpoint expects %d"
                % (path, len(existing), checkpoint.actions_completed),
            )
        stuck = int(existing.stuck.sum())
    elif checkpoint.actions_completed:
        raise CorruptCheckpointError("actions_completed", "log to resume is missing")

    rng = restore_rng(checkpoint.rng_state)
    try:
        params.check_pose(checkpoint.last_pose, arena)
    except InvalidInputError as e:
        raise CorruptCheckpointError("last_pose", str(e))
    logger.info("Resuming exploration at action %d", checkpoint.actions_completed)
    return explorer.run(checkpoint.actions_completed, checkpoint.last_pose, rng, stuck)
