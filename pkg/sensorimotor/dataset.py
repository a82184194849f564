#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

"""
Sensorimotor log schema, CSV persistence and the basic views analyses are
built on (yaw filtering, sensor normalization, spatial binning).
"""

import logging
import math
import os
import re
from collections import namedtuple

import numpy as np
import pandas as pd

from .exceptions import (
    CorruptCheckpointError,
    ImproperlyConfigured,
    InsufficientDataError,
    InvalidInputError,
    LogWriteError,
    ParseError,
    SerializationError,
)
from .serializer import DEFAULT_SERIALIZER
from .utils import atomic_write, wrap_angle

logger = logging.getLogger("sensorimotor.dataset")

SENSOR_COUNT = 16
POSE_COLUMNS = ("index", "v_left", "v_right", "x0", "y0", "x1", "y1", "dx", "dy", "yaw")
CHECKPOINT_KEYS = ("actions_completed", "rng_state", "last_pose", "config_digest")


def sensor_columns(count=SENSOR_COUNT):
    return tuple("ds_%02d" % i for i in range(count))


def log_columns(sensor_count=SENSOR_COUNT):
    return POSE_COLUMNS + sensor_columns(sensor_count) + ("stuck",)


def log_header(sensor_count=SENSOR_COUNT):
    return ",".join(log_columns(sensor_count))


LogRecord = namedtuple(
    "LogRecord", "index v_left v_right x0 y0 x1 y1 dx dy yaw sensors stuck"
)
LogRecord.__doc__ = """
One exploration action: wheel commands, start and end position of the body
center, displacement, the sensor readings taken at the end of the action,
the compass yaw and the stuck flag.
"""


def format_record(record):
    """ Render a :class:`LogRecord` as one CSV line (no newline). """
    fields = ["%d" % record.index]
    fields.extend(
        "%.9g" % v
        for v in (
            record.v_left,
            record.v_right,
            record.x0,
            record.y0,
            record.x1,
            record.y1,
            record.dx,
            record.dy,
            record.yaw,
        )
    )
    fields.extend("%.9g" % v for v in record.sensors)
    fields.append("1" if record.stuck else "0")
    return ",".join(fields)


class Dataset(object):
    """
    Ordered, immutable collection of log records backed by a
    :class:`pandas.DataFrame` with the log's columns.

    Filtered views keep the ``index`` of the records they were taken from.

    :arg frame: data frame with the :func:`log_columns` columns
    :arg provenance: optional dict (``config_digest``, ``seed``) describing
        where the records came from
    """

    def __init__(self, frame, provenance=None, sensor_count=SENSOR_COUNT):
        columns = list(log_columns(sensor_count))
        if list(frame.columns) != columns:
            raise InvalidInputError("dataset columns must be %s" % ",".join(columns))
        frame = frame.astype(dict((c, float) for c in columns[1:-1]))
        frame = frame.astype({"index": np.int64, "stuck": bool})
        self._frame = frame.reset_index(drop=True)
        self.provenance = provenance
        self.sensor_count = sensor_count

    @classmethod
    def from_records(cls, records, provenance=None, sensor_count=SENSOR_COUNT):
        rows = [
            (r.index, r.v_left, r.v_right, r.x0, r.y0, r.x1, r.y1, r.dx, r.dy, r.yaw)
            + tuple(r.sensors)
            + (bool(r.stuck),)
            for r in records
        ]
        frame = pd.DataFrame(rows, columns=list(log_columns(sensor_count)))
        return cls(frame, provenance, sensor_count)

    def __len__(self):
        return len(self._frame)

    def __repr__(self):
        return "<Dataset: %d records>" % len(self)

    def __iter__(self):
        return self.records()

    @property
    def frame(self):
        """ A copy of the underlying data frame. """
        return self._frame.copy()

    @property
    def index(self):
        return self._frame["index"].to_numpy()

    @property
    def starts(self):
        return self._frame[["x0", "y0"]].to_numpy()

    @property
    def ends(self):
        """ End positions ``(x1, y1)``, an ``N x 2`` array. """
        return self._frame[["x1", "y1"]].to_numpy()

    @property
    def yaw(self):
        return self._frame["yaw"].to_numpy()

    @property
    def stuck(self):
        return self._frame["stuck"].to_numpy()

    @property
    def sensors(self):
        """ Raw sensor readings, an ``N x sensor_count`` array. """
        return self._frame[list(sensor_columns(self.sensor_count))].to_numpy()

    def records(self):
        sensors = self.sensors
        for i, row in enumerate(self._frame[list(POSE_COLUMNS)].itertuples(index=False)):
            yield LogRecord(*row, sensors=tuple(sensors[i]), stuck=bool(self.stuck[i]))

    def subset(self, mask):
        """ View with the records selected by a boolean mask or positions. """
        selector = np.asarray(mask)
        if selector.dtype == bool:
            frame = self._frame[selector]
        else:
            frame = self._frame.iloc[selector.astype(np.int64)]
        return Dataset(frame, self.provenance, self.sensor_count)

    def sorted_by_index(self):
        return Dataset(
            self._frame.sort_values("index", kind="mergesort"),
            self.provenance,
            self.sensor_count,
        )


class LogWriter(object):
    """
    Append-only CSV sink for :class:`LogRecord` instances.

    Records are buffered and only reach the file on :meth:`flush`, so the file
    always ends on a whole record and, when flushes are paired with
    checkpoints, holds exactly the records a checkpoint accounts for. Leaving
    a ``with`` block on an exception drops the unflushed records.

    :arg path: path of the log file
    :arg append: continue an existing log instead of truncating it; a
        missing or empty file is started with a header
    :arg sensor_count: number of ``ds_XX`` columns
    """

    def __init__(self, path, append=False, sensor_count=SENSOR_COUNT):
        self.path = path
        self.sensor_count = sensor_count
        self._buffer = []
        try:
            if append and os.path.exists(path) and os.path.getsize(path) > 0:
                self._file = open(path, "a", encoding="utf-8", newline="\n")
            else:
                self._file = open(path, "w", encoding="utf-8", newline="\n")
                self._file.write(log_header(sensor_count) + "\n")
                self._file.flush()
        except OSError as e:
            raise LogWriteError(path, e)

    def __repr__(self):
        return "<LogWriter: %s>" % self.path

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        if exc_type is not None:
            self.discard()
        self.close()

    def write(self, record):
        if len(record.sensors) != self.sensor_count:
            raise InvalidInputError(
                "record has %d sensor values, expected %d"
                % (len(record.sensors), self.sensor_count)
            )
        self._buffer.append(format_record(record))

    def flush(self):
        if not self._buffer:
            return
        try:
            self._file.write("\n".join(self._buffer) + "\n")
            self._file.flush()
            os.fsync(self._file.fileno())
        except OSError as e:
            raise LogWriteError(self.path, e)
        self._buffer = []

    def discard(self):
        """ Drop buffered records that have not been flushed yet. """
        if self._buffer:
            logger.warning("Dropping %d unflushed records of %s", len(self._buffer), self.path)
        self._buffer = []

    def close(self):
        if self._file.closed:
            return
        try:
            self.flush()
        finally:
            self._file.close()


def write_log(dataset, path):
    """
    Write ``dataset`` to ``path`` (atomically) in the log CSV format.
    """
    with atomic_write(path) as f:
        f.write(log_header(dataset.sensor_count) + "\n")
        for record in dataset.records():
            f.write(format_record(record) + "\n")
    logger.info("Wrote %d records to %s", len(dataset), path)


_LINE_RE = re.compile(r"line (\d+)")


def read_log(path, sensor_count=SENSOR_COUNT, provenance=None):
    """
    Load a log written by :class:`LogWriter` or :func:`write_log`.

    Raises :class:`~sensorimotor.ParseError` naming the first offending line
    for a wrong header, wrong column count, non-numeric or non-finite field,
    non-contiguous ``index`` or a ``stuck`` value other than 0/1.
    """
    header = log_header(sensor_count)
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().rstrip("\r\n")
    if first != header:
        raise ParseError(
            1,
            "unexpected header: expected %d columns %r..., got %d columns"
            % (header.count(",") + 1, header[:40], first.count(",") + 1 if first else 0),
        )

    try:
        raw = pd.read_csv(
            path, dtype=str, na_filter=False, skip_blank_lines=False, engine="c"
        )
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        raise ParseError(int(match.group(1)) if match else 0, "wrong column count: %s" % e)

    if len(raw):
        missing = (raw.isna() | (raw == "")).any(axis=1).to_numpy()
        if missing.any():
            raise ParseError(_line(missing), "wrong column count or empty field")

        numeric = raw.apply(pd.to_numeric, errors="coerce")
        bad = ~np.isfinite(numeric.to_numpy(dtype=float)).all(axis=1)
        if bad.any():
            raise ParseError(_line(bad), "non-numeric or non-finite field")

        index = numeric["index"].to_numpy()
        bad = index != np.arange(len(index))
        if bad.any():
            raise ParseError(_line(bad), "index is not contiguous from 0")
        bad = ~numeric["stuck"].isin((0, 1)).to_numpy()
        if bad.any():
            raise ParseError(_line(bad), "stuck must be 0 or 1")
        bad = np.abs(numeric["yaw"].to_numpy()) > math.pi + 1e-6
        if bad.any():
            raise ParseError(_line(bad), "yaw outside (-pi, pi]")
    else:
        numeric = raw

    dataset = Dataset(numeric, provenance, sensor_count)
    logger.debug("Read %d records from %s", len(dataset), path)
    return dataset


def _line(mask):
    # +1 for the header, +1 for 1-based numbering
    return int(np.argmax(mask)) + 2


def filter_by_yaw(dataset, center, tolerance):
    """
    Keep the records whose yaw is within ``tolerance`` radians of ``center``
    on the circle, i.e. ``|wrap(yaw - center)| <= tolerance``.
    """
    if not tolerance >= 0:
        raise InvalidInputError("yaw tolerance must be >= 0, got %r" % (tolerance,))
    offset = wrap_angle(dataset.yaw - float(center))
    return dataset.subset(np.abs(offset) <= tolerance)


def normalize_sensors(data):
    """
    Min-max scale every sensor column into ``[0, 1]``. Constant columns map
    to zeros.

    :arg data: :class:`Dataset` or ``N x D`` array of raw readings
    :returns: ``(matrix, mins, maxs)``
    """
    matrix = data.sensors if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if matrix.ndim != 2 or len(matrix) < 1:
        raise InsufficientDataError("normalization needs at least one record")
    mins, maxs = matrix.min(axis=0), matrix.max(axis=0)
    span = maxs - mins
    scale = np.where(span > 0, span, 1.0)
    normalized = np.where(span > 0, (matrix - mins) / scale, 0.0)
    return normalized, mins, maxs


def denormalize(matrix, mins, maxs):
    """ Inverse of :func:`normalize_sensors`. """
    return np.asarray(matrix, dtype=float) * (maxs - mins) + mins


class GridSpec(object):
    """
    Square binning of the arena.

    :arg resolution: cells per side (default 50)
    :arg extent: arena side in meters (default 10.0)
    """

    def __init__(self, resolution=50, extent=10.0):
        if int(resolution) != resolution or resolution < 1:
            raise ImproperlyConfigured("resolution must be >= 1, got %r" % (resolution,))
        if not extent > 0:
            raise ImproperlyConfigured("extent must be > 0, got %r" % (extent,))
        self.resolution = int(resolution)
        self.extent = float(extent)
        self.cell_size = self.extent / self.resolution

    def __repr__(self):
        return "<GridSpec: %dx%d over %gm>" % (self.resolution, self.resolution, self.extent)

    def cell_centers(self):
        """ ``x`` (== ``y``) coordinate of every cell center, ascending. """
        return -self.extent / 2.0 + (np.arange(self.resolution) + 0.5) * self.cell_size

    def as_dict(self):
        return {"resolution": self.resolution, "extent": self.extent}


def cell_of(points, grid, tol=1e-9):
    """
    ``(rows, cols)`` cell indices of ``points``. Bins are half-open
    ``[lo, hi)`` except the last one which also takes the upper arena edge.
    Row 0 holds the lowest ``y``.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    half = grid.extent / 2.0
    if np.any(~np.isfinite(points)) or np.any(np.abs(points) > half + tol):
        raise InvalidInputError("position outside the %gm arena" % grid.extent)
    cells = np.floor((points + half) / grid.cell_size).astype(np.int64)
    cells = np.clip(cells, 0, grid.resolution - 1)
    return cells[:, 1], cells[:, 0]


def occupancy_grid(dataset, grid):
    """
    Visit counts of record end positions, ``resolution x resolution`` indexed
    ``[row, col]``.
    """
    rows, cols = cell_of(dataset.ends, grid)
    counts = np.zeros((grid.resolution, grid.resolution), dtype=np.int64)
    np.add.at(counts, (rows, cols), 1)
    return counts


def path_segments(dataset):
    """ Start and end position of every action, for path plots. """
    return dataset.frame[["index", "x0", "y0", "x1", "y1"]]


def stuck_summary(dataset):
    stuck = dataset.stuck
    longest = run = 0
    for flag in stuck:
        run = run + 1 if flag else 0
        longest = max(longest, run)
    count = int(stuck.sum())
    return {
        "records": len(dataset),
        "stuck": count,
        "fraction": count / len(dataset) if len(dataset) else 0.0,
        "longest_run": longest,
    }


def write_checkpoint(path, checkpoint):
    """
    Atomically write a checkpoint dict (``actions_completed``, ``rng_state``,
    ``last_pose``, ``config_digest``) as JSON.
    """
    data = dict((k, checkpoint[k]) for k in CHECKPOINT_KEYS)
    with atomic_write(path) as f:
        f.write(DEFAULT_SERIALIZER.dumps(data) + "\n")
    logger.info("Checkpoint at %d actions written to %s", data["actions_completed"], path)


def read_checkpoint(path):
    with open(path, "r", encoding="utf-8") as f:
        raw = f.read()
    try:
        data = DEFAULT_SERIALIZER.loads(raw)
    except SerializationError as e:
        raise CorruptCheckpointError(path, "invalid JSON", e)
    if not isinstance(data, dict) or any(k not in data for k in CHECKPOINT_KEYS):
        raise CorruptCheckpointError(path, "missing keys, expected %s" % (CHECKPOINT_KEYS,))
    pose = data["last_pose"]
    if not isinstance(pose, dict) or any(k not in pose for k in ("x", "y", "theta")):
        raise CorruptCheckpointError(path, "last_pose needs x, y and theta")
    return data
