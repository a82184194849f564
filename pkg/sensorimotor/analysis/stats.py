#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import logging

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from ..dataset import cell_of, filter_by_yaw
from ..exceptions import InsufficientDataError, InvalidInputError

logger = logging.getLogger("sensorimotor.analysis")

DEFAULT_WINDOW = 10


class StdGrid(object):
    """
    Per-cell standard deviation map of one sensor.

    ``values`` and ``counts`` are ``resolution x resolution`` arrays indexed
    ``[row, col]``; empty cells hold NaN. In ``plain`` mode ``counts`` are
    readings per cell and cells with fewer than two are empty; in ``rolling``
    mode they are the number of windows assigned to the cell.
    """

    def __init__(self, grid, values, counts, mode="plain", window=None, sensor_id=None):
        self.grid = grid
        self.values = values
        self.counts = counts
        self.mode = mode
        self.window = window
        self.sensor_id = sensor_id

    def __repr__(self):
        return "<StdGrid: sensor %s, %s, %d cells filled>" % (
            self.sensor_id,
            self.mode,
            int(np.isfinite(self.values).sum()),
        )

    @property
    def filled(self):
        return np.isfinite(self.values)

    def to_frame(self):
        """ Long format ``(row, col, value, count)``, one row per cell. """
        res = self.grid.resolution
        rows, cols = np.divmod(np.arange(res * res), res)
        return pd.DataFrame(
            {
                "row": rows,
                "col": cols,
                "value": self.values.reshape(-1),
                "count": self.counts.reshape(-1),
            }
        )

    def region_mean(self, mask):
        """ Mean of the filled cells selected by a ``[row, col]`` mask. """
        selected = self.values[mask & self.filled]
        return float(selected.mean()) if selected.size else float("nan")


def _check_sensor(dataset, sensor_id):
    if int(sensor_id) != sensor_id or not 0 <= sensor_id < dataset.sensor_count:
        raise InvalidInputError(
            "sensor_id must be in [0, %d), got %r" % (dataset.sensor_count, sensor_id)
        )
    return int(sensor_id)


def _cell_ids(points, grid):
    rows, cols = cell_of(points, grid)
    return rows * grid.resolution + cols


def _to_grid(series, grid, fill):
    flat = np.full(grid.resolution * grid.resolution, fill, dtype=series.dtype)
    flat[series.index.to_numpy()] = series.to_numpy()
    return flat.reshape(grid.resolution, grid.resolution)


def grid_std(dataset, sensor_id, grid):
    """
    Bin records by end position and take the population standard deviation
    of ``sensor_id``'s readings in every cell.
    """
    sensor_id = _check_sensor(dataset, sensor_id)
    frame = pd.DataFrame(
        {"cell": _cell_ids(dataset.ends, grid), "value": dataset.sensors[:, sensor_id]}
    )
    grouped = frame.groupby("cell")["value"]
    counts = _to_grid(grouped.size(), grid, 0)
    values = _to_grid(grouped.std(ddof=0), grid, np.nan)
    values[counts < 2] = np.nan
    return StdGrid(grid, values, counts, "plain", None, sensor_id)


def rolling_grid_std(dataset, sensor_id, grid, window=DEFAULT_WINDOW):
    """
    Population standard deviation over every ``window``-long run of the
    time-ordered readings of ``sensor_id``. Each window is credited to the
    cell of its last record's end position; cells average their windows.
    """
    sensor_id = _check_sensor(dataset, sensor_id)
    if int(window) != window or window < 2:
        raise InvalidInputError("window must be >= 2, got %r" % (window,))
    if len(dataset) < window:
        raise InvalidInputError(
            "window %d is longer than the %d records available" % (window, len(dataset))
        )
    window = int(window)

    ordered = dataset.sorted_by_index()
    readings = ordered.sensors[:, sensor_id]
    stds = sliding_window_view(readings, window).std(axis=1)
    cells = _cell_ids(ordered.ends, grid)[window - 1 :]

    grouped = pd.DataFrame({"cell": cells, "value": stds}).groupby("cell")["value"]
    counts = _to_grid(grouped.size(), grid, 0)
    values = _to_grid(grouped.mean(), grid, np.nan)
    return StdGrid(grid, values, counts, "rolling", window, sensor_id)


def wall_band_masks(grid, band=1.0, center=4.0):
    """
    ``[row, col]`` masks of the cells whose centers lie within ``band``
    meters of a wall and of the cells inside the central ``center x center``
    square.
    """
    centers = grid.cell_centers()
    xs, ys = np.meshgrid(centers, centers)
    half = grid.extent / 2.0
    to_wall = np.minimum(half - np.abs(xs), half - np.abs(ys))
    near_wall = to_wall <= band
    central = (np.abs(xs) <= center / 2.0) & (np.abs(ys) <= center / 2.0)
    return near_wall, central


class CorrelationMatrix(object):
    """
    Pearson correlation between sensors. ``values`` is symmetric with a unit
    diagonal; pairs involving a constant sensor are NaN.
    """

    def __init__(self, values, n_records, yaw_filter=None):
        self.values = values
        self.n_records = n_records
        self.yaw_filter = yaw_filter

    def __repr__(self):
        return "<CorrelationMatrix: %dx%d over %d records>" % (
            self.values.shape[0],
            self.values.shape[1],
            self.n_records,
        )

    @property
    def size(self):
        return self.values.shape[0]

    def mean_at_offset(self, offset):
        """ Mean coefficient over sensor pairs ``(i, i + offset mod count)``. """
        i = np.arange(self.size)
        return float(np.nanmean(self.values[i, (i + offset) % self.size]))

    def mean_abs(self):
        """ Mean ``|r|`` over the off-diagonal entries. """
        off = ~np.eye(self.size, dtype=bool)
        return float(np.nanmean(np.abs(self.values[off])))

    def to_frame(self):
        names = ["ds_%02d" % i for i in range(self.size)]
        return pd.DataFrame(self.values, index=names, columns=names)


def sensor_correlation(dataset, yaw_filter=None):
    """
    Pearson correlation of the raw readings, optionally restricted to the
    records within ``yaw_filter = (center, tolerance)``.
    """
    if yaw_filter is not None:
        dataset = filter_by_yaw(dataset, *yaw_filter)
    if len(dataset) < 3:
        raise InsufficientDataError(
            "correlation needs at least 3 records, %d left after filtering" % len(dataset)
        )

    sensors = dataset.sensors
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.corrcoef(sensors, rowvar=False)
    values = (values + values.T) / 2.0
    constant = np.ptp(sensors, axis=0) == 0
    values[constant, :] = np.nan
    values[:, constant] = np.nan
    np.fill_diagonal(values, 1.0)
    return CorrelationMatrix(values, len(dataset), yaw_filter)
