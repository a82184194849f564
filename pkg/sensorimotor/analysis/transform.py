#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import logging

import numpy as np
import pandas as pd

from ..exceptions import DegenerateInputError, InvalidInputError
from .geometry import SensorPlane, signed_area

logger = logging.getLogger("sensorimotor.analysis")

DEFAULT_K = 10


class ProbeSet(object):
    """
    Test geometry in physical space: a ``line`` of equally spaced points or a
    row-major ``grid`` lattice (``topology == (nx, ny)``; point ``(i, j)`` sits at
    position ``j * nx + i``).
    """

    def __init__(self, kind, points, topology=None):
        self.kind = kind
        self.points = np.asarray(points, dtype=float)
        self.topology = topology

    def __repr__(self):
        return "<ProbeSet: %s of %d points>" % (self.kind, len(self.points))

    def __len__(self):
        return len(self.points)


def generate_probe(kind, p0, p1, n, arena=None):
    """
    Build a :class:`ProbeSet`.

    :arg kind: ``"line"`` or ``"grid"``
    :arg p0: first end point / lattice corner
    :arg p1: last end point / opposite corner
    :arg n: points on the line (``>= 2``) or ``(nx, ny)`` for a grid
    :arg arena: when given, every point must lie inside it
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    if p0.shape != (2,) or p1.shape != (2,) or not np.all(np.isfinite([p0, p1])):
        raise InvalidInputError("probe corners must be finite 2-D points")
    if arena is not None and not (arena.contains(*p0) and arena.contains(*p1)):
        raise InvalidInputError("probe (%r, %r) leaves %r" % (tuple(p0), tuple(p1), arena))

    if kind == "line":
        if int(n) != n or n < 2:
            raise InvalidInputError("a line needs n >= 2 points, got %r" % (n,))
        t = np.linspace(0.0, 1.0, int(n))
        return ProbeSet("line", p0 + t[:, None] * (p1 - p0))
    if kind == "grid":
        nx, ny = n
        if int(nx) != nx or int(ny) != ny or nx < 2 or ny < 2:
            raise InvalidInputError("a grid needs nx, ny >= 2, got %r" % (n,))
        xs = np.linspace(p0[0], p1[0], int(nx))
        ys = np.linspace(p0[1], p1[1], int(ny))
        gx, gy = np.meshgrid(xs, ys)
        return ProbeSet("grid", np.column_stack((gx.ravel(), gy.ravel())), (int(nx), int(ny)))
    raise InvalidInputError("probe kind must be 'line' or 'grid', got %r" % (kind,))


def lower_median(values, axis=0):
    """ Per-column median taking the lower middle element for even counts. """
    values = np.sort(np.asarray(values, dtype=float), axis=axis)
    return np.take(values, (values.shape[axis] - 1) // 2, axis=axis)


class MappedProbe(object):
    """
    A :class:`ProbeSet` carried into sensor space.

    ``images`` are normalized sensor vectors (NaN rows where no neighbor was
    within reach), ``plane`` their 2-D PCA coordinates and ``coverage`` the
    neighbors each image was built from.
    """

    def __init__(self, source, images, plane, coverage, k):
        self.source = source
        self.images = images
        self.plane = plane
        self.coverage = coverage
        self.k = k

    def __repr__(self):
        return "<MappedProbe: %d points, %d flagged>" % (len(self.source), int(self.flagged.sum()))

    @property
    def flagged(self):
        """ Points mapped from fewer than ``k`` neighbors. """
        return self.coverage < self.k

    def to_frame(self):
        p = self.source.points
        return pd.DataFrame(
            {
                "px": p[:, 0],
                "py": p[:, 1],
                "plane_u": self.plane[:, 0],
                "plane_v": self.plane[:, 1],
                "coverage": self.coverage,
            }
        )


def map_to_sensor_space(probe, dataset, yaw_filter, k=DEFAULT_K, max_radius=None, pca_basis=None):
    """
    Image of every probe point: the per-sensor lower median of the normalized
    readings of its ``k`` nearest yaw-filtered records in physical space.

    :arg probe: :class:`ProbeSet`
    :arg dataset: :class:`~sensorimotor.dataset.Dataset`
    :arg yaw_filter: ``(center, tolerance)`` in radians
    :arg k: neighbors per point (default 10)
    :arg max_radius: ignore neighbors farther than this many meters; points
        left without neighbors get a NaN image
    :arg pca_basis: sensor plane to project onto instead of fitting one on
        the filtered records
    """
    if int(k) != k or k < 1:
        raise InvalidInputError("k must be >= 1, got %r" % (k,))
    k = int(k)
    plane = SensorPlane(dataset, yaw_filter, pca_basis, min_records=k)
    index = plane.physical_index

    images = np.full((len(probe), plane.sensors.shape[1]), np.nan)
    coverage = np.zeros(len(probe), dtype=np.int64)
    for i, point in enumerate(probe.points):
        found = index.knn(point, k)
        if max_radius is not None:
            found = [(j, d) for j, d in found if d <= max_radius]
        coverage[i] = len(found)
        if found:
            images[i] = lower_median(plane.sensors[[j for j, _ in found]])
        else:
            logger.warning("Probe point %r has no neighbor within %g m", tuple(point), max_radius)

    return MappedProbe(probe, images, plane.project(images), coverage, k)


def straightness_deviation(points):
    """
    Largest perpendicular distance of ``points`` from the chord joining the
    first and the last one, divided by the chord length.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(p) < 3:
        raise InvalidInputError("straightness needs at least 3 points")
    chord = p[-1] - p[0]
    length = float(np.hypot(*chord))
    if not length >= 1e-12:
        raise DegenerateInputError("chord of length %r" % (length,))
    offsets = p - p[0]
    distance = np.abs(chord[0] * offsets[:, 1] - chord[1] * offsets[:, 0]) / length
    return float(distance.max() / length)


def grid_non_uniformity(points, nx, ny):
    """
    Coefficient of variation (population) of the areas of the quadrilateral
    cells of a row-major ``nx x ny`` lattice image.
    """
    p = np.asarray(points, dtype=float).reshape(ny, nx, 2)
    areas = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            quad = (p[j, i], p[j, i + 1], p[j + 1, i + 1], p[j + 1, i])
            areas.append(abs(signed_area(quad)))
    areas = np.asarray(areas)
    mean = areas.mean()
    if not mean > 1e-300:
        raise DegenerateInputError("grid image has zero area")
    return float(areas.std() / mean)


def distortion_metrics(mapped):
    """
    ``(straightness deviation, grid non-uniformity)`` of a mapped probe.

    Lines report ``None`` for the grid figure. Grids report the worst
    straightness over their rows and columns of at least 3 points whose
    image is not collapsed, or ``None`` when no such line exists; a grid
    image of zero total area reports ``None`` non-uniformity.
    """
    plane = mapped.plane
    if np.any(~np.isfinite(plane)):
        raise DegenerateInputError("probe has unmapped points")
    source = mapped.source
    if source.kind == "line":
        return straightness_deviation(plane), None

    nx, ny = source.topology
    lattice = plane.reshape(ny, nx, 2)
    lines = [lattice[j] for j in range(ny)] + [lattice[:, i] for i in range(nx)]
    deviations = []
    for line in lines:
        if len(line) < 3:
            continue
        try:
            deviations.append(straightness_deviation(line))
        except DegenerateInputError:
            logger.debug("Skipping collapsed grid line %r", line.tolist())
    worst = max(deviations) if deviations else None
    try:
        spread = grid_non_uniformity(plane, nx, ny)
    except DegenerateInputError:
        spread = None
    return worst, spread
