#  Licensed under the Apache License, Version 2.0 (the "License"); you may
#  not use this file except in compliance with the License. You may obtain
#  a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

import logging
import math

import numpy as np
import pandas as pd

from ..dataset import filter_by_yaw, normalize_sensors
from ..exceptions import InsufficientDataError, InvalidInputError
from .neighbors import build_index

logger = logging.getLogger("sensorimotor.analysis")


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area(polygon):
    """ Shoelace area, positive for counter-clockwise vertex order. """
    p = np.asarray(polygon, dtype=float).reshape(-1, 2)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _perimeter(vertices):
    if len(vertices) < 2:
        return 0.0
    edges = np.roll(vertices, -1, axis=0) - vertices
    return float(np.sqrt((edges * edges).sum(axis=1)).sum())


class Hull2D(object):
    """
    Convex hull of a planar point set.

    ``vertices`` run counter-clockwise from the lexicographically smallest
    point with no collinear vertices kept; ``indices`` are their positions in
    the input. Collinear input leaves the two extreme points (area 0, the
    segment counted twice in the perimeter).
    """

    def __init__(self, vertices, indices):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.area, self.perimeter = abs(signed_area(self.vertices)), _perimeter(self.vertices)

    def __repr__(self):
        return "<Hull2D: %d vertices, area %g>" % (len(self.vertices), self.area)

    def __len__(self):
        return len(self.vertices)

    def contains(self, points, tol=1e-9):
        """ Boolean mask of the points inside or on the hull (within ``tol``). """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        v = self.vertices
        if len(v) == 1:
            return np.sqrt(((points - v[0]) ** 2).sum(axis=1)) <= tol
        if len(v) == 2:
            seg = v[1] - v[0]
            length2 = float(seg @ seg)
            t = np.clip(((points - v[0]) @ seg) / length2, 0.0, 1.0)
            closest = v[0] + t[:, None] * seg
            return np.sqrt(((points - closest) ** 2).sum(axis=1)) <= tol
        inside = np.ones(len(points), dtype=bool)
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            edge = b - a
            cross = edge[0] * (points[:, 1] - a[1]) - edge[1] * (points[:, 0] - a[0])
            inside &= cross >= -tol * math.hypot(*edge)
        return inside


def convex_hull_2d(points):
    """
    Convex hull by the monotone chain algorithm.

    :arg points: ``N x 2`` array-like, ``N >= 1``
    :returns: :class:`Hull2D`
    """
    p = np.asarray(points, dtype=float)
    if p.size == 0:
        raise InvalidInputError("convex hull of an empty point set")
    p = p.reshape(-1, 2)
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("hull points must be finite")

    order = np.lexsort((p[:, 1], p[:, 0]))
    # drop exact duplicates, keeping the lowest input position
    unique = [order[0]]
    for i in order[1:]:
        if p[i, 0] != p[unique[-1], 0] or p[i, 1] != p[unique[-1], 1]:
            unique.append(i)
    if len(unique) == 1:
        return Hull2D(p[unique], unique)

    lower, upper = [], []
    for i in unique:
        while len(lower) >= 2 and _cross(p[lower[-2]], p[lower[-1]], p[i]) <= 0:
            lower.pop()
        lower.append(i)
    for i in reversed(unique):
        while len(upper) >= 2 and _cross(p[upper[-2]], p[upper[-1]], p[i]) <= 0:
            upper.pop()
        upper.append(i)
    chain = lower[:-1] + upper[:-1]
    return Hull2D(p[chain], chain)


def hull_metrics(hull):
    """ ``(area, perimeter)`` of a :class:`Hull2D`. """
    return abs(signed_area(hull.vertices)), _perimeter(hull.vertices)


class PCABasis(object):
    """
    Principal axes of a point table.

    Axes are sorted by descending variance and each is signed so that its
    largest-magnitude loading is positive, which makes projections
    reproducible across runs.

    :arg mean: column means of the fitted table
    :arg components: ``dims x D`` orthonormal axes
    :arg explained: fraction of the total variance along each axis
    """

    def __init__(self, mean, components, explained):
        self.mean = mean
        self.components = components
        self.explained = explained

    def __repr__(self):
        return "<PCABasis: %d axes, explained %s>" % (
            len(self.components),
            np.round(self.explained, 4).tolist(),
        )

    @classmethod
    def fit(cls, matrix, dims=2):
        x = np.asarray(matrix, dtype=float)
        if x.ndim != 2 or len(x) < 2:
            raise InsufficientDataError("PCA needs at least 2 rows")
        if int(dims) != dims or not 1 <= dims <= x.shape[1]:
            raise InvalidInputError("dims must be in [1, %d], got %r" % (x.shape[1], dims))
        mean = x.mean(axis=0)
        centered = x - mean
        covariance = centered.T @ centered / len(x)
        eigenvalues, eigenvectors = np.linalg.eigh(covariance)
        order = np.argsort(-eigenvalues, kind="stable")
        eigenvalues = np.clip(eigenvalues[order], 0.0, None)
        components = eigenvectors[:, order].T[: int(dims)]
        for axis in components:
            if axis[np.argmax(np.abs(axis))] < 0:
                axis *= -1
        total = eigenvalues.sum()
        if total > 0:
            explained = eigenvalues[: int(dims)] / total
        else:
            explained = np.zeros(int(dims))
        return cls(mean, components, explained)

    def transform(self, matrix):
        x = np.asarray(matrix, dtype=float)
        return (x - self.mean) @ self.components.T


def pca_project(matrix, dims=2):
    """
    Project the rows of ``matrix`` onto its top ``dims`` principal axes.

    :returns: ``(coordinates, explained_variance_fractions)``
    """
    basis = PCABasis.fit(matrix, dims)
    return basis.transform(matrix), basis.explained


class SensorPlane(object):
    """
    The yaw-conditioned slice of a dataset together with its normalized
    sensor vectors and their 2-D principal plane. Shared by the hull and the
    line/grid analyses so the plane is fitted once.

    :arg dataset: :class:`~sensorimotor.dataset.Dataset`
    :arg yaw_filter: ``(center, tolerance)`` in radians, ``None`` for all
    :arg pca_basis: plane to use instead of fitting one on the slice
    :arg min_records: fewest records the slice may have
    """

    def __init__(self, dataset, yaw_filter=None, pca_basis=None, min_records=3):
        subset = filter_by_yaw(dataset, *yaw_filter) if yaw_filter else dataset
        if len(subset) < min_records:
            raise InsufficientDataError(
                "%d records within yaw filter %r, need %d" % (len(subset), yaw_filter, min_records)
            )
        self.dataset = subset
        self.yaw_filter = yaw_filter
        self.sensors, self.mins, self.maxs = normalize_sensors(subset)
        self.positions = subset.ends
        self.basis = pca_basis if pca_basis is not None else PCABasis.fit(self.sensors)
        self._physical_index = None

    def __repr__(self):
        return "<SensorPlane: %d records>" % len(self.dataset)

    @property
    def physical_index(self):
        """ :class:`~sensorimotor.analysis.SpatialIndex` over end positions. """
        if self._physical_index is None:
            self._physical_index = build_index(self.positions)
        return self._physical_index

    def project(self, vectors):
        return self.basis.transform(vectors)

    def correspondence(self, region_center, region_radius):
        center = np.asarray(region_center, dtype=float)
        if not region_radius > 0:
            raise InvalidInputError("region radius must be > 0, got %r" % (region_radius,))
        distance = np.sqrt(((self.positions - center) ** 2).sum(axis=1))
        selected = np.flatnonzero(distance <= region_radius)
        if len(selected) < 3:
            raise InsufficientDataError(
                "%d records within %g m of %r, need 3" % (len(selected), region_radius, tuple(center))
            )
        hull = convex_hull_2d(self.positions[selected])
        records = selected[hull.indices]
        images = self.project(self.sensors[records])
        return HullCorrespondence(
            hull, images, self.dataset.index[records], tuple(center), region_radius
        )


class HullCorrespondence(object):
    """
    A physical-space hull and the images of its vertices in the sensor
    plane, in the same vertex order.

    ``winding_preserved`` is true when the image polygon keeps the
    orientation sign of the physical hull, and ``None`` when the physical
    hull is a point or a segment and has no orientation.
    """

    def __init__(self, physical_hull, sensor_points, records, region_center, region_radius):
        self.physical_hull = physical_hull
        self.sensor_points = np.asarray(sensor_points, dtype=float)
        self.records = records
        self.region_center = region_center
        self.region_radius = region_radius
        self.physical_area = signed_area(physical_hull.vertices)
        self.image_area = signed_area(self.sensor_points)
        if len(physical_hull) < 3 or self.physical_area == 0.0:
            self.winding_preserved = None
        else:
            self.winding_preserved = bool(np.sign(self.image_area) == np.sign(self.physical_area))

    def __repr__(self):
        return "<HullCorrespondence: %d vertices, preserved=%s>" % (
            len(self.physical_hull),
            self.winding_preserved,
        )

    def to_frame(self):
        v = self.physical_hull.vertices
        return pd.DataFrame(
            {
                "order": np.arange(len(v)),
                "index": self.records,
                "x": v[:, 0],
                "y": v[:, 1],
                "u": self.sensor_points[:, 0],
                "v": self.sensor_points[:, 1],
            }
        )

    def as_dict(self):
        area, perimeter = hull_metrics(self.physical_hull)
        image = Hull2D(self.sensor_points, np.arange(len(self.sensor_points)))
        return {
            "region_center": list(self.region_center),
            "region_radius": self.region_radius,
            "vertices": len(self.physical_hull),
            "physical_area": area,
            "physical_perimeter": perimeter,
            "image_signed_area": self.image_area,
            "image_perimeter": image.perimeter,
            "winding_preserved": self.winding_preserved,
        }


def hull_correspondence(dataset, region_center, region_radius, yaw_filter, pca_basis=None):
    """
    Hull of the yaw-filtered records whose end position lies within
    ``region_radius`` of ``region_center``, and the images of its vertices in
    the sensor plane (PCA of the normalized readings of the whole
    yaw-filtered slice unless ``pca_basis`` is given).
    """
    plane = SensorPlane(dataset, yaw_filter, pca_basis)
    return plane.correspondence(region_center, region_radius)


def sample_regions(dataset, n, rng, yaw_filter=None):
    """
    ``n`` region centers drawn without replacement from the end positions of
    the (yaw-filtered) records, so every region holds data.
    """
    subset = filter_by_yaw(dataset, *yaw_filter) if yaw_filter else dataset
    if not 1 <= n <= len(subset):
        raise InsufficientDataError("cannot draw %d regions from %d records" % (n, len(subset)))
    return subset.ends[rng.choice(len(subset), size=int(n), replace=False)]


class RegionSurvey(object):
    """
    Outcome of :func:`region_survey`: one :class:`HullCorrespondence` (or
    ``None`` when the region held fewer than 3 records) per center. The
    preserved fraction counts only hulls with an orientation.
    """

    def __init__(self, centers, results):
        self.centers = centers
        self.results = results

    @property
    def evaluated(self):
        return [r for r in self.results if r is not None]

    @property
    def determined(self):
        return [r for r in self.evaluated if r.winding_preserved is not None]

    @property
    def preserved_fraction(self):
        determined = self.determined
        if not determined:
            return float("nan")
        return sum(r.winding_preserved for r in determined) / float(len(determined))

    def as_dict(self):
        return {
            "regions": len(self.results),
            "evaluated": len(self.evaluated),
            "determined": len(self.determined),
            "preserved_fraction": self.preserved_fraction,
            "verdicts": [r.as_dict() if r is not None else None for r in self.results],
        }


def region_survey(dataset, centers, radius, yaw_filter, pca_basis=None, thread_count=4):
    """
    Run :func:`hull_correspondence` for many regions over one shared sensor
    plane, in a pool of ``thread_count`` threads. Results keep the order of
    ``centers``.
    """
    # Avoid importing multiprocessing unless a survey is run
    from multiprocessing.pool import ThreadPool

    plane = SensorPlane(dataset, yaw_filter, pca_basis)

    def _one(center):
        try:
            return plane.correspondence(center, radius)
        except InsufficientDataError:
            logger.warning("Region at %r holds fewer than 3 records, skipped", tuple(center))
            return None

    pool = ThreadPool(max(int(thread_count), 1))
    try:
        results = list(pool.imap(_one, [tuple(c) for c in centers]))
    finally:
        pool.close()
        pool.join()

    survey = RegionSurvey(np.asarray(centers, dtype=float).reshape(-1, 2), results)
    logger.info(
        "Winding preserved in %.1f%% of %d regions",
        100.0 * survey.preserved_fraction,
        len(survey.determined),
    )
    return survey
